"""Time the hot kernels with numba and with the pure-numpy fallback.

Each backend runs in its own subprocess, because the switch is read at import
time (``CASIMIR_CONE_NO_NUMBA``). Prints a table and checks that both
backends return the same numbers.

    python3 benchmarks/bench_kernels.py [--repeat N]
"""

import argparse
import json
import os
import subprocess
import sys
import textwrap

CHILD = textwrap.dedent(
    """
    import json, math, time
    import numpy as np
    from casimir_cone import _accel
    from casimir_cone.specfun import conical_log_batch, bessel_log_batch
    from casimir_cone.cone import ConeConfig, cone_energy

    repeat = {repeat}
    lams = np.linspace(0.05, 60.0, 400)

    def timed(fn):
        fn()  # warm-up, includes compilation
        best = math.inf
        for _ in range(repeat):
            t = time.perf_counter()
            out = fn()
            best = min(best, time.perf_counter() - t)
        return best, out

    res = {{"numba": _accel.HAVE_NUMBA}}
    t, (lp, ldp) = timed(lambda: conical_log_batch(3, lams, 3.0))
    res["conical_400"] = t
    res["conical_sample"] = [float(lp[200]), float(ldp[200])]
    t, (sk, lk, sd, ld) = timed(lambda: bessel_log_batch(lams[:100], 0.7))
    res["bessel_100"] = t
    res["bessel_sample"] = [float(sk[50] * math.exp(lk[50])), float(sd[50] * math.exp(ld[50]))]
    t, e = timed(lambda: cone_energy(ConeConfig(1.2, 2.0)))
    res["cone_energy"] = t
    res["cone_sample"] = e.u_hat
    print(json.dumps(res))
    """
)


def run_backend(disable, repeat):
    env = dict(os.environ)
    env["CASIMIR_CONE_NO_NUMBA"] = "1" if disable else "0"
    out = subprocess.run(
        [sys.executable, "-c", CHILD.format(repeat=repeat)], env=env, capture_output=True, text=True, check=True
    )
    return json.loads(out.stdout.strip().splitlines()[-1])


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args(argv)
    fast = run_backend(False, args.repeat)
    slow = run_backend(True, args.repeat)
    if not fast["numba"]:
        print("numba is not importable; both runs used the numpy fallback")
    print(f"{'kernel':<28s}{'numba [s]':>12s}{'numpy [s]':>12s}{'speed-up':>10s}")
    for key, label in (
        ("conical_400", "conical series, 400 lambda"),
        ("bessel_100", "K_(i lambda), 100 lambda"),
        ("cone_energy", "cone_energy(1.2, 2.0)"),
    ):
        print(f"{label:<28s}{fast[key]:>12.4f}{slow[key]:>12.4f}{slow[key] / fast[key]:>9.1f}x")
    worst = 0.0
    for key in ("conical_sample", "bessel_sample"):
        for a, b in zip(fast[key], slow[key]):
            worst = max(worst, abs(a - b) / abs(b))
    worst = max(worst, abs(fast["cone_sample"] - slow["cone_sample"]) / abs(slow["cone_sample"]))
    print(f"max relative difference between backends: {worst:.2e}")
    return 0 if worst < 1e-10 else 1


if __name__ == "__main__":
    sys.exit(main())

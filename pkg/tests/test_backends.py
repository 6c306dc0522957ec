"""The numba kernels and the pure-numpy fallback must agree."""

import json
import os
import subprocess
import sys

import pytest

from casimir_cone import _accel

PROBE = r"""
import json, math
import numpy as np
from casimir_cone import _accel
from casimir_cone.specfun import conical_log_batch, bessel_log_batch
from casimir_cone.cone import ConeConfig, cone_energy, kappa_density
lams = np.linspace(0.0, 50.0, 41)
lp, ldp = conical_log_batch(2, lams, 2.2)
sk, lk, sd, ld = bessel_log_batch(lams, 1.3)
print(json.dumps({
    "numba": _accel.HAVE_NUMBA,
    "conical": (lp.tolist(), ldp.tolist()),
    "bessel": ((sk * np.exp(lk)).tolist(), (sd * np.exp(ld)).tolist()),
    "energy": cone_energy(ConeConfig(0.9, 2.3)).u_hat,
    "kappa": kappa_density(0.4, ConeConfig(0.9, 2.3)).value,
}))
"""


def _probe(disable):
    env = dict(os.environ, CASIMIR_CONE_NO_NUMBA="1" if disable else "0")
    out = subprocess.run([sys.executable, "-c", PROBE], env=env, capture_output=True, text=True, check=True,
                         timeout=600)
    return json.loads(out.stdout.strip().splitlines()[-1])


@pytest.fixture(scope="module")
def both():
    return _probe(False), _probe(True)


def test_flag_selects_backend(both):
    fast, slow = both
    assert slow["numba"] is False
    assert fast["numba"] is _accel.HAVE_NUMBA


def _close(a, b, rel):
    import numpy as np

    a, b = np.asarray(a, float), np.asarray(b, float)
    return np.all(np.abs(a - b) <= rel * np.maximum(np.abs(b), 1e-300))


def test_kernels_agree(both):
    fast, slow = both
    for key in ("conical", "bessel"):
        for a, b in zip(fast[key], slow[key]):
            assert _close(a, b, 1e-12), key


def test_energies_agree(both):
    fast, slow = both
    assert _close(fast["energy"], slow["energy"], 1e-12)
    assert _close(fast["kappa"], slow["kappa"], 1e-12)

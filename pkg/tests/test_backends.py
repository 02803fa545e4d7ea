import json
import os
import subprocess
import sys

import numpy as np
import pytest

SCRIPT = r"""
import json, math
import numpy as np
from lowres_psk import backend
from lowres_psk.analytic import SepQuery, sep_theorem3
from lowres_psk.detector import DetectionContext, region_probabilities
from lowres_psk.montecarlo import SimPlan, simulate_sep
out = {"backend": backend()}
out["theorem3"] = [sep_theorem3(SepQuery(4, 3, 2.0, 100.0)), sep_theorem3(SepQuery(8, 3, 1.0, 10.0))]
out["errors"] = [simulate_sep(SimPlan.fixed(SepQuery(8, 3, 1.0, 10.0), 100_000, seed=4)).errors,
                 simulate_sep(SimPlan.fixed(SepQuery(16, 2, 0.5, 1e4), 50_000, seed=2)).errors]
out["oracle"] = region_probabilities(DetectionContext.build(8, 3, 0.7 - 0.4j, 3.0)).ravel().tolist()
print(json.dumps(out))
"""


def run(no_numba):
    env = dict(os.environ)
    env.pop("LOWRES_PSK_NO_NUMBA", None)
    if no_numba:
        env["LOWRES_PSK_NO_NUMBA"] = "1"
    res = subprocess.run([sys.executable, "-c", SCRIPT], env=env, capture_output=True, text=True, check=True)
    return json.loads(res.stdout)


@pytest.fixture(scope="module")
def both():
    return run(False), run(True)


def test_flag_selects_backend(both):
    fast, slow = both
    assert slow["backend"] == "numpy"
    assert fast["backend"] in ("numba", "numpy")


def test_identical_error_counts(both):
    fast, slow = both
    assert fast["errors"] == slow["errors"]


def test_quadrature_agrees(both):
    fast, slow = both
    assert np.allclose(fast["theorem3"], slow["theorem3"], rtol=1e-9, atol=0)
    assert np.allclose(fast["oracle"], slow["oracle"], rtol=1e-9, atol=1e-15)

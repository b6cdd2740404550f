import os
import subprocess
import sys

import numpy as np
import pytest

from qbt import _kernels
from qbt.exactmath import DEFAULT_PRIME

SCRIPT = """
import sys
from qbt import _kernels
from qbt.catalog import get_entry
from qbt.poly import ideal_hilbert_function
gens = get_entry("severi-p2xp2").map.forms
print(_kernels.backend_name(), [ideal_hilbert_function(gens, t) for t in range(2, 5)])
"""


def backend_output(no_numba):
    env = dict(os.environ)
    env.pop("QBT_NO_NUMBA", None)
    if no_numba is not None:
        env["QBT_NO_NUMBA"] = no_numba
    res = subprocess.run([sys.executable, "-c", SCRIPT], capture_output=True, text=True,
                         env=env, check=True)
    return res.stdout.split(" ", 1)


def test_environment_selects_backend():
    name, values = backend_output("1")
    assert name == "numpy"
    if _kernels.NUMBA_AVAILABLE:
        name2, values2 = backend_output(None)
        assert name2 == "numba"
        assert values2 == values
        assert backend_output("0")[0] == "numba"


def test_empty_and_zero_matrices():
    assert _kernels.rank_mod_p(np.zeros((0, 3), dtype=np.int64), DEFAULT_PRIME) == 0
    assert _kernels.rank_mod_p_numpy(np.zeros((4, 5), dtype=np.int64), DEFAULT_PRIME) == 0


@pytest.mark.skipif(not _kernels.NUMBA_AVAILABLE, reason="numba not installed")
def test_backends_agree_on_dependent_rows():
    rng = np.random.default_rng(3)
    p = DEFAULT_PRIME
    for _ in range(20):
        m, n, k = rng.integers(1, 30, size=3)
        a = rng.integers(0, p, size=(m, k)) @ np.ones((k, 1), dtype=np.int64) % p
        b = (rng.integers(0, 1000, size=(m, k)) @ rng.integers(0, 1000, size=(k, n))) % p
        for mat in (a, b):
            assert _kernels.rank_mod_p_numba(mat, p) == _kernels.rank_mod_p_numpy(mat, p)

import itertools

import numpy as np
import pytest

from hamsim.encoding import PauliDecomposition


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def random_pauli(rng, n=2, k=None, drop_identity=True):
    words = ["".join(w) for w in itertools.product("IXYZ", repeat=n)]
    if drop_identity:
        words = words[1:]
    k = k if k is not None else int(rng.integers(1, len(words) + 1))
    pick = rng.choice(len(words), size=k, replace=False)
    coeffs = rng.uniform(-1, 1, k)
    coeffs[np.abs(coeffs) < 1e-3] = 0.5
    return PauliDecomposition([(float(c), words[i]) for c, i in zip(coeffs, pick)])

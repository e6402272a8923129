import numpy as np
import pytest
import scipy.sparse as sp

from reviewtox import _backend
from reviewtox.preprocess import default_lexicon
from reviewtox.synthetic import load_bundled


@pytest.fixture(scope="session")
def lexicon():
    return default_lexicon()


@pytest.fixture(scope="session")
def bundled():
    return load_bundled()


BACKENDS = ["numpy"] + (["numba"] if _backend.HAVE_NUMBA else [])


@pytest.fixture(params=BACKENDS)
def backend(request):
    with _backend.use_backend(request.param):
        yield request.param


def random_sparse(n, d, density=0.15, seed=0):
    """Non-negative sparse rows with labels from a sparse linear rule."""
    rng = np.random.default_rng(seed)
    X = sp.random(n, d, density=density, random_state=rng, format="csr")
    w = rng.normal(size=d)
    y = (X @ w > np.median(X @ w)).astype(np.int64)
    return X, y

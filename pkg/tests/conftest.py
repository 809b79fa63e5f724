import numpy as np
import pytest

from almsvm.alm import build_svc, build_svr
from almsvm.sparse import SparseMatrix
from almsvm.synthetic import svc_blobs, svr_linear


def random_sparse(rng, m, n, density=0.5):
    """Random CSR matrix with at least one nonzero."""
    mask = rng.random((m, n)) < density
    if not mask.any():
        mask[rng.integers(m), rng.integers(n)] = True
    a = np.where(mask, rng.normal(size=(m, n)), 0.0)
    return SparseMatrix.from_dense(a)


def random_problem(seed=0, m=12, n=5, task="svc", C=1.3, eps=0.1):
    """Small random instance for gradient/Hessian checks."""
    if task == "svc":
        data = svc_blobs(m, n, separation=1.0, scale=1.0, seed=seed)
        return build_svc(data, C)
    data = svr_linear(m, n, noise=0.3, seed=seed)
    return build_svr(data, C, eps)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)

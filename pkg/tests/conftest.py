import numpy as np
import pytest

from dyncap.channel import KrausChannel
from dyncap.cqstate import CqEnsemble
from dyncap.qmat import DensityOperator


def random_density(rng, dim, dims=None) -> DensityOperator:
    """Full-rank random state via the Ginibre construction."""
    g = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    mat = g @ g.conj().T
    mat /= np.trace(mat).real
    return DensityOperator(mat, dims)


def random_pure(rng, dim, dims=None) -> DensityOperator:
    v = rng.normal(size=dim) + 1j * rng.normal(size=dim)
    v /= np.linalg.norm(v)
    return DensityOperator(np.outer(v, v.conj()), dims)


def random_hermitian(rng, dim) -> np.ndarray:
    g = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    return 0.5 * (g + g.conj().T)


def random_two_kraus_qubit(rng) -> KrausChannel:
    """Random qubit channel with a two-dimensional environment."""
    g = rng.normal(size=(4, 2)) + 1j * rng.normal(size=(4, 2))
    q, _ = np.linalg.qr(g)
    return KrausChannel([q[:2, :], q[2:, :]], label="random:2-kraus")


def random_ensemble(rng, dim=2, size=None) -> CqEnsemble:
    k = size or int(rng.integers(1, 4))
    probs = rng.dirichlet(np.ones(k))
    return CqEnsemble([(float(p), random_density(rng, dim)) for p in probs])


@pytest.fixture
def rng():
    return np.random.default_rng(20210607)

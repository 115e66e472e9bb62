import numpy as np
import pytest

from cqbounds import (
    CQChannel,
    ClassicalChannel,
    validate_classical,
    validate_cq,
)


def random_classical(rng, nx, ny):
    return validate_classical(rng.dirichlet(np.ones(ny), size=nx))


def random_density(rng, d, rank=None):
    r = rank if rank is not None else d
    G = rng.standard_normal((d, r)) + 1j * rng.standard_normal((d, r))
    S = G @ G.conj().T
    return S / S.trace().real


def random_cq(rng, nx, d):
    return validate_cq([random_density(rng, d) for _ in range(nx)])


def random_pure_cq(rng, nx, d):
    states = []
    for _ in range(nx):
        v = rng.standard_normal(d) + 1j * rng.standard_normal(d)
        v /= np.linalg.norm(v)
        states.append(np.outer(v, v.conj()))
    return validate_cq(states)


def diag_embedding(ch: ClassicalChannel) -> CQChannel:
    """Classical channel as commuting (diagonal) density operators."""
    return validate_cq([np.diag(row.astype(complex)) for row in ch.matrix])


def typewriter_channel(q=5, eps=0.5) -> ClassicalChannel:
    W = np.zeros((q, q))
    for x in range(q):
        W[x, x] = 1.0 - eps
        W[x, (x + 1) % q] = eps
    return validate_classical(W)


@pytest.fixture
def bsc():
    return validate_classical([[0.9, 0.1], [0.1, 0.9]])


@pytest.fixture
def noiseless_binary():
    return validate_classical([[1.0, 0.0], [0.0, 1.0]])


@pytest.fixture
def pentagon_channel():
    return typewriter_channel(5)

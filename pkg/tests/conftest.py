"""
Shared fixtures and random instance generators.

Kraus families are generated by slicing random isometries: the first
columns of a QR-orthonormalised complex Gaussian matrix stacked as
[B^{i₁}_j; B^{i₂}_j; …] satisfy Σ_i B^{i*}_j B^i_j = I exactly up to rounding.
"""

import numpy as np
import pytest

from oqrw.blocks import BlockObservable, BlockProjection, BlockState
from oqrw.utils.math import hermitize
from oqrw.walk_model import TransitionFamily, build_two_site_walk


def complex_gaussian(rng, *shape):
    return rng.normal(size=shape) + 1j * rng.normal(size=shape)


def random_isometry(rng, rows, cols):
    q, _ = np.linalg.qr(complex_gaussian(rng, rows, cols))
    return q[:, :cols]


def random_unitary(rng, dim):
    return random_isometry(rng, dim, dim)


def random_family(rng, h_dim, n_sites, max_targets=None):
    """Strict family in which every site has at least one outgoing transition."""
    max_targets = max_targets or n_sites
    transitions = []
    for j in range(n_sites):
        count = int(rng.integers(1, max_targets + 1))
        targets = sorted(rng.choice(n_sites, size=count, replace=False))
        v = random_isometry(rng, count * h_dim, h_dim)
        for k, i in enumerate(targets):
            transitions.append((int(i), j, v[k * h_dim:(k + 1) * h_dim, :]))
    return TransitionFamily.build(h_dim, [str(s) for s in range(n_sites)], transitions)


def random_psd(rng, dim):
    a = complex_gaussian(rng, dim, dim)
    return hermitize(a @ a.conj().T)


def random_state(rng, h_dim, n_sites, full_support=True):
    sites = list(range(n_sites))
    if not full_support:
        keep = int(rng.integers(1, n_sites + 1))
        sites = sorted(int(s) for s in rng.choice(n_sites, size=keep, replace=False))
    blocks = {s: random_psd(rng, h_dim) for s in sites}
    total = sum(np.trace(b).real for b in blocks.values())
    return BlockState(h_dim=h_dim, n_sites=n_sites, blocks={s: b / total for s, b in blocks.items()})


def random_observable(rng, h_dim, n_sites, hermitian=True):
    blocks = {}
    for s in range(n_sites):
        m = complex_gaussian(rng, h_dim, h_dim)
        blocks[s] = hermitize(m) if hermitian else m
    return BlockObservable.from_blocks(h_dim, n_sites, blocks)


def random_projection_block(rng, dim, rank=None):
    rank = int(rng.integers(0, dim + 1)) if rank is None else rank
    q = random_unitary(rng, dim)[:, :rank]
    return hermitize(q @ q.conj().T)


def random_projection(rng, h_dim, n_sites):
    return BlockProjection(
        h_dim=h_dim,
        n_sites=n_sites,
        diag_blocks={s: random_projection_block(rng, h_dim) for s in range(n_sites)},
    )


@pytest.fixture
def rng():
    return np.random.default_rng(20240917)


@pytest.fixture
def two_site_family():
    return build_two_site_walk(0.6, 0.8, 0.8, 0.6, 0.5)


@pytest.fixture
def invariant_state():
    """diag(1, 0) on site "2"."""
    return BlockState.localized(np.diag([1.0, 0.0]), 1, 2)


@pytest.fixture
def shift_ring():
    """Five-site ring where every site moves its state unchanged to the next one."""
    eye = np.eye(2)
    return TransitionFamily.build(2, [str(j) for j in range(5)], [((j + 1) % 5, j, eye) for j in range(5)])

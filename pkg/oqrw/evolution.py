"""
Schrödinger and Heisenberg pictures of the walk map

    M(ρ)_i = Σ_j B^i_j ρ_j B^{i*}_j,    M*(y)_j = Σ_i B^{i*}_j y_i B^i_j,

evaluated block by block, plus invariant state searches.
"""

from __future__ import annotations

import logging
from concurrent.futures import ThreadPoolExecutor
from contextlib import contextmanager
from contextvars import ContextVar
from dataclasses import dataclass
from enum import Enum
from typing import Callable, Iterator, Sequence

import numpy as np
import scipy.linalg

from oqrw import eigen_tol, invariant_max_iters, invariant_tol, psd_tol
from oqrw.blocks import BlockObservable, BlockState, SiteIndex
from oqrw.exceptions import InvalidParameterError, InvariantStateNotFound, NormalizationError, StructuralError
from oqrw.utils.math import ComplexMatrix, clip_psd, hermitize, min_eigenvalue
from oqrw.walk_model import TransitionFamily, ValidationMode

logger = logging.getLogger(__name__)

__all__ = [
    "BlockState",
    "InvariantMethod",
    "InvariantSearch",
    "adjoint_apply",
    "check_invariance_chain",
    "evolve",
    "find_invariant_state",
    "path_probability",
    "position_distribution",
    "step",
    "superoperator",
    "worker_pool",
]

_site_pool: ContextVar[ThreadPoolExecutor | None] = ContextVar("site_pool", default=None)


@contextmanager
def worker_pool(threads: int) -> Iterator[ThreadPoolExecutor | None]:
    """
    Evaluate site blocks on ``threads`` worker threads inside the block.

    One executor serves every block map of the run; 1 keeps evaluation
    sequential.
    """
    if threads < 1:
        raise InvalidParameterError(f"thread count must be positive, got {threads}")
    if threads == 1:
        token = _site_pool.set(None)
        try:
            yield None
        finally:
            _site_pool.reset(token)
        return
    with ThreadPoolExecutor(max_workers=threads, thread_name_prefix="oqrw-sites") as pool:
        token = _site_pool.set(pool)
        logger.debug(f"evaluating site blocks on {threads} threads")
        try:
            yield pool
        finally:
            _site_pool.reset(token)


def _map_sites(fn: Callable[[SiteIndex], ComplexMatrix], sites: Sequence[SiteIndex]) -> dict[SiteIndex, ComplexMatrix]:
    # Each block is computed independently; the dict is assembled in site order.
    pool = _site_pool.get()
    if pool is not None and len(sites) > 1:
        results = list(pool.map(fn, sites))
    else:
        results = [fn(site) for site in sites]
    return dict(zip(sites, results))


def _check_shape(family: TransitionFamily, h_dim: int, n_sites: int, what: str) -> None:
    if (family.h_dim, family.n_sites) != (h_dim, n_sites):
        raise StructuralError(
            f"{what} shape (h_dim={h_dim}, n_sites={n_sites}) does not match the walk "
            f"(h_dim={family.h_dim}, n_sites={family.n_sites})"
        )


def propagate(
    family: TransitionFamily, blocks: dict[SiteIndex, ComplexMatrix], hermitian: bool = False
) -> dict[SiteIndex, ComplexMatrix]:
    """One application of M to raw blocks, without any state validation."""

    def target_block(i: SiteIndex) -> ComplexMatrix:
        acc = np.zeros((family.h_dim, family.h_dim), dtype=np.complex128)
        for j, b in family.incoming(i):
            if j in blocks:
                acc += b @ blocks[j] @ b.conj().T
        return hermitize(acc) if hermitian else acc

    targets = [i for i in family.targets() if any(j in blocks for j, _ in family.incoming(i))]
    return _map_sites(target_block, targets)


def step(family: TransitionFamily, state: BlockState) -> BlockState:
    _check_shape(family, state.h_dim, state.n_sites, "state")
    checked = state.checked and family.validation_mode is ValidationMode.STRICT
    return BlockState(
        h_dim=state.h_dim,
        n_sites=state.n_sites,
        blocks=propagate(family, dict(state.blocks), hermitian=True),
        trace_tol=state.trace_tol,
        checked=checked,
    )


def evolve(family: TransitionFamily, state: BlockState, n: int) -> BlockState:
    if n < 0:
        raise InvalidParameterError(f"number of steps must be non-negative, got {n}")
    for _ in range(n):
        state = step(family, state)
    return state


def trajectory(family: TransitionFamily, state: BlockState, n: int) -> list[BlockState]:
    """States after 0, 1, ..., n steps."""
    if n < 0:
        raise InvalidParameterError(f"number of steps must be non-negative, got {n}")
    states = [state]
    for _ in range(n):
        states.append(step(family, states[-1]))
    return states


def position_distribution(state: BlockState) -> dict[SiteIndex, float]:
    """Occupation probabilities Tr(ρ_i) of the sites carrying a block."""
    return {i: state.trace(i) for i in state.blocks}


def adjoint_apply(family: TransitionFamily, observable: BlockObservable) -> BlockObservable:
    _check_shape(family, observable.h_dim, observable.n_sites, "observable")

    def source_block(j: SiteIndex) -> ComplexMatrix:
        acc = np.zeros((family.h_dim, family.h_dim), dtype=np.complex128)
        for i, b in family.outgoing(j):
            if i in observable.diag_blocks:
                acc += b.conj().T @ observable.diag_blocks[i] @ b
        return acc

    return BlockObservable(
        h_dim=observable.h_dim,
        n_sites=observable.n_sites,
        diag_blocks=_map_sites(source_block, list(family.sources)),
    )


def path_probability(family: TransitionFamily, state: BlockState, path: Sequence[SiteIndex]) -> float:
    """
    Probability of observing the site sequence ``path`` (starting site
    included) in successive position measurements.
    """
    if not path:
        raise InvalidParameterError("path must contain at least the starting site")
    w = state.block(path[0])
    for source, target in zip(path[:-1], path[1:]):
        b = family.get(target, source)
        if b is None:
            return 0.0
        w = b @ w @ b.conj().T
    return float(np.trace(w).real)


def superoperator(family: TransitionFamily) -> ComplexMatrix:
    """
    Dense matrix of M on concatenated row-major block vectors.

    Block (i, j) is B^i_j ⊗ conj(B^i_j), so vec(B ρ B*) = (B ⊗ conj(B)) vec(ρ).
    """
    h2 = family.h_dim ** 2
    size = h2 * family.n_sites
    dense = np.zeros((size, size), dtype=np.complex128)
    for i, j, b in family.iter_transitions():
        dense[i * h2:(i + 1) * h2, j * h2:(j + 1) * h2] += np.kron(b, b.conj())
    return dense


class InvariantMethod(str, Enum):
    POWER_ITERATION = "power_iteration"
    DENSE_EIGEN = "dense_eigen"


@dataclass(frozen=True)
class InvariantSearch:
    state: BlockState
    residual: float
    method: InvariantMethod
    iterations: int | None = None
    multiplicity: int | None = None

    @property
    def unique(self) -> bool | None:
        return None if self.multiplicity is None else self.multiplicity == 1

    def to_dict(self) -> dict:
        return {
            "method": self.method.value,
            "residual": self.residual,
            "iterations": self.iterations,
            "multiplicity": self.multiplicity,
            "unique": self.unique,
        }


def find_invariant_state(
    family: TransitionFamily,
    method: InvariantMethod | str = InvariantMethod.DENSE_EIGEN,
    max_iters: int = invariant_max_iters,
    tol: float = invariant_tol,
) -> InvariantSearch:
    """
    Find ρ with ‖M(ρ) − ρ‖_F ≤ tol.

    Raises InvariantStateNotFound when the power iteration does not settle
    within ``max_iters`` steps or when M has no eigenvalue close to 1.
    """
    if family.validation_mode is not ValidationMode.STRICT:
        raise NormalizationError("invariant states are only searched for strict (trace-preserving) families")
    method = InvariantMethod(method)
    if method is InvariantMethod.POWER_ITERATION:
        return _power_iteration(family, max_iters, tol)
    return _dense_eigen(family, tol)


def _power_iteration(family: TransitionFamily, max_iters: int, tol: float) -> InvariantSearch:
    current = BlockState.uniform(family.h_dim, family.n_sites)
    for iteration in range(1, max_iters + 1):
        following = step(family, current)
        distance = following.distance(current)
        if iteration % 1000 == 0:
            logger.debug(f"power iteration {iteration}: distance {distance:.3e}")
        if distance <= tol:
            logger.info(f"power iteration converged after {iteration} steps")
            return InvariantSearch(
                state=current,
                residual=distance,
                method=InvariantMethod.POWER_ITERATION,
                iterations=iteration,
            )
        current = following
    raise InvariantStateNotFound(f"power iteration did not converge within {max_iters} steps")


def _dense_eigen(family: TransitionFamily, tol: float) -> InvariantSearch:
    h, n = family.h_dim, family.n_sites
    lifted = superoperator(family)
    eigenvalues = np.linalg.eigvals(lifted)
    if not np.any(np.abs(eigenvalues - 1.0) <= eigen_tol):
        closest = eigenvalues[np.argmin(np.abs(eigenvalues - 1.0))]
        raise InvariantStateNotFound(f"no eigenvalue within {eigen_tol:g} of 1 (closest {closest:.6g})")

    basis = scipy.linalg.null_space(lifted - np.eye(lifted.shape[0]), rcond=eigen_tol)
    multiplicity = basis.shape[1]
    if multiplicity == 0:
        raise InvariantStateNotFound("eigenvalue 1 has no numerically stable eigenvector")
    if multiplicity > 1:
        logger.warning(f"invariant state is not unique: eigenvalue 1 has multiplicity {multiplicity}")

    diagonal = [site * h * h + a * h + a for site in range(n) for a in range(h)]
    traces = basis[diagonal, :].sum(axis=0)
    vector = basis @ traces.conj()
    total = vector[diagonal].sum()
    if abs(total) <= 1e-12:
        raise InvariantStateNotFound("fixed points of M are traceless")
    vector = vector / total

    blocks = {site: clip_psd(vector[site * h * h:(site + 1) * h * h].reshape(h, h)) for site in range(n)}
    if min(min_eigenvalue(b) for b in blocks.values()) < -psd_tol:
        raise InvariantStateNotFound("fixed point found by the eigen-solver is not positive")
    norm = sum(np.trace(b).real for b in blocks.values())
    state = BlockState(h_dim=h, n_sites=n, blocks={site: b / norm for site, b in blocks.items()})

    residual = step(family, state).distance(state)
    if residual > tol:
        raise InvariantStateNotFound(f"eigen-solver fixed point has residual {residual:.3e} > {tol:g}")
    logger.info(f"dense eigen solver found an invariant state (multiplicity {multiplicity})")
    return InvariantSearch(
        state=state,
        residual=residual,
        method=InvariantMethod.DENSE_EIGEN,
        multiplicity=multiplicity,
    )


def check_invariance_chain(family: TransitionFamily, state: BlockState, n_max: int) -> list[float]:
    """r_n = max_i ‖(M^n ρ)_i − ρ_i‖_F for n = 1..n_max."""
    residuals = []
    current = state
    for _ in range(n_max):
        current = step(family, current)
        residuals.append(current.max_block_distance(state))
    return residuals

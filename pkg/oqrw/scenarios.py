"""
Ready-made walk, state and projection bundles for the worked examples.

    ring            nearest-neighbour walk on ℤ_N with diagonal B and C,
                    uniform state and e = |e₁⟩⟨e₁| ⊗ |k⟩⟨k|
    ring-condition-a  same ring with B = diag(√pr, 0), C = diag(√(1-pr), 1)
                    and a state chosen so that e is φ-recurrent but not
                    𝓔-recurrent
    two-site        two-site walk with the invariant state diag(1,0)⊗|2⟩⟨2|
    two-site-part2  two-site walk with a = 1 (or relaxed |a| < 1),
                    b = √(1-|a|²), c = 0, d = 1 and ρ = ½ρ₀⊗(|1⟩⟨1|+|2⟩⟨2|)
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from oqrw.blocks import BlockProjection, BlockState
from oqrw.exceptions import InvalidParameterError
from oqrw.qmc import ExpectationKind, MarkovPair
from oqrw.walk_model import TransitionFamily, ValidationMode, build_ring_walk, build_two_site_walk

logger = logging.getLogger(__name__)

PART2_CASES = ("accessible", "unaccessible")


@dataclass(frozen=True)
class Scenario:
    name: str
    family: TransitionFamily
    state: BlockState
    projection: BlockProjection
    kind: ExpectationKind
    description: str = ""

    def pair(self, kind: ExpectationKind | str | None = None) -> MarkovPair:
        return MarkovPair(family=self.family, state=self.state, kind=kind or self.kind)


def _unit_projection(s: float) -> np.ndarray:
    """Projection onto (√s, √(1-s)), so that ⟨e₁|P|e₁⟩ = s."""
    if not 0.0 <= s <= 1.0:
        raise InvalidParameterError(f"overlap must lie in [0, 1], got {s}")
    v = np.array([np.sqrt(s), np.sqrt(1.0 - s)], dtype=np.complex128)
    return np.outer(v, v.conj())


def ring_coins(pr: float) -> tuple[np.ndarray, np.ndarray]:
    if not 0.0 < pr < 1.0:
        raise InvalidParameterError(f"pr must lie in (0, 1), got {pr}")
    b = np.diag([np.sqrt(pr), np.sqrt(1.0 - pr)]).astype(np.complex128)
    c = np.diag([np.sqrt(1.0 - pr), np.sqrt(pr)]).astype(np.complex128)
    return b, c


def ring_scenario(n_sites: int = 11, pr: float = 0.3, site: int = 0) -> Scenario:
    if not 0 <= site < n_sites:
        raise InvalidParameterError(f"site must lie in 0..{n_sites - 1}, got {site}")
    b, c = ring_coins(pr)
    family = build_ring_walk(n_sites, b, c)
    state = BlockState.uniform(2, n_sites)
    projection = BlockProjection.at_site(np.diag([1.0, 0.0]), site, n_sites)
    return Scenario(
        name="ring",
        family=family,
        state=state,
        projection=projection,
        kind=ExpectationKind.FORWARD,
        description=f"ring of {n_sites} sites, pr={pr}, e = |e1><e1| at site {site}",
    )


def ring_condition_a_scenario(n_sites: int = 11, pr: float = 0.3, site: int = 0) -> Scenario:
    if not 0.0 < pr < 1.0:
        raise InvalidParameterError(f"pr must lie in (0, 1), got {pr}")
    if not 0 <= site < n_sites:
        raise InvalidParameterError(f"site must lie in 0..{n_sites - 1}, got {site}")
    b = np.diag([np.sqrt(pr), 0.0]).astype(np.complex128)
    c = np.diag([np.sqrt(1.0 - pr), 1.0]).astype(np.complex128)
    family = build_ring_walk(n_sites, b, c)

    right = (site + 1) % n_sites
    blocks = {j: np.eye(2) / (2 * n_sites) for j in range(n_sites)}
    blocks[right] = np.diag([0.0, 1.0]) / n_sites
    state = BlockState(h_dim=2, n_sites=n_sites, blocks=blocks)
    projection = BlockProjection.at_site(np.diag([1.0, 0.0]), site, n_sites)
    return Scenario(
        name="ring-condition-a",
        family=family,
        state=state,
        projection=projection,
        kind=ExpectationKind.FORWARD,
        description=f"ring of {n_sites} sites where site {right} carries no e1 weight",
    )


def two_site_scenario(
    a: float = 0.6,
    b: float = 0.8,
    c: float = 0.8,
    d: float = 0.6,
    p: float = 0.5,
    overlap: float = 0.5,
) -> Scenario:
    """
    Invariant state diag(1,0)⊗|2⟩⟨2| with e = P⊗|2⟩⟨2|, ⟨e₁|P|e₁⟩ = overlap.

    φ₀(e^⊥) = 1 − overlap, so overlap = 0 gives the never-accessible case.
    """
    family = build_two_site_walk(a, b, c, d, p)
    state = BlockState.localized(np.diag([1.0, 0.0]), 1, 2)
    projection = BlockProjection.at_site(_unit_projection(overlap), 1, 2)
    return Scenario(
        name="two-site",
        family=family,
        state=state,
        projection=projection,
        kind=ExpectationKind.DUAL,
        description=f"two-site walk ({a}, {b}, {c}, {d}, p={p}) with the invariant state, overlap {overlap}",
    )


def two_site_part2_scenario(
    a: float = 1.0,
    t: float = 0.5,
    p: float = 0.5,
    case: str = "accessible",
) -> Scenario:
    """
    ρ = ½ρ₀⊗|1⟩⟨1| + ½ρ₀⊗|2⟩⟨2| with ρ₀ = diag(1,0) and P the projection
    with Tr(ρ₀P) = t.

    ``case="accessible"`` uses e^⊥ = P⊗|1⟩⟨1|, ``case="unaccessible"`` uses
    e = P⊗|1⟩⟨1|. The family is strict only for |a| = 1.
    """
    if case not in PART2_CASES:
        raise InvalidParameterError(f"case must be one of {', '.join(PART2_CASES)}, got {case!r}")
    if not 0.0 <= abs(a) <= 1.0:
        raise InvalidParameterError(f"|a| must lie in [0, 1], got {a}")
    if not 0.0 < t < 1.0:
        raise InvalidParameterError(f"t must lie in (0, 1), got {t}")

    strict = np.isclose(abs(a), 1.0)
    mode = ValidationMode.STRICT if strict else ValidationMode.RELAXED
    if not strict:
        logger.warning(f"|a| = {abs(a):g} < 1: the part-2 walk is not trace preserving, using relaxed validation")
    family = build_two_site_walk(a, np.sqrt(1.0 - abs(a) ** 2), 0.0, 1.0, p, validation_mode=mode)

    rho0 = np.diag([1.0, 0.0])
    state = BlockState(h_dim=2, n_sites=2, blocks={0: rho0 / 2, 1: rho0 / 2})
    p_proj = _unit_projection(t)
    if case == "accessible":
        projection = BlockProjection(h_dim=2, n_sites=2, diag_blocks={0: np.eye(2) - p_proj, 1: np.eye(2)})
    else:
        projection = BlockProjection.at_site(p_proj, 0, 2)
    return Scenario(
        name="two-site-part2",
        family=family,
        state=state,
        projection=projection,
        kind=ExpectationKind.DUAL,
        description=f"two-site walk with a={a}, Tr(rho0 P)={t}, case {case}",
    )

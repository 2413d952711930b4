"""
Quantum Markov chains generated by a walk and one of its states.

A Markov pair couples the state ρ (used both as initial state and as the
weight of the site functionals) with one of two transition expectations:

    forward  𝓔(x⊗y)_j = (M*x)_j · φ_j(y)
    dual     𝓔̃(x⊗y)_j = φ_j(x) · (M*y)_j

where φ_j(x) = Tr(ρ_j x_jj)/Tr(ρ_j) and j runs over the support of ρ.
Blocks outside the support are zero, so paths entering the zero set of ρ
carry no weight.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from enum import Enum
from typing import Sequence

import numpy as np

from oqrw import support_tol as default_support_tol
from oqrw.blocks import BlockObservable, BlockProjection, BlockState, SiteIndex
from oqrw.evolution import adjoint_apply, propagate
from oqrw.exceptions import InvalidParameterError, KindError, StructuralError, SupportError
from oqrw.utils.math import ComplexMatrix, frobenius, hermitize, psd_sqrt
from oqrw.walk_model import TransitionFamily

logger = logging.getLogger(__name__)

__all__ = [
    "BlockObservable",
    "BlockProjection",
    "ExpectationKind",
    "KrausFamily",
    "KrausTerm",
    "MarkovPair",
    "SupportRestriction",
    "build_kraus_K",
    "check_compatibility",
    "check_kk1",
    "check_kk2",
    "check_translation_invariance",
    "phi_site",
    "psi",
    "qmc_evaluate",
    "qmc_evaluate_nested",
    "qmc_evaluate_product_dual",
    "qmc_evaluate_product_forward",
    "restrict_support",
    "transition_expectation",
]


class ExpectationKind(str, Enum):
    FORWARD = "forward"
    DUAL = "dual"


@dataclass(frozen=True, eq=False)
class SupportRestriction:
    """Partition of the sites into I_ρ (zero blocks) and its complement."""

    zero_sites: frozenset[SiteIndex]
    support_sites: tuple[SiteIndex, ...]
    family: TransitionFamily


def restrict_support(
    family: TransitionFamily, state: BlockState, support_tol: float = default_support_tol
) -> SupportRestriction:
    if (family.h_dim, family.n_sites) != (state.h_dim, state.n_sites):
        raise StructuralError("state and walk have different shapes")
    support = state.support(support_tol)
    zero = frozenset(range(family.n_sites)) - frozenset(support)
    logger.debug(f"support of the state: {len(support)} of {family.n_sites} sites")
    return SupportRestriction(
        zero_sites=zero,
        support_sites=support,
        family=family.restrict_sources(support),
    )


@dataclass(frozen=True)
class KrausTerm:
    """
    K_ij = M^{i*}_j ⊗ A_ij held in factored form.

    ``b_part`` is B^i_j and ``a_part`` the 𝓗-factor of
    A_ij = ρ_j^{1/2}/√Tr(ρ_j) ⊗ |i⟩⟨j|.
    """

    target: SiteIndex
    source: SiteIndex
    b_part: ComplexMatrix
    a_part: ComplexMatrix


@dataclass(frozen=True)
class KrausFamily:
    h_dim: int
    n_sites: int
    sources: tuple[SiteIndex, ...]
    terms: tuple[KrausTerm, ...]

    def pairs(self) -> list[tuple[SiteIndex, SiteIndex]]:
        return [(t.target, t.source) for t in self.terms]

    def by_source(self, source: SiteIndex) -> list[KrausTerm]:
        return [t for t in self.terms if t.source == source]


def build_kraus_K(family: TransitionFamily, state: BlockState) -> KrausFamily:
    """
    Kraus pair {K_ij} for the sources of ``family``.

    The family must already be restricted to the support of ``state``.
    """
    terms = []
    for j in family.sources:
        weight = state.trace(j)
        if weight <= 0.0:
            raise SupportError(f"source site {family.sites[j]} has Tr(ρ_j) = {weight:g}; restrict the support first")
        a = psd_sqrt(state.block(j)) / np.sqrt(weight)
        terms.extend(KrausTerm(target=i, source=j, b_part=b, a_part=a) for i, b in family.outgoing(j))
    return KrausFamily(h_dim=family.h_dim, n_sites=family.n_sites, sources=family.sources, terms=tuple(terms))


def check_kk1(kraus: KrausFamily) -> float:
    """‖Σ Tr^{(2)}(K_ij K_ij*) − I‖_F on 𝓗⊗𝒦^ρ, one block per source."""
    eye = np.eye(kraus.h_dim, dtype=np.complex128)
    squared = 0.0
    for j in kraus.sources:
        total = np.zeros_like(eye)
        for term in kraus.by_source(j):
            a_weight = np.trace(term.a_part @ term.a_part.conj().T)
            total += term.b_part.conj().T @ term.b_part * a_weight
        squared += frobenius(total - eye) ** 2
    return float(np.sqrt(squared))


def check_kk2(kraus: KrausFamily, state: BlockState) -> float:
    """‖Σ Tr^{(1)}(K_ij*(ρ⊗1)K_ij) − ρ‖_F, one block per source."""
    squared = 0.0
    for j in kraus.sources:
        rho = state.block(j)
        total = np.zeros_like(rho)
        for term in kraus.by_source(j):
            mass = np.trace(term.b_part @ rho @ term.b_part.conj().T)
            total += mass * (term.a_part.conj().T @ term.a_part)
        squared += frobenius(total - rho) ** 2
    return float(np.sqrt(squared))


@dataclass(frozen=True, eq=False)
class MarkovPair:
    """The pair (φ₀ = Tr(ρ ·), 𝓔) of a walk and a state."""

    family: TransitionFamily
    state: BlockState
    kind: ExpectationKind
    support_tol: float = default_support_tol
    restriction: SupportRestriction = field(init=False, repr=False)
    weights: dict[SiteIndex, float] = field(init=False, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "kind", ExpectationKind(self.kind))
        restriction = restrict_support(self.family, self.state, self.support_tol)
        weights = {}
        for j in restriction.support_sites:
            weight = self.state.trace(j)
            if weight <= 0.0:
                raise SupportError(f"support site {self.family.sites[j]} has non-positive trace {weight:g}")
            weights[j] = weight
        object.__setattr__(self, "restriction", restriction)
        object.__setattr__(self, "weights", weights)

    @classmethod
    def forward(cls, family: TransitionFamily, state: BlockState, **kwargs) -> "MarkovPair":
        return cls(family=family, state=state, kind=ExpectationKind.FORWARD, **kwargs)

    @classmethod
    def dual(cls, family: TransitionFamily, state: BlockState, **kwargs) -> "MarkovPair":
        return cls(family=family, state=state, kind=ExpectationKind.DUAL, **kwargs)

    @property
    def h_dim(self) -> int:
        return self.state.h_dim

    @property
    def n_sites(self) -> int:
        return self.state.n_sites

    @property
    def support(self) -> tuple[SiteIndex, ...]:
        return self.restriction.support_sites

    @property
    def restricted_family(self) -> TransitionFamily:
        return self.restriction.family

    def identity(self) -> BlockObservable:
        return BlockObservable.identity(self.h_dim, self.n_sites)

    def kraus(self) -> KrausFamily:
        return build_kraus_K(self.restricted_family, self.state)


def _require_support(pair: MarkovPair, site: SiteIndex) -> None:
    if site not in pair.weights:
        raise SupportError(f"site {site} is outside the support of the state")


def _phi(pair: MarkovPair, k: SiteIndex, x: BlockObservable) -> complex:
    if k not in x.diag_blocks:
        return 0j
    return complex(np.trace(pair.state.block(k) @ x.diag_blocks[k])) / pair.weights[k]


def _psi(pair: MarkovPair, v: SiteIndex, x: BlockObservable) -> complex:
    rho = pair.state.block(v)
    total = 0j
    for i, b in pair.restricted_family.outgoing(v):
        if i in x.diag_blocks:
            total += np.trace(b @ rho @ b.conj().T @ x.diag_blocks[i])
    return total / pair.weights[v]


def _phi0(pair: MarkovPair, y: BlockObservable) -> complex:
    return complex(sum(np.trace(pair.state.block(j) @ y.block(j)) for j in pair.support))


def psi(pair: MarkovPair, v: SiteIndex, x: BlockObservable) -> float:
    """ψ_v(x) = Σ_i Tr(B^i_v ρ_v B^{i*}_v x_ii) / Tr(ρ_v)."""
    _require_support(pair, v)
    x.check_shape(pair.h_dim, pair.n_sites)
    return _psi(pair, v, x).real


def phi_site(pair: MarkovPair, k: SiteIndex, x: BlockObservable) -> float:
    """φ_k(x) = Tr(ρ_k x_kk) / Tr(ρ_k)."""
    _require_support(pair, k)
    x.check_shape(pair.h_dim, pair.n_sites)
    return _phi(pair, k, x).real


def transition_expectation(pair: MarkovPair, x: BlockObservable, y: BlockObservable) -> BlockObservable:
    x.check_shape(pair.h_dim, pair.n_sites)
    y.check_shape(pair.h_dim, pair.n_sites)
    hermitian = x.hermitian and y.hermitian

    if pair.kind is ExpectationKind.FORWARD:
        lifted = adjoint_apply(pair.restricted_family, x)
        scalars = {j: _phi(pair, j, y) for j in pair.support}
    else:
        lifted = adjoint_apply(pair.restricted_family, y)
        scalars = {j: _phi(pair, j, x) for j in pair.support}

    blocks = {}
    for j in pair.support:
        scalar = scalars[j]
        if hermitian:
            blocks[j] = hermitize(lifted.block(j)) * scalar.real
        else:
            blocks[j] = lifted.block(j) * scalar
    return BlockObservable(h_dim=pair.h_dim, n_sites=pair.n_sites, diag_blocks=blocks, hermitian=hermitian)


def nested_operator(pair: MarkovPair, xs: Sequence[BlockObservable]) -> BlockObservable:
    """𝓔(x₀⊗𝓔(x₁⊗…𝓔(xₙ⊗1)…)) before applying φ₀."""
    if not xs:
        raise InvalidParameterError("a word needs at least one observable")
    y = pair.identity()
    for x in reversed(xs):
        y = transition_expectation(pair, x, y)
    return y


def qmc_evaluate_nested(pair: MarkovPair, xs: Sequence[BlockObservable]) -> float:
    return _phi0(pair, nested_operator(pair, xs)).real


def qmc_evaluate_product_forward(pair: MarkovPair, xs: Sequence[BlockObservable]) -> float:
    """Σ_v Tr(ρ_v) Π_k ψ_v(x_k)."""
    if pair.kind is not ExpectationKind.FORWARD:
        raise KindError("the product formula Σ_v Tr(ρ_v) Π ψ_v(x_k) holds for forward pairs only")
    if not xs:
        raise InvalidParameterError("a word needs at least one observable")
    for x in xs:
        x.check_shape(pair.h_dim, pair.n_sites)
    value = 0j
    for v, weight in pair.weights.items():
        term = complex(weight)
        for x in xs:
            term *= _psi(pair, v, x)
        value += term
    return value.real


def dual_transfer(pair: MarkovPair, xs: Sequence[BlockObservable]) -> dict[SiteIndex, ComplexMatrix]:
    """
    Path-weight matrices after the last letter of ``xs``.

    w⁰_j = φ_j(x₀) ρ_j and w^k_i = φ_i(x_k) Σ_j B^i_j w^{k-1}_j B^{i*}_j,
    with φ_i := 0 off the support.
    """
    weights = {j: _phi(pair, j, xs[0]) * pair.state.block(j) for j in pair.support}
    for x in xs[1:]:
        moved = propagate(pair.restricted_family, weights)
        weights = {i: _phi(pair, i, x) * block for i, block in moved.items() if i in pair.weights}
    return weights


def qmc_evaluate_product_dual(pair: MarkovPair, xs: Sequence[BlockObservable]) -> float:
    if pair.kind is not ExpectationKind.DUAL:
        raise KindError("the path-sum formula applies to dual pairs only")
    if not xs:
        raise InvalidParameterError("a word needs at least one observable")
    for x in xs:
        x.check_shape(pair.h_dim, pair.n_sites)
    weights = dual_transfer(pair, xs)
    return float(sum(np.trace(w) for w in weights.values()).real)


def qmc_evaluate(pair: MarkovPair, xs: Sequence[BlockObservable], method: str = "product") -> float:
    """Evaluate φ(x₀⊗…⊗xₙ) with the nested recursion or the product formula of the pair's kind."""
    if method == "nested":
        return qmc_evaluate_nested(pair, xs)
    if method != "product":
        raise InvalidParameterError(f"unknown evaluation method {method!r}")
    if pair.kind is ExpectationKind.FORWARD:
        return qmc_evaluate_product_forward(pair, xs)
    return qmc_evaluate_product_dual(pair, xs)


def check_compatibility(pair: MarkovPair) -> float:
    """
    max |φ₀(𝓔(1⊗x)) − φ₀(x)| over the matrix units x = E_ab ⊗ |s⟩⟨s|.
    """
    identity = pair.identity()
    residual = 0.0
    for site in range(pair.n_sites):
        for a in range(pair.h_dim):
            for b in range(pair.h_dim):
                unit = np.zeros((pair.h_dim, pair.h_dim), dtype=np.complex128)
                unit[a, b] = 1.0
                x = BlockObservable(h_dim=pair.h_dim, n_sites=pair.n_sites, diag_blocks={site: unit})
                lhs = _phi0(pair, transition_expectation(pair, identity, x))
                rhs = complex(np.trace(pair.state.block(site) @ unit))
                residual = max(residual, abs(lhs - rhs))
    return residual


def check_translation_invariance(pair: MarkovPair, xs: Sequence[BlockObservable], shift: int = 1) -> float:
    """|φ(1^{⊗shift} ⊗ xs) − φ(xs)|."""
    if shift < 0:
        raise InvalidParameterError(f"shift must be non-negative, got {shift}")
    shifted = [pair.identity()] * shift + list(xs)
    return abs(qmc_evaluate_nested(pair, shifted) - qmc_evaluate_nested(pair, xs))

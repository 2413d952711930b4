"""
Transition families of open quantum random walks on a finite list of sites.

A family stores, for every source site ``j``, the non-zero transition
operators ``B^i_j`` towards target sites ``i``. Pairs that are not stored are
zero. The dilated operators ``M^i_j = B^i_j ⊗ |i⟩⟨j|`` are never built except
by :func:`dilation`, which only exists to cross-check block-wise formulas on
small instances.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable, Iterator, Mapping, Sequence

import numpy as np

from oqrw import kraus_tol as default_kraus_tol
from oqrw.exceptions import InvalidParameterError, NormalizationError, StructuralError
from oqrw.utils.math import ComplexMatrix, as_matrix, frobenius

logger = logging.getLogger(__name__)

SiteIndex = int
SiteRef = int | str


class ValidationMode(str, Enum):
    STRICT = "strict"
    RELAXED = "relaxed"


@dataclass(frozen=True)
class ValidationReport:
    """Per-source residuals ‖Σ_i B^{i*}_j B^i_j − I‖_F."""

    residuals: dict[SiteIndex, float]
    tol: float
    sites: tuple[str, ...] = ()

    @property
    def max_residual(self) -> float:
        return max(self.residuals.values(), default=0.0)

    @property
    def worst_site(self) -> SiteIndex | None:
        if not self.residuals:
            return None
        return max(self.residuals, key=self.residuals.get)

    @property
    def passed(self) -> bool:
        return self.max_residual <= self.tol

    def failing_sites(self) -> list[SiteIndex]:
        return [j for j, r in self.residuals.items() if r > self.tol]

    def label(self, j: SiteIndex) -> str:
        return self.sites[j] if j < len(self.sites) else str(j)

    def to_dict(self) -> dict:
        return {
            "passed": self.passed,
            "tol": self.tol,
            "max_residual": self.max_residual,
            "residuals": [
                {"site": self.label(j), "index": j, "residual": r} for j, r in sorted(self.residuals.items())
            ],
        }


@dataclass(frozen=True, eq=False)
class TransitionFamily:
    """
    Transition operators of a walk over ``sites``.

    ``transitions`` maps a source index to ``((target, B), ...)``.
    ``source_sites`` limits the Kraus condition to a subset of sources; it is
    only set on families restricted to the support of a state.
    """

    h_dim: int
    sites: tuple[str, ...]
    transitions: Mapping[SiteIndex, tuple[tuple[SiteIndex, ComplexMatrix], ...]]
    validation_mode: ValidationMode = ValidationMode.STRICT
    kraus_tol: float = default_kraus_tol
    source_sites: tuple[SiteIndex, ...] | None = None
    report: ValidationReport = field(init=False, repr=False)
    _incoming: Mapping[SiteIndex, tuple[tuple[SiteIndex, ComplexMatrix], ...]] = field(init=False, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "validation_mode", ValidationMode(self.validation_mode))
        object.__setattr__(self, "sites", tuple(str(s) for s in self.sites))
        if self.h_dim <= 0:
            raise StructuralError(f"h_dim must be positive, got {self.h_dim}")
        if not self.sites:
            raise StructuralError("a walk needs at least one site")
        if len(set(self.sites)) != len(self.sites):
            raise StructuralError(f"duplicate site labels in {list(self.sites)}")

        incoming: dict[SiteIndex, list[tuple[SiteIndex, ComplexMatrix]]] = {}
        for i, j, b in self.iter_transitions():
            if not (0 <= i < self.n_sites and 0 <= j < self.n_sites):
                raise StructuralError("transition refers to an unknown site", pair=(i, j))
            if b.shape != (self.h_dim, self.h_dim):
                raise StructuralError(f"block has shape {b.shape}, expected {(self.h_dim, self.h_dim)}", pair=(i, j))
            incoming.setdefault(i, []).append((j, b))
        object.__setattr__(self, "_incoming", {i: tuple(v) for i, v in sorted(incoming.items())})

        report = validate_kraus(self, self.kraus_tol)
        object.__setattr__(self, "report", report)
        if not report.passed:
            worst = report.worst_site
            message = (
                f"Kraus condition violated at site {report.label(worst)}: "
                f"residual {report.max_residual:.6g} > {self.kraus_tol:g}"
            )
            if self.validation_mode is ValidationMode.STRICT:
                raise NormalizationError(message, residuals=report.residuals)
            logger.warning(f"{message} (relaxed mode, proceeding)")

    @classmethod
    def build(
        cls,
        h_dim: int,
        sites: Sequence[str],
        transitions: Iterable[tuple[SiteRef, SiteRef, object]],
        validation_mode: ValidationMode | str = ValidationMode.STRICT,
        kraus_tol: float = default_kraus_tol,
    ) -> "TransitionFamily":
        """
        Build a family from ``(target, source, matrix)`` triples.

        Targets and sources may be given as indices or as site labels.
        """
        labels = tuple(str(s) for s in sites)
        outgoing: dict[SiteIndex, dict[SiteIndex, ComplexMatrix]] = {}
        for target, source, matrix in transitions:
            i = _resolve(labels, target)
            j = _resolve(labels, source)
            if i in outgoing.get(j, {}):
                raise StructuralError("duplicate transition", pair=(i, j))
            b = as_matrix(matrix, what=f"B^{labels[i]}_{labels[j]}")
            if b.shape[0] != h_dim:
                raise StructuralError(f"block has dimension {b.shape[0]}, expected {h_dim}", pair=(i, j))
            outgoing.setdefault(j, {})[i] = b
        return cls(
            h_dim=h_dim,
            sites=labels,
            transitions={j: tuple(sorted(t.items())) for j, t in sorted(outgoing.items())},
            validation_mode=validation_mode,
            kraus_tol=kraus_tol,
        )

    @property
    def n_sites(self) -> int:
        return len(self.sites)

    @property
    def n_transitions(self) -> int:
        return sum(len(t) for t in self.transitions.values())

    @property
    def sources(self) -> tuple[SiteIndex, ...]:
        if self.source_sites is not None:
            return tuple(self.source_sites)
        return tuple(range(self.n_sites))

    def site_index(self, site: SiteRef) -> SiteIndex:
        return _resolve(self.sites, site)

    def outgoing(self, source: SiteIndex) -> tuple[tuple[SiteIndex, ComplexMatrix], ...]:
        return self.transitions.get(source, ())

    def incoming(self, target: SiteIndex) -> tuple[tuple[SiteIndex, ComplexMatrix], ...]:
        return self._incoming.get(target, ())

    def targets(self) -> tuple[SiteIndex, ...]:
        return tuple(self._incoming)

    def get(self, target: SiteIndex, source: SiteIndex) -> ComplexMatrix | None:
        for i, b in self.outgoing(source):
            if i == target:
                return b
        return None

    def iter_transitions(self) -> Iterator[tuple[SiteIndex, SiteIndex, ComplexMatrix]]:
        for j, targets in self.transitions.items():
            for i, b in targets:
                yield i, j, b

    def restrict_sources(self, sources: Iterable[SiteIndex]) -> "TransitionFamily":
        """Keep only transitions leaving ``sources``; targets are unrestricted."""
        kept = tuple(sorted(set(sources)))
        return TransitionFamily(
            h_dim=self.h_dim,
            sites=self.sites,
            transitions={j: self.outgoing(j) for j in kept if self.outgoing(j)},
            validation_mode=self.validation_mode,
            kraus_tol=self.kraus_tol,
            source_sites=kept,
        )


def _resolve(labels: Sequence[str], site: SiteRef) -> SiteIndex:
    if isinstance(site, (int, np.integer)) and not isinstance(site, bool):
        if not 0 <= site < len(labels):
            raise StructuralError(f"site index {site} out of range for {len(labels)} sites")
        return int(site)
    try:
        return labels.index(str(site))
    except ValueError:
        raise StructuralError(f"unknown site label {site!r}")


def validate_kraus(family: TransitionFamily, tol: float | None = None) -> ValidationReport:
    """
    Compute ‖Σ_i B^{i*}_j B^i_j − I‖_F for every source site.

    Raises StructuralError naming the offending (target, source) pair when a
    block does not have dimension ``h_dim``.
    """
    tol = family.kraus_tol if tol is None else tol
    identity = np.eye(family.h_dim, dtype=np.complex128)
    residuals = {}
    for j in family.sources:
        total = np.zeros((family.h_dim, family.h_dim), dtype=np.complex128)
        for i, b in family.outgoing(j):
            if b.shape != total.shape:
                raise StructuralError(f"block has shape {b.shape}, expected {total.shape}", pair=(i, j))
            total += b.conj().T @ b
        residuals[j] = frobenius(total - identity)
    return ValidationReport(residuals=residuals, tol=tol, sites=family.sites)


def conjugate(family: TransitionFamily, unitary) -> TransitionFamily:
    """Return the family with every block replaced by U B U*."""
    u = as_matrix(unitary, dim=family.h_dim, what="U")
    return TransitionFamily(
        h_dim=family.h_dim,
        sites=family.sites,
        transitions={
            j: tuple((i, as_matrix(u @ b @ u.conj().T)) for i, b in targets)
            for j, targets in family.transitions.items()
        },
        validation_mode=family.validation_mode,
        kraus_tol=family.kraus_tol,
        source_sites=family.source_sites,
    )


def dilation(family: TransitionFamily, target: SiteIndex, source: SiteIndex) -> ComplexMatrix:
    """Dense M^i_j = B^i_j ⊗ |i⟩⟨j| on 𝓗⊗𝒦 (zero when the pair is absent)."""
    unit = np.zeros((family.n_sites, family.n_sites), dtype=np.complex128)
    unit[target, source] = 1.0
    b = family.get(target, source)
    if b is None:
        b = np.zeros((family.h_dim, family.h_dim), dtype=np.complex128)
    return np.kron(b, unit)


def build_ring_walk(
    n_sites: int,
    B,
    C,
    kraus_tol: float = default_kraus_tol,
) -> TransitionFamily:
    """
    Nearest-neighbour walk on the cycle ℤ_N.

    Every site ``j`` jumps to ``j-1`` with ``B`` and to ``j+1`` with ``C``
    (indices mod ``n_sites``).
    """
    if n_sites < 3:
        raise InvalidParameterError(f"a ring needs at least 3 sites, got {n_sites}")
    b = as_matrix(B, what="B")
    c = as_matrix(C, what="C")
    if b.shape != c.shape:
        raise StructuralError(f"B and C have different shapes {b.shape} and {c.shape}")
    h_dim = b.shape[0]

    residual = frobenius(b.conj().T @ b + c.conj().T @ c - np.eye(h_dim))
    if residual > kraus_tol:
        raise NormalizationError(
            f"B*B + C*C deviates from I by {residual:.6g}",
            residuals={j: residual for j in range(n_sites)},
        )

    transitions = []
    for j in range(n_sites):
        transitions.append(((j - 1) % n_sites, j, b))
        transitions.append(((j + 1) % n_sites, j, c))
    return TransitionFamily.build(h_dim, [str(j) for j in range(n_sites)], transitions, kraus_tol=kraus_tol)


def build_two_site_walk(
    a: complex,
    b: complex,
    c: complex,
    d: complex,
    p: float,
    validation_mode: ValidationMode | str = ValidationMode.STRICT,
    kraus_tol: float = default_kraus_tol,
) -> TransitionFamily:
    """
    Two-site walk on sites "1" (index 0) and "2" (index 1).

        B^1_1 = diag(a, b)        B^2_1 = diag(c, d)
        B^1_2 = [[0, √p], [0, 0]] B^2_2 = diag(1, √(1-p))
    """
    if not 0.0 < p < 1.0:
        raise InvalidParameterError(f"p must lie in (0, 1), got {p}")
    q = 1.0 - p
    transitions = [
        ("1", "1", np.diag([a, b])),
        ("1", "2", [[0.0, np.sqrt(p)], [0.0, 0.0]]),
        ("2", "2", np.diag([1.0, np.sqrt(q)])),
        ("2", "1", np.diag([c, d])),
    ]
    return TransitionFamily.build(
        2, ["1", "2"], transitions, validation_mode=validation_mode, kraus_tol=kraus_tol
    )


def build_identity_walk(h_dim: int, n_sites: int) -> TransitionFamily:
    """Every site keeps its state: B^j_j = I."""
    identity = np.eye(h_dim, dtype=np.complex128)
    return TransitionFamily.build(
        h_dim, [str(j) for j in range(n_sites)], [(j, j, identity) for j in range(n_sites)]
    )

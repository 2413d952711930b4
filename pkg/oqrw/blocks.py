"""
Block-diagonal containers shared by the evolution and QMC layers.

States and observables only carry the diagonal blocks of operators on
𝓗⊗𝒦 with respect to the position basis. Missing sites are zero blocks.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping

import numpy as np

from oqrw import hermitian_tol, projection_tol, psd_tol, support_tol
from oqrw import trace_tol as default_trace_tol
from oqrw.exceptions import InvalidStateError, StructuralError
from oqrw.utils.math import ComplexMatrix, as_matrix, frobenius, is_hermitian, is_projection, min_eigenvalue

SiteIndex = int


def _freeze_blocks(h_dim: int, n_sites: int, blocks: Mapping[SiteIndex, object], what: str) -> dict:
    frozen = {}
    for site, matrix in sorted(blocks.items()):
        site = int(site)
        if not 0 <= site < n_sites:
            raise StructuralError(f"{what} block at site {site} outside 0..{n_sites - 1}")
        frozen[site] = as_matrix(matrix, dim=h_dim, what=f"{what} block at site {site}")
    return frozen


def _dense(h_dim: int, n_sites: int, blocks: Mapping[SiteIndex, ComplexMatrix]) -> ComplexMatrix:
    dense = np.zeros((h_dim * n_sites, h_dim * n_sites), dtype=np.complex128)
    for site, block in blocks.items():
        unit = np.zeros((n_sites, n_sites))
        unit[site, site] = 1.0
        dense += np.kron(block, unit)
    return dense


@dataclass(frozen=True, eq=False)
class BlockState:
    """
    Density matrix Σ_i ρ_i ⊗ |i⟩⟨i|.

    Construction validates Hermiticity, positivity and the total trace unless
    ``checked`` is False, which is reserved for intermediate results of
    non trace-preserving families.
    """

    h_dim: int
    n_sites: int
    blocks: Mapping[SiteIndex, ComplexMatrix]
    trace_tol: float = default_trace_tol
    checked: bool = field(default=True, repr=False)

    def __post_init__(self):
        if self.h_dim <= 0 or self.n_sites <= 0:
            raise StructuralError(f"invalid state shape h_dim={self.h_dim}, n_sites={self.n_sites}")
        object.__setattr__(self, "blocks", _freeze_blocks(self.h_dim, self.n_sites, self.blocks, "state"))
        if self.checked:
            self.validate()

    def validate(self) -> "BlockState":
        for site, block in self.blocks.items():
            if not is_hermitian(block, hermitian_tol):
                raise InvalidStateError(f"state block at site {site} is not Hermitian")
            smallest = min_eigenvalue(block)
            if smallest < -psd_tol:
                raise InvalidStateError(f"state block at site {site} has eigenvalue {smallest:.3e} < 0")
        total = self.total_trace()
        if abs(total - 1.0) > self.trace_tol:
            raise InvalidStateError(f"total trace {total!r} differs from 1 by more than {self.trace_tol:g}")
        return self

    @classmethod
    def from_blocks(cls, h_dim: int, n_sites: int, blocks: Mapping[SiteIndex, object], **kwargs) -> "BlockState":
        return cls(h_dim=h_dim, n_sites=n_sites, blocks=dict(blocks), **kwargs)

    @classmethod
    def uniform(cls, h_dim: int, n_sites: int) -> "BlockState":
        """Maximally mixed state I/(h_dim·n_sites) on every site."""
        block = np.eye(h_dim, dtype=np.complex128) / (h_dim * n_sites)
        return cls(h_dim=h_dim, n_sites=n_sites, blocks={i: block for i in range(n_sites)})

    @classmethod
    def localized(cls, sigma, site: SiteIndex, n_sites: int) -> "BlockState":
        """σ ⊗ |site⟩⟨site|."""
        sigma = as_matrix(sigma, what="sigma")
        return cls(h_dim=sigma.shape[0], n_sites=n_sites, blocks={site: sigma})

    def block(self, site: SiteIndex) -> ComplexMatrix:
        if site in self.blocks:
            return self.blocks[site]
        return np.zeros((self.h_dim, self.h_dim), dtype=np.complex128)

    def trace(self, site: SiteIndex) -> float:
        return float(np.trace(self.block(site)).real)

    def total_trace(self) -> float:
        return float(sum(np.trace(b).real for b in self.blocks.values()))

    def support(self, tol: float = support_tol) -> tuple[SiteIndex, ...]:
        return tuple(site for site, block in self.blocks.items() if frobenius(block) > tol)

    def to_dense(self) -> ComplexMatrix:
        return _dense(self.h_dim, self.n_sites, self.blocks)

    def distance(self, other: "BlockState") -> float:
        """Frobenius distance of the block-diagonal operators."""
        sites = set(self.blocks) | set(other.blocks)
        return float(np.sqrt(sum(frobenius(self.block(i) - other.block(i)) ** 2 for i in sites)))

    def max_block_distance(self, other: "BlockState") -> float:
        sites = set(self.blocks) | set(other.blocks)
        return max((frobenius(self.block(i) - other.block(i)) for i in sites), default=0.0)


@dataclass(frozen=True, eq=False)
class BlockObservable:
    """Diagonal blocks x_ii of an observable on 𝓗⊗𝒦."""

    h_dim: int
    n_sites: int
    diag_blocks: Mapping[SiteIndex, ComplexMatrix]
    hermitian: bool = False

    def __post_init__(self):
        object.__setattr__(
            self, "diag_blocks", _freeze_blocks(self.h_dim, self.n_sites, self.diag_blocks, "observable")
        )
        if self.hermitian:
            for site, block in self.diag_blocks.items():
                if not is_hermitian(block, hermitian_tol):
                    raise InvalidStateError(f"observable block at site {site} is not Hermitian")

    @classmethod
    def from_blocks(
        cls, h_dim: int, n_sites: int, blocks: Mapping[SiteIndex, object], hermitian: bool | None = None
    ) -> "BlockObservable":
        if hermitian is None:
            hermitian = all(is_hermitian(np.asarray(b, dtype=np.complex128)) for b in blocks.values())
        return cls(h_dim=h_dim, n_sites=n_sites, diag_blocks=dict(blocks), hermitian=hermitian)

    @classmethod
    def identity(cls, h_dim: int, n_sites: int) -> "BlockObservable":
        eye = np.eye(h_dim, dtype=np.complex128)
        return cls(h_dim=h_dim, n_sites=n_sites, diag_blocks={i: eye for i in range(n_sites)}, hermitian=True)

    @classmethod
    def zero(cls, h_dim: int, n_sites: int) -> "BlockObservable":
        return cls(h_dim=h_dim, n_sites=n_sites, diag_blocks={}, hermitian=True)

    @property
    def sites(self) -> tuple[SiteIndex, ...]:
        return tuple(self.diag_blocks)

    def block(self, site: SiteIndex) -> ComplexMatrix:
        if site in self.diag_blocks:
            return self.diag_blocks[site]
        return np.zeros((self.h_dim, self.h_dim), dtype=np.complex128)

    def check_shape(self, h_dim: int, n_sites: int) -> None:
        if (self.h_dim, self.n_sites) != (h_dim, n_sites):
            raise StructuralError(
                f"observable shape (h_dim={self.h_dim}, n_sites={self.n_sites}) "
                f"does not match (h_dim={h_dim}, n_sites={n_sites})"
            )

    def _combine(self, other: "BlockObservable", sign: float) -> "BlockObservable":
        other.check_shape(self.h_dim, self.n_sites)
        sites = sorted(set(self.diag_blocks) | set(other.diag_blocks))
        return BlockObservable(
            h_dim=self.h_dim,
            n_sites=self.n_sites,
            diag_blocks={i: self.block(i) + sign * other.block(i) for i in sites},
            hermitian=self.hermitian and other.hermitian,
        )

    def __add__(self, other: "BlockObservable") -> "BlockObservable":
        return self._combine(other, 1.0)

    def __sub__(self, other: "BlockObservable") -> "BlockObservable":
        return self._combine(other, -1.0)

    def __mul__(self, scalar: complex) -> "BlockObservable":
        return BlockObservable(
            h_dim=self.h_dim,
            n_sites=self.n_sites,
            diag_blocks={i: scalar * b for i, b in self.diag_blocks.items()},
            hermitian=self.hermitian and complex(scalar).imag == 0,
        )

    __rmul__ = __mul__

    def block_norms(self) -> dict[SiteIndex, float]:
        return {i: frobenius(b) for i, b in self.diag_blocks.items()}

    def frobenius_norm(self) -> float:
        return float(np.sqrt(sum(n ** 2 for n in self.block_norms().values())))

    def operator_norm(self) -> float:
        return max((float(np.linalg.norm(b, 2)) for b in self.diag_blocks.values()), default=0.0)

    def trace(self) -> complex:
        return complex(sum(np.trace(b) for b in self.diag_blocks.values()))

    def to_dense(self) -> ComplexMatrix:
        return _dense(self.h_dim, self.n_sites, self.diag_blocks)

    def distance(self, other: "BlockObservable") -> float:
        return (self - other).frobenius_norm()


@dataclass(frozen=True, eq=False)
class BlockProjection(BlockObservable):
    """Block-diagonal projection e = Σ_i q_i ⊗ |i⟩⟨i|."""

    hermitian: bool = True

    def __post_init__(self):
        object.__setattr__(self, "hermitian", True)
        super().__post_init__()
        for site, block in self.diag_blocks.items():
            if not is_projection(block, projection_tol):
                raise InvalidStateError(f"block at site {site} is not an orthogonal projection")

    @classmethod
    def from_blocks(cls, h_dim: int, n_sites: int, blocks: Mapping[SiteIndex, object], hermitian=None) -> "BlockProjection":
        return cls(h_dim=h_dim, n_sites=n_sites, diag_blocks=dict(blocks))

    @classmethod
    def at_site(cls, q, site: SiteIndex, n_sites: int) -> "BlockProjection":
        """q ⊗ |site⟩⟨site|."""
        q = as_matrix(q, what="q")
        return cls(h_dim=q.shape[0], n_sites=n_sites, diag_blocks={site: q})

    @classmethod
    def identity(cls, h_dim: int, n_sites: int) -> "BlockProjection":
        eye = np.eye(h_dim, dtype=np.complex128)
        return cls(h_dim=h_dim, n_sites=n_sites, diag_blocks={i: eye for i in range(n_sites)})

    @classmethod
    def zero(cls, h_dim: int, n_sites: int) -> "BlockProjection":
        return cls(h_dim=h_dim, n_sites=n_sites, diag_blocks={})

    def complement(self) -> "BlockProjection":
        """e^⊥ with blocks I − q_i on every site."""
        eye = np.eye(self.h_dim, dtype=np.complex128)
        return BlockProjection(
            h_dim=self.h_dim,
            n_sites=self.n_sites,
            diag_blocks={i: eye - self.block(i) for i in range(self.n_sites)},
        )

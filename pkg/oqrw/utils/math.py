from __future__ import annotations

import numpy as np
import numpy.typing as npt

from oqrw import clip_tol, hermitian_tol
from oqrw.exceptions import StructuralError

__all__ = [
    "ComplexMatrix",
    "as_matrix",
    "frobenius",
    "hermitize",
    "is_hermitian",
    "is_projection",
    "min_eigenvalue",
    "psd_sqrt",
    "clip_psd",
]

ComplexMatrix = npt.NDArray[np.complex128]


def as_matrix(value, dim: int | None = None, what: str = "matrix") -> ComplexMatrix:
    """
    Coerce ``value`` into a finite square complex128 array.

    The returned array is a private copy flagged read-only.
    """
    try:
        matrix = np.array(value, dtype=np.complex128)
    except (TypeError, ValueError) as e:
        raise StructuralError(f"{what} is not a numeric array: {e}") from e
    if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
        raise StructuralError(f"{what} must be square, got shape {matrix.shape}")
    if dim is not None and matrix.shape[0] != dim:
        raise StructuralError(f"{what} has dimension {matrix.shape[0]}, expected {dim}")
    if not np.all(np.isfinite(matrix)):
        raise StructuralError(f"{what} contains non-finite entries")
    matrix.setflags(write=False)
    return matrix


def frobenius(matrix) -> float:
    return float(np.linalg.norm(matrix, "fro"))


def hermitize(matrix) -> ComplexMatrix:
    return (matrix + matrix.conj().T) / 2


def is_hermitian(matrix, tol: float = hermitian_tol) -> bool:
    return frobenius(matrix - matrix.conj().T) <= tol


def is_projection(matrix, tol: float) -> bool:
    """q² = q = q* up to ``tol`` in Frobenius norm."""
    return frobenius(matrix - matrix.conj().T) <= tol and frobenius(matrix @ matrix - matrix) <= tol


def min_eigenvalue(matrix) -> float:
    if matrix.size == 0:
        return 0.0
    return float(np.linalg.eigvalsh(hermitize(matrix))[0])


def clip_psd(matrix, tol: float = clip_tol) -> ComplexMatrix:
    """
    Hermitize and set eigenvalues in [-tol, 0) to 0.

    Rounding noise of size ``tol`` (default 1e-12) is removed. Eigenvalues
    below -tol are kept, so an indefinite matrix stays indefinite: the
    dense invariant search rejects a fixed point whose clipped blocks
    still have an eigenvalue below -psd_tol.
    """
    values, vectors = np.linalg.eigh(hermitize(matrix))
    values = np.where((values < 0) & (values >= -tol), 0.0, values)
    return (vectors * values) @ vectors.conj().T


def psd_sqrt(matrix) -> ComplexMatrix:
    """Square root of a positive semidefinite matrix via Hermitian eigendecomposition."""
    values, vectors = np.linalg.eigh(hermitize(matrix))
    values = np.clip(values, 0.0, None)
    return (vectors * np.sqrt(values)) @ vectors.conj().T

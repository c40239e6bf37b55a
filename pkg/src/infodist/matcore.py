"""Dense complex linear algebra used throughout the package.

Everything here is a pure function of its inputs. Matrices are plain
``numpy`` arrays of dtype ``complex128``; the only wrapper types are
:class:`SVDFactors` and :class:`Projector`.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InvalidDistribution, InvalidInput

RANK_TOL = 1e-10
ENTROPY_CLAMP = 1e-12
NORMALIZATION_TOL = 1e-9


def as_matrix(a) -> np.ndarray:
    """Convert to a finite 2-D complex array or raise :class:`InvalidInput`."""
    m = np.asarray(a, dtype=complex)
    if m.ndim != 2:
        raise InvalidInput(f"expected a 2-D matrix, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise InvalidInput("matrix has non-finite entries")
    return m


def dagger(a: np.ndarray) -> np.ndarray:
    return a.conj().T


@dataclass(frozen=True)
class SVDFactors:
    """Full singular value decomposition ``A = left @ diag(sv) @ right^H``.

    ``left`` and ``right`` are square unitaries; ``singular_values`` has
    ``min(rows, cols)`` entries sorted non-increasingly, zeros included.
    """

    left: np.ndarray
    singular_values: np.ndarray
    right: np.ndarray
    rank: int
    tol_rank: float = RANK_TOL

    def reconstruct(self) -> np.ndarray:
        k = len(self.singular_values)
        return (self.left[:, :k] * self.singular_values) @ dagger(self.right[:, :k])


def _rank(sv: np.ndarray, tol_rank: float) -> int:
    if len(sv) == 0 or sv[0] == 0.0:
        return 0
    return int(np.count_nonzero(sv > tol_rank * sv[0]))


def svd(a, tol_rank: float = RANK_TOL) -> SVDFactors:
    m = as_matrix(a)
    u, s, vh = np.linalg.svd(m, full_matrices=True)
    return SVDFactors(left=u, singular_values=s, right=dagger(vh), rank=_rank(s, tol_rank), tol_rank=tol_rank)


def rank(a, tol_rank: float = RANK_TOL) -> int:
    return _rank(np.linalg.svd(as_matrix(a), compute_uv=False), tol_rank)


def pseudoinverse(a, tol_rank: float = RANK_TOL) -> np.ndarray:
    """Moore-Penrose pseudoinverse built from the SVD.

    Singular values at or below ``tol_rank * sigma_1`` are treated as zero,
    so the result agrees with the rank reported by :func:`svd`.
    """
    f = svd(a, tol_rank)
    r = f.rank
    inv = 1.0 / f.singular_values[:r]
    return (f.right[:, :r] * inv) @ dagger(f.left[:, :r])


def shatten_norm(a, p: float = 2.0) -> float:
    """Schatten p-norm; ``p=np.inf`` gives the operator norm."""
    if not (p >= 1):
        raise InvalidInput(f"Schatten norm needs p >= 1, got {p}")
    s = np.linalg.svd(as_matrix(a), compute_uv=False)
    if len(s) == 0:
        return 0.0
    if np.isinf(p):
        return float(s[0])
    return float(np.sum(s**p) ** (1.0 / p))


def condition_number(a, tol_rank: float = RANK_TOL) -> float:
    m = as_matrix(a)
    if m.shape[0] != m.shape[1]:
        raise InvalidInput("condition number needs a square matrix")
    s = np.linalg.svd(m, compute_uv=False)
    if _rank(s, tol_rank) < m.shape[0]:
        return float("inf")
    return float(s[0] / s[-1])


@dataclass(frozen=True)
class Projector:
    matrix: np.ndarray

    @property
    def trace(self) -> float:
        return float(np.real(np.trace(self.matrix)))

    def is_valid(self, tol: float = 1e-9) -> bool:
        p = self.matrix
        return bool(np.linalg.norm(p @ p - p) <= tol and np.linalg.norm(p - dagger(p)) <= tol)


def range_projector(a, tol_rank: float = RANK_TOL) -> Projector:
    """Orthogonal projector onto Rng(A), computed as ``A A^+``."""
    m = as_matrix(a)
    return Projector(m @ pseudoinverse(m, tol_rank))


def kernel_complement_projector(a, tol_rank: float = RANK_TOL) -> Projector:
    """Orthogonal projector onto Ker(A)^perp = Rng(A^H), computed as ``A^+ A``."""
    m = as_matrix(a)
    return Projector(pseudoinverse(m, tol_rank) @ m)


def shannon_entropy(p) -> float:
    """Shannon entropy in bits, with ``0 log 0 = 0``.

    Entries down to ``-1e-12`` are clamped to zero; anything more negative,
    or a total further than 1e-9 from one, raises
    :class:`InvalidDistribution`.
    """
    v = np.asarray(p, dtype=float).ravel()
    if v.size == 0 or not np.all(np.isfinite(v)):
        raise InvalidDistribution("empty or non-finite probability vector")
    if np.any(v < -ENTROPY_CLAMP):
        raise InvalidDistribution(f"negative probability {v.min():.3e}")
    if abs(v.sum() - 1.0) > NORMALIZATION_TOL:
        raise InvalidDistribution(f"probabilities sum to {v.sum():.12f}")
    v = np.clip(v, 0.0, 1.0)
    nz = v[v > 0]
    return float(-np.sum(nz * np.log2(nz)) + 0.0)


def von_neumann_entropy(rho) -> float:
    """Von Neumann entropy in bits of a density matrix."""
    m = as_matrix(rho)
    if m.shape[0] != m.shape[1]:
        raise InvalidDistribution("density matrix must be square")
    if np.linalg.norm(m - dagger(m)) > NORMALIZATION_TOL:
        raise InvalidDistribution("density matrix is not Hermitian")
    ev = np.linalg.eigvalsh((m + dagger(m)) / 2)
    if ev.min() < -NORMALIZATION_TOL:
        raise InvalidDistribution(f"density matrix has eigenvalue {ev.min():.3e}")
    ev = np.where(ev < 0, 0.0, ev)
    return shannon_entropy(ev)


def commutator_norm(a: np.ndarray, b: np.ndarray) -> float:
    """Hilbert-Schmidt norm of ``[a, b]``."""
    return float(np.linalg.norm(a @ b - b @ a))


# JSON wire format: complex scalars as [re, im], matrices row-major.


def complex_to_json(z: complex) -> list[float]:
    return [float(np.real(z)), float(np.imag(z))]


def vector_to_json(v) -> list[list[float]]:
    return [complex_to_json(z) for z in np.asarray(v, dtype=complex).ravel()]


def matrix_to_json(a) -> list[list[list[float]]]:
    return [vector_to_json(row) for row in np.asarray(a, dtype=complex)]


def _scalar_from_json(z) -> complex:
    if isinstance(z, (int, float)):
        return complex(z)
    if isinstance(z, (list, tuple)) and len(z) == 2:
        return complex(float(z[0]), float(z[1]))
    raise InvalidInput(f"complex scalar must be [re, im], got {z!r}")


def vector_from_json(data) -> np.ndarray:
    if not isinstance(data, (list, tuple)):
        raise InvalidInput("vector must be a JSON array")
    return np.array([_scalar_from_json(z) for z in data], dtype=complex)


def matrix_from_json(data) -> np.ndarray:
    if not isinstance(data, (list, tuple)) or not data:
        raise InvalidInput("matrix must be a non-empty JSON array of rows")
    rows = [vector_from_json(r) for r in data]
    if len({len(r) for r in rows}) != 1:
        raise InvalidInput("matrix rows have unequal lengths")
    return as_matrix(np.vstack(rows))

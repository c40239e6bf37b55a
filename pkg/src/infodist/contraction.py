"""Single-outcome measurement operators (contractions)."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import matcore
from .errors import InvalidInput

CONTRACTION_TOL = 1e-9
DEGENERACY_TOL = 1e-9


@dataclass(frozen=True)
class Contraction:
    """A square operator with operator norm at most one.

    The SVD is computed once at construction and cached on the instance.
    """

    matrix: np.ndarray
    tol_rank: float = matcore.RANK_TOL
    svd: matcore.SVDFactors = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        m = matcore.as_matrix(self.matrix)
        if m.shape[0] != m.shape[1]:
            raise InvalidInput(f"contraction must be square, got {m.shape}")
        f = matcore.svd(m, self.tol_rank)
        if f.singular_values[0] > 1.0 + CONTRACTION_TOL:
            raise InvalidInput(f"operator norm {f.singular_values[0]:.12g} exceeds 1")
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)
        object.__setattr__(self, "svd", f)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    @property
    def singular_values(self) -> np.ndarray:
        return self.svd.singular_values

    @property
    def rank(self) -> int:
        return self.svd.rank

    @property
    def effect(self) -> np.ndarray:
        """POVM element ``M^H M``."""
        return matcore.dagger(self.matrix) @ self.matrix


def as_contraction(m, tol_rank: float = matcore.RANK_TOL) -> Contraction:
    if isinstance(m, Contraction):
        return m
    return Contraction(np.asarray(m, dtype=complex), tol_rank)


def degenerate_blocks(sv: np.ndarray, rank: int, tol: float = DEGENERACY_TOL) -> list[list[int]]:
    """Group indices of (sorted) singular values into degenerate clusters.

    Indices at or beyond ``rank`` form a single kernel block.
    """
    blocks: list[list[int]] = []
    for i in range(rank):
        if blocks and sv[blocks[-1][-1]] - sv[i] <= tol:
            blocks[-1].append(i)
        else:
            blocks.append([i])
    if rank < len(sv):
        blocks.append(list(range(rank, len(sv))))
    return blocks


def adapted_right_basis(m: Contraction, rho: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Right singular basis of ``m`` refined to diagonalise ``rho`` blockwise.

    Right singular vectors are only defined up to a unitary inside each
    degenerate singular-value subspace (the kernel included). Within every
    such subspace the basis is rotated so that the compression of ``rho`` is
    diagonal, with decreasing diagonal. When ``rho`` commutes with ``M^H M``
    this makes ``Y^H rho Y`` exactly diagonal.

    Returns:
        ``(sigma, Y)`` with ``sigma`` zeroed past the numerical rank.
    """
    sv = m.singular_values.copy()
    sv[m.rank:] = 0.0
    y = m.svd.right.copy()
    for block in degenerate_blocks(sv, m.rank):
        if len(block) < 2:
            continue
        b = y[:, block]
        c = matcore.dagger(b) @ rho @ b
        w, v = np.linalg.eigh((c + matcore.dagger(c)) / 2)
        y[:, block] = b @ v[:, ::-1]
    return sv, y

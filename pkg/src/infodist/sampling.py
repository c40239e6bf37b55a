"""Random instance generators. Every function takes an explicit ``Generator``."""

from __future__ import annotations

import numpy as np

from . import matcore
from .contraction import Contraction
from .ensembles import Ensemble
from .measurement import ObservableSpec, PureInstrument, observable_instrument


def ginibre(rng: np.random.Generator, rows: int, cols: int | None = None) -> np.ndarray:
    cols = rows if cols is None else cols
    return (rng.standard_normal((rows, cols)) + 1j * rng.standard_normal((rows, cols))) / np.sqrt(2)


def haar_unitary(rng: np.random.Generator, d: int) -> np.ndarray:
    q, r = np.linalg.qr(ginibre(rng, d))
    ph = np.diag(r) / np.abs(np.diag(r))
    return q * ph


def haar_states(rng: np.random.Generator, d: int, n: int) -> np.ndarray:
    v = ginibre(rng, n, d)
    return v / np.linalg.norm(v, axis=1, keepdims=True)


def random_matrix(rng: np.random.Generator, d: int, rank: int | None = None) -> np.ndarray:
    """Complex Gaussian matrix; with ``rank`` given, a low-rank product."""
    if rank is None or rank >= d:
        return ginibre(rng, d)
    return ginibre(rng, d, rank) @ ginibre(rng, rank, d)


def random_contraction(
    rng: np.random.Generator,
    d: int,
    rank: int | None = None,
    min_sigma: float = 0.05,
) -> Contraction:
    """``U diag(sigma) V^H`` with Haar ``U, V`` and ``sigma`` uniform in ``[min_sigma, 1]``."""
    sigma = np.sort(rng.uniform(min_sigma, 1.0, d))[::-1]
    if rank is not None:
        sigma[rank:] = 0.0
    return Contraction((haar_unitary(rng, d) * sigma) @ matcore.dagger(haar_unitary(rng, d)))


def random_priors(rng: np.random.Generator, n: int) -> np.ndarray:
    return rng.dirichlet(np.ones(n))


def random_ensemble(rng: np.random.Generator, d: int, n: int | None = None) -> Ensemble:
    n = int(rng.integers(1, 2 * d + 1)) if n is None else n
    return Ensemble(haar_states(rng, d, n), random_priors(rng, n))


def random_orthogonal_ensemble(rng: np.random.Generator, d: int, n: int | None = None) -> Ensemble:
    n = int(rng.integers(1, d + 1)) if n is None else n
    u = haar_unitary(rng, d)
    return Ensemble(u.T[:n], random_priors(rng, n))


def parallel_ensemble(rng: np.random.Generator, m: Contraction, n: int | None = None) -> Ensemble:
    """Ensemble drawn from the right singular vectors of ``m`` (parallel to it)."""
    d = m.dim
    n = int(rng.integers(1, d + 1)) if n is None else n
    cols = rng.choice(d, size=n, replace=False)
    phases = np.exp(2j * np.pi * rng.random(n))
    return Ensemble((m.svd.right[:, cols] * phases).T, random_priors(rng, n))


def random_instrument(rng: np.random.Generator, d: int, n_outcomes: int | None = None) -> PureInstrument:
    """``M_i = A_i T^{-1/2}`` with ``T = sum A_i^H A_i`` for Gaussian ``A_i``."""
    n = int(rng.integers(2, 5)) if n_outcomes is None else n_outcomes
    a = [ginibre(rng, d) for _ in range(n)]
    t = sum(matcore.dagger(x) @ x for x in a)
    w, v = np.linalg.eigh(t)
    t_inv_sqrt = (v / np.sqrt(w)) @ matcore.dagger(v)
    return PureInstrument(tuple(x @ t_inv_sqrt for x in a))


def random_channel(rng: np.random.Generator, n_outcomes: int, d: int) -> np.ndarray:
    """Column-stochastic ``p[y, x]`` with Dirichlet columns."""
    return rng.dirichlet(np.ones(n_outcomes), size=d).T


def diagonal_instrument(rng: np.random.Generator, basis: np.ndarray, n_outcomes: int | None = None) -> PureInstrument:
    """Instrument whose effects are all diagonal in ``basis``, with random back-actions."""
    d = basis.shape[0]
    n = int(rng.integers(2, 5)) if n_outcomes is None else n_outcomes
    spec = ObservableSpec(random_channel(rng, n, d), basis, tuple(haar_unitary(rng, d) for _ in range(n)))
    return observable_instrument(spec)


def random_unitary_instrument(rng: np.random.Generator, d: int, n_outcomes: int = 2) -> PureInstrument:
    """Random unitaries ``U_i`` weighted by ``sqrt(w_i)``: no information, minimal disturbance."""
    w = random_priors(rng, n_outcomes)
    return PureInstrument(tuple(np.sqrt(wi) * haar_unitary(rng, d) for wi in w))

"""Which-state hypothesis ensembles and their relation to a contraction."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from . import matcore
from .contraction import Contraction, adapted_right_basis, as_contraction
from .errors import InvalidInput

LAMBDA_TOL = 1e-12
PARALLEL_TOL = 1e-9
ROW_SUM_TOL = 1e-9


@dataclass(frozen=True)
class Ensemble:
    """Pure states ``states[j]`` (rows) with prior probabilities ``priors[j]``."""

    states: np.ndarray
    priors: np.ndarray

    def __post_init__(self):
        s = np.atleast_2d(np.asarray(self.states, dtype=complex))
        a = np.asarray(self.priors, dtype=float).ravel()
        if s.ndim != 2 or s.shape[0] == 0:
            raise InvalidInput("ensemble needs at least one state")
        if len(a) != s.shape[0]:
            raise InvalidInput(f"{s.shape[0]} states but {len(a)} priors")
        if not (np.all(np.isfinite(s)) and np.all(np.isfinite(a))):
            raise InvalidInput("ensemble has non-finite entries")
        norms = np.linalg.norm(s, axis=1)
        if np.any(np.abs(norms - 1.0) > 1e-9):
            raise InvalidInput("ensemble states must be unit vectors")
        if np.any(a < -1e-12) or abs(a.sum() - 1.0) > 1e-9:
            raise InvalidInput("priors must be non-negative and sum to one")
        a = np.clip(a, 0.0, None)
        s.setflags(write=False)
        a.setflags(write=False)
        object.__setattr__(self, "states", s)
        object.__setattr__(self, "priors", a)

    @property
    def dim(self) -> int:
        return self.states.shape[1]

    def __len__(self) -> int:
        return self.states.shape[0]

    def entropy(self) -> float:
        return matcore.shannon_entropy(self.priors)

    def with_priors(self, priors) -> Ensemble:
        return Ensemble(self.states, priors)

    def to_json(self) -> dict:
        return {
            "dim": self.dim,
            "states": [matcore.vector_to_json(s) for s in self.states],
            "priors": [float(x) for x in self.priors],
        }

    @classmethod
    def from_json(cls, data: dict) -> Ensemble:
        try:
            states = np.array([matcore.vector_from_json(s) for s in data["states"]])
            priors = data["priors"]
        except (KeyError, TypeError) as exc:
            raise InvalidInput(f"malformed ensemble: {exc}") from exc
        e = cls(states, priors)
        if "dim" in data and int(data["dim"]) != e.dim:
            raise InvalidInput(f"ensemble dim {data['dim']} does not match states ({e.dim})")
        return e


def density_operator(e: Ensemble) -> np.ndarray:
    return (e.states.T * e.priors) @ e.states.conj()


def basis_ensemble(d: int, priors=None) -> Ensemble:
    if priors is None:
        priors = np.full(d, 1.0 / d)
    return Ensemble(np.eye(d, dtype=complex), priors)


def conjugate_basis_ensemble(d: int) -> Ensemble:
    """Uniform ensemble of the Fourier-conjugate basis ``|y_k> = d^-1/2 sum_l e^{2 pi i k l/d} |x_l>``."""
    if d < 2:
        raise InvalidInput("conjugate basis needs d >= 2")
    k = np.arange(d)
    states = np.exp(2j * np.pi * np.outer(k, k) / d) / math.sqrt(d)
    return Ensemble(states, np.full(d, 1.0 / d))


def haar_random_state(d: int, seed=None) -> np.ndarray:
    """Haar-distributed unit vector; ``seed`` may be an int or a ``Generator``."""
    rng = np.random.default_rng(seed)
    v = rng.standard_normal(d) + 1j * rng.standard_normal(d)
    return v / np.linalg.norm(v)


@dataclass(frozen=True)
class Spectral:
    """Quantities of an (ensemble, contraction) pair in the adapted right basis.

    ``overlaps[j, i] = |<psi_j| Y |i>|^2``; ``lambdas[i] = <i| Y^H rho Y |i>``;
    ``support`` lists indices with ``lambda_i > 0`` and ``sigma_i > 0``.
    """

    sigma: np.ndarray
    right: np.ndarray
    lambdas: np.ndarray
    overlaps: np.ndarray
    support: np.ndarray


def spectral(e: Ensemble, m: Contraction) -> Spectral:
    m = as_contraction(m)
    if m.dim != e.dim:
        raise InvalidInput(f"ensemble dim {e.dim} != contraction dim {m.dim}")
    rho = density_operator(e)
    sigma, y = adapted_right_basis(m, rho)
    overlaps = np.abs(e.states.conj() @ y) ** 2
    lambdas = overlaps.T @ e.priors
    support = np.flatnonzero((lambdas > LAMBDA_TOL) & (sigma > 0))
    return Spectral(sigma, y, lambdas, overlaps, support)


def row_sums(e: Ensemble, sp: Spectral) -> np.ndarray:
    """``s_j = a_j <psi_j| Y zeta^+ Y^H |psi_j>`` restricted to the support."""
    idx = sp.support
    return e.priors * (sp.overlaps[:, idx] / sp.lambdas[idx]).sum(axis=1)


class Parallelism(enum.Enum):
    PARALLEL = "parallel"
    QUASI_PARALLEL = "quasi"
    NOT_QUASI_PARALLEL = "not_quasi"


@dataclass(frozen=True)
class ParallelismVerdict:
    kind: Parallelism
    row_sums: np.ndarray
    commutator_norm: float

    @property
    def quasi_parallel(self) -> bool:
        return self.kind is not Parallelism.NOT_QUASI_PARALLEL


def classify_parallelism(e: Ensemble, m) -> ParallelismVerdict:
    m = as_contraction(m)
    sp = spectral(e, m)
    s = row_sums(e, sp)
    comm = matcore.commutator_norm(density_operator(e), m.effect)
    if comm <= PARALLEL_TOL:
        kind = Parallelism.PARALLEL
    elif np.all(s <= 1.0 + ROW_SUM_TOL):
        kind = Parallelism.QUASI_PARALLEL
    else:
        kind = Parallelism.NOT_QUASI_PARALLEL
    return ParallelismVerdict(kind, s, comm)


def squash_counts(row_sums_: np.ndarray) -> np.ndarray:
    """Minimal uniform split: ``n_j = ceil(s_j)`` copies for each ``s_j > 1``."""
    n = np.ones(len(row_sums_), dtype=int)
    over = row_sums_ > 1.0 + ROW_SUM_TOL
    n[over] = np.ceil(row_sums_[over] - ROW_SUM_TOL).astype(int)
    return n


def expand(e: Ensemble, counts) -> Ensemble:
    """Replace state ``j`` by ``counts[j]`` identical copies of weight ``a_j / counts[j]``."""
    counts = np.asarray(counts, dtype=int)
    states = np.repeat(e.states, counts, axis=0)
    priors = np.repeat(e.priors / counts, counts)
    return Ensemble(states, priors)


def squash(e: Ensemble, m) -> Ensemble:
    """Squashed copy of ``e`` that is quasi-parallel to ``m``.

    An ensemble that is already quasi-parallel is returned unchanged (the
    same object), which callers can test with ``is``.
    """
    v = classify_parallelism(e, m)
    if v.quasi_parallel:
        return e
    return expand(e, squash_counts(v.row_sums))

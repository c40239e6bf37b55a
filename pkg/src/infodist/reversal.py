"""Knowingly reversible measurements and their optimal reversion."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from . import matcore
from .contraction import CONTRACTION_TOL, Contraction, as_contraction
from .ensembles import Ensemble
from .errors import InvalidInput, NotReversible, RankDeficient
from .measurement import information_gain, reduced_ensemble

MEMBERSHIP_TOL = 1e-9


class Reversibility(enum.Enum):
    FULL_RANK = "full_rank"
    ORTHOGONALLY_SPLIT = "orthogonally_split"
    DEGENERATE_SINGLETON = "degenerate_singleton"
    NOT_KNOWINGLY_REVERSIBLE = "not_knowingly_reversible"


@dataclass(frozen=True)
class ReversibilityVerdict:
    kind: Reversibility
    parallel_indices: tuple[int, ...]
    kernel_indices: tuple[int, ...]

    @property
    def reversible(self) -> bool:
        return self.kind in (Reversibility.FULL_RANK, Reversibility.ORTHOGONALLY_SPLIT)


def classify_reversibility(m, e: Ensemble) -> ReversibilityVerdict:
    """Decide whether ``m`` can be knowingly undone on the states of ``e``.

    A state counts as lying in a subspace when its distance to the subspace
    is at most 1e-9.
    """
    m = as_contraction(m)
    if m.dim != e.dim:
        raise InvalidInput(f"ensemble dim {e.dim} != contraction dim {m.dim}")
    everything = tuple(range(len(e)))
    if m.rank == m.dim:
        return ReversibilityVerdict(Reversibility.FULL_RANK, everything, ())
    p_rng = matcore.kernel_complement_projector(m.matrix, m.tol_rank).matrix
    inside = e.states @ p_rng.T
    dist_to_rng = np.linalg.norm(e.states - inside, axis=1)
    dist_to_ker = np.linalg.norm(inside, axis=1)
    in_ker = dist_to_ker <= MEMBERSHIP_TOL
    in_rng = dist_to_rng <= MEMBERSHIP_TOL
    ker = tuple(int(j) for j in np.flatnonzero(in_ker))
    par = tuple(int(j) for j in np.flatnonzero(in_rng & ~in_ker))
    if np.all(in_ker | in_rng):
        return ReversibilityVerdict(Reversibility.ORTHOGONALLY_SPLIT, par, ker)
    outside = tuple(int(j) for j in np.flatnonzero(~in_ker))
    if len(outside) == 1:
        return ReversibilityVerdict(Reversibility.DEGENERATE_SINGLETON, outside, ker)
    return ReversibilityVerdict(Reversibility.NOT_KNOWINGLY_REVERSIBLE, par, ker)


class PlanKind(enum.Enum):
    FULL_RANK_INVERSE = "full_rank_inverse"
    PSEUDO_INVERSE_SPLIT = "pseudo_inverse_split"


@dataclass(frozen=True)
class ReversionPlan:
    reverser: Contraction
    overall_scale_sq: float
    kind: PlanKind
    free_term_included: bool

    @property
    def scale(self) -> float:
        return math.sqrt(self.overall_scale_sq)


def optimal_reversion(m, z=None) -> ReversionPlan:
    """Most efficient reversion ``M~ = M^+ / ||M^+|| + Z (I - P_M)``.

    The proportionality constant of ``M~ M`` (equal to ``sigma_r(M)``, the
    smallest non-zero singular value) is real and positive. The optional
    free term ``Z`` acts only on the orthogonal complement of ``Rng(M)``;
    the combined operator must still be a contraction.
    """
    m = as_contraction(m)
    if m.rank == 0:
        raise InvalidInput("cannot reverse the zero operator")
    pinv = matcore.pseudoinverse(m.matrix, m.tol_rank)
    sigma_r = float(m.singular_values[m.rank - 1])
    rev = pinv * sigma_r
    free = z is not None
    if free:
        zm = matcore.as_matrix(z)
        comp = np.eye(m.dim) - matcore.range_projector(m.matrix, m.tol_rank).matrix
        extra = zm @ comp
        if np.linalg.norm(extra, 2) > 1.0 + CONTRACTION_TOL:
            raise InvalidInput("Z (I - P_M) is not a contraction")
        rev = rev + extra
        if np.linalg.norm(rev, 2) > 1.0 + CONTRACTION_TOL:
            raise InvalidInput("free term makes the reversion exceed unit norm")
    kind = PlanKind.FULL_RANK_INVERSE if m.rank == m.dim else PlanKind.PSEUDO_INVERSE_SPLIT
    return ReversionPlan(Contraction(rev, m.tol_rank), sigma_r**2, kind, free)


@dataclass(frozen=True)
class ReversionBounds:
    """Worst/best-case probability of reverting a full-rank contraction.

    ``output_achievers`` are the left singular vectors (post-measurement
    states) for ``sigma_1`` and ``sigma_d``; ``input_achievers`` are the
    input states that produce them (the matching right singular vectors).
    """

    lower: float
    upper: float
    output_achievers: tuple[np.ndarray, np.ndarray]
    input_achievers: tuple[np.ndarray, np.ndarray]


def reversion_probability_bounds(m) -> ReversionBounds:
    m = as_contraction(m)
    if m.rank < m.dim:
        raise RankDeficient(f"rank {m.rank} < dim {m.dim}")
    kappa = matcore.condition_number(m.matrix, m.tol_rank)
    f = m.svd
    return ReversionBounds(
        lower=kappa**-2,
        upper=1.0,
        output_achievers=(f.left[:, 0], f.left[:, -1]),
        input_achievers=(f.right[:, 0], f.right[:, -1]),
    )


def reversion_probability(m, psi, plan: ReversionPlan | None = None) -> float:
    """Probability that the reversion succeeds on the output of ``m`` for input ``psi``."""
    m = as_contraction(m)
    plan = plan or optimal_reversion(m)
    out = m.matrix @ np.asarray(psi, dtype=complex)
    out = out / np.linalg.norm(out)
    return float(np.linalg.norm(plan.reverser.matrix @ out) ** 2)


@dataclass(frozen=True)
class CascadeReversion:
    """``sigma_d^2 <= (prod sigma^2)^(1/d) <= ||M||_2^2 / d``."""

    probability: float
    geometric_mean: float
    hilbert_schmidt_bound: float
    tol: float = 1e-9

    @property
    def holds(self) -> bool:
        return (
            self.probability <= self.geometric_mean + self.tol
            and self.geometric_mean <= self.hilbert_schmidt_bound + self.tol
        )


def cascade_reversion_probability(m) -> CascadeReversion:
    m = as_contraction(m)
    if m.rank < m.dim:
        raise RankDeficient(f"rank {m.rank} < dim {m.dim}")
    s2 = m.singular_values**2
    geo = float(np.exp(np.mean(np.log(s2))))
    return CascadeReversion(float(s2[-1]), geo, float(s2.sum() / m.dim))


@dataclass(frozen=True)
class ErasureReport:
    verdict: Reversibility
    forward: float
    reversal: float
    total: float
    direct: float
    expected_direct: float
    tol: float = 1e-9

    @property
    def consistent(self) -> bool:
        return abs(self.total - self.direct) <= self.tol and abs(self.direct - self.expected_direct) <= self.tol

    def to_json(self) -> dict:
        return {
            "verdict": self.verdict.value,
            "forward_bits": self.forward,
            "reversal_bits": self.reversal,
            "sum_bits": self.total,
            "direct_bits": self.direct,
            "expected_direct_bits": self.expected_direct,
            "consistent": self.consistent,
        }


def verify_erasure(e: Ensemble, m) -> ErasureReport:
    """Information balance of measuring ``m`` and then reverting it.

    The reversal step is scored on the post-measurement ensemble (states
    ``psi_M`` with posterior priors); the direct figure applies the
    composite ``M~ M`` to ``e``. For a split ensemble the composite
    leaves only the renormalised restriction of ``e`` to ``Rng(M^H)``.
    """
    m = as_contraction(m)
    v = classify_reversibility(m, e)
    if not v.reversible:
        raise NotReversible(f"contraction is {v.kind.value} on this ensemble")
    plan = optimal_reversion(m)
    forward = information_gain(e, m)
    reversal = information_gain(reduced_ensemble(e, m), plan.reverser)
    composite = Contraction(plan.reverser.matrix @ m.matrix, m.tol_rank)
    direct = information_gain(e, composite)
    if v.kind is Reversibility.FULL_RANK:
        expected = 0.0
    else:
        restricted = np.zeros(len(e))
        idx = list(v.parallel_indices)
        restricted[idx] = e.priors[idx]
        expected = e.entropy() - matcore.shannon_entropy(restricted / restricted.sum())
    return ErasureReport(v.kind, forward, reversal, forward + reversal, direct, expected)


def input_independence_residual(m, psi) -> float:
    """``|p(M|psi) p(M~|psi_M) - sigma_d^2|`` for the optimal reversion."""
    m = as_contraction(m)
    plan = optimal_reversion(m)
    psi = np.asarray(psi, dtype=complex)
    p_fwd = float(np.linalg.norm(m.matrix @ psi) ** 2)
    return abs(p_fwd * reversion_probability(m, psi, plan) - plan.overall_scale_sq)


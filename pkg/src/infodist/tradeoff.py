"""Majorization relations and information-disturbance trade-offs.

The central object is the vector ``z_M`` with components
``lambda_i sigma_i^2(M) / p_E(M)``, where ``lambda_i`` is the weight of the
prior density operator on the i-th right singular vector of ``M``. Its
negative entropy is the disturbance, and for ensembles quasi-parallel to
``M`` the posterior is majorized by ``z_M``, which bounds the information
gained from the outcome.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import matcore
from .contraction import Contraction, as_contraction
from .ensembles import (
    Ensemble,
    Parallelism,
    classify_parallelism,
    density_operator,
    expand,
    row_sums,
    spectral,
    squash_counts,
)
from .errors import InvalidInput, InvalidInstrument, OutcomeImpossible, PreconditionViolated
from .measurement import IMPOSSIBLE_TOL, PureInstrument, information_gain, likelihoods, posterior

MAJOR_TOL = 1e-9


@dataclass(frozen=True)
class MajorizationVerdict:
    """Outcome of comparing two vectors by (weak) majorization.

    ``worst_partial_sum_gap`` is ``max_k (X_k - Y_k)`` over prefix sums of the
    descending-sorted, zero-padded vectors; non-positive means dominance.
    """

    holds: bool
    worst_partial_sum_gap: float
    padded_length: int
    total_gap: float = 0.0
    weak: bool = False

    def to_json(self) -> dict:
        return {
            "holds": self.holds,
            "worst_partial_sum_gap": self.worst_partial_sum_gap,
            "padded_length": self.padded_length,
            "total_gap": self.total_gap,
            "relation": "weak" if self.weak else "strong",
        }


def _prefix_gap(x, y) -> tuple[float, float, int]:
    x = np.asarray(x, dtype=float).ravel()
    y = np.asarray(y, dtype=float).ravel()
    if np.any(x < -1e-12) or np.any(y < -1e-12):
        raise InvalidInput("majorization needs non-negative vectors")
    n = max(len(x), len(y))
    xs = np.sort(np.pad(x, (0, n - len(x))))[::-1]
    ys = np.sort(np.pad(y, (0, n - len(y))))[::-1]
    diff = np.cumsum(xs) - np.cumsum(ys)
    return float(diff.max()), float(diff[-1]), n


def weak_majorizes(x, y, tol: float = MAJOR_TOL) -> MajorizationVerdict:
    """``x <_w y``: every prefix sum of sorted ``x`` is at most that of ``y``."""
    gap, total, n = _prefix_gap(x, y)
    return MajorizationVerdict(gap <= tol, gap, n, total, weak=True)


def majorizes(x, y, tol: float = MAJOR_TOL) -> MajorizationVerdict:
    """``x < y``: weak majorization plus equal totals."""
    gap, total, n = _prefix_gap(x, y)
    return MajorizationVerdict(gap <= tol and abs(total) <= tol, gap, n, total)


def joint_probability_vector(e: Ensemble, m) -> np.ndarray:
    """``a(M, psi_j) = a(psi_j) ||M psi_j||^2``."""
    return e.priors * likelihoods(e, m)


@dataclass(frozen=True)
class TradeoffVector:
    z: np.ndarray
    lambdas: np.ndarray
    sigma_sq: np.ndarray
    outcome_prob: float
    support_size: int


def z_vector(e: Ensemble, m) -> TradeoffVector:
    m = as_contraction(m)
    sp = spectral(e, m)
    p = float(joint_probability_vector(e, m).sum())
    if p <= IMPOSSIBLE_TOL:
        raise OutcomeImpossible(f"overall outcome probability {p:.3e}")
    s2 = sp.sigma**2
    z = np.zeros(m.dim)
    z[sp.support] = sp.lambdas[sp.support] * s2[sp.support] / p
    return TradeoffVector(z, sp.lambdas, s2, p, len(sp.support))


@dataclass(frozen=True)
class SMatrixBundle:
    """Stochastic expansion of the joint probabilities.

    ``S`` is ``|E| x r`` over the support, ``W`` the doubly sub-stochastic
    ``|E| x d`` matrix with ``a(M, psi) = W sigma^2``. ``augmented`` is the
    doubly stochastic completion, present only when every row sum is at
    most one.
    """

    S: np.ndarray
    row_sums: np.ndarray
    W: np.ndarray
    support: np.ndarray
    augmented: np.ndarray | None

    @property
    def quasi_parallel(self) -> bool:
        return self.augmented is not None


def s_matrix(e: Ensemble, m) -> SMatrixBundle:
    m = as_contraction(m)
    sp = spectral(e, m)
    idx = sp.support
    w = e.priors[:, None] * sp.overlaps
    s = w[:, idx] / sp.lambdas[idx]
    rs = row_sums(e, sp)
    aug = None
    if np.all(rs <= 1.0 + MAJOR_TOL):
        n, r = s.shape
        aug = np.block([
            [s, np.diag(1.0 - rs)],
            [np.zeros((r, r)), s.T],
        ])
    return SMatrixBundle(s, rs, w, idx, aug)


def verify_weak_majorization(e: Ensemble, m, tol: float = MAJOR_TOL) -> MajorizationVerdict:
    m = as_contraction(m)
    return weak_majorizes(joint_probability_vector(e, m), m.singular_values**2, tol)


def _require_quasi_parallel(e: Ensemble, m: Contraction):
    v = classify_parallelism(e, m)
    if not v.quasi_parallel:
        raise PreconditionViolated(
            f"ensemble is not quasi-parallel (max row sum {v.row_sums.max():.6f}); squash it first"
        )
    return v


def verify_majorization(e: Ensemble, m, tol: float = MAJOR_TOL) -> MajorizationVerdict:
    """Posterior ``a_M`` majorized by ``z_M``; needs a quasi-parallel ensemble."""
    m = as_contraction(m)
    _require_quasi_parallel(e, m)
    return majorizes(posterior(e, m).priors, z_vector(e, m).z, tol)


def disturbance(e: Ensemble, m) -> float:
    """``-H(z_M)`` in bits, always within ``[-log2 r(M), 0]``."""
    return -matcore.shannon_entropy(z_vector(e, m).z)


@dataclass(frozen=True)
class BoundReport:
    delta_I: float
    bound: float
    entropy_prior: float
    entropy_z: float

    @property
    def slack(self) -> float:
        return self.bound - self.delta_I


def tradeoff_bound(e: Ensemble, m) -> BoundReport:
    """``Delta I <= H(E) - H(z_M)`` for an ensemble quasi-parallel to ``m``."""
    m = as_contraction(m)
    _require_quasi_parallel(e, m)
    hz = matcore.shannon_entropy(z_vector(e, m).z)
    h = e.entropy()
    return BoundReport(information_gain(e, m), h - hz, h, hz)


@dataclass(frozen=True)
class SquashedReport:
    """Trade-off figures for a (possibly) non-quasi-parallel ensemble.

    ``correction`` is ``-sum_j [a_j - a_j|M] H(q_j)`` with ``q_j`` the uniform
    split of state ``j``; it has no definite sign and ``rhs`` is only
    reported. ``rigorous_bound`` replaces it by ``+sum_j a_j|M H(q_j)``, which
    follows from the squashed ensemble's own bound and always holds.
    """

    counts: np.ndarray
    squashed: Ensemble
    delta_I: float
    entropy_prior: float
    entropy_z: float
    correction: float
    rigorous_correction: float
    majorization: MajorizationVerdict

    @property
    def rhs(self) -> float:
        return self.entropy_prior - self.entropy_z + self.correction

    @property
    def rigorous_bound(self) -> float:
        return self.entropy_prior - self.entropy_z + self.rigorous_correction

    @property
    def correction_sign(self) -> int:
        if abs(self.correction) <= MAJOR_TOL:
            return 0
        return 1 if self.correction > 0 else -1


def squashed_tradeoff_report(e: Ensemble, m) -> SquashedReport:
    m = as_contraction(m)
    v = classify_parallelism(e, m)
    counts = squash_counts(v.row_sums) if not v.quasi_parallel else np.ones(len(e), dtype=int)
    sq = expand(e, counts)
    post = posterior(e, m).priors
    hq = np.log2(counts)
    hz = matcore.shannon_entropy(z_vector(e, m).z)
    return SquashedReport(
        counts=counts,
        squashed=sq,
        delta_I=information_gain(e, m),
        entropy_prior=e.entropy(),
        entropy_z=hz,
        correction=float(-np.sum((e.priors - post) * hq)),
        rigorous_correction=float(np.sum(post * hq)),
        majorization=majorizes(posterior(sq, m).priors, z_vector(sq, m).z),
    )


@dataclass
class OutcomeRecord:
    label: str
    probability: float
    delta_I: float
    entropy_z: float
    quasi_parallel: bool
    rigorous_correction: float = 0.0


@dataclass
class AveragedReport:
    """Outcome-averaged trade-off for a complete instrument.

    ``bound = H(E) - <H(z)>``. For orthogonal ensembles ``H(E) = S(rho)`` and
    the chain ``delta_I_avg <= S(rho) - <H(z)> <= chi`` applies. Outcomes
    whose ensemble is not quasi-parallel are listed in ``flagged``; for
    those only ``rigorous_bound`` is guaranteed.
    """

    delta_I_avg: float
    entropy_prior: float
    von_neumann: float
    chi: float
    mean_entropy_z: float
    orthogonal: bool
    outcomes: list[OutcomeRecord] = field(default_factory=list)

    @property
    def bound(self) -> float:
        return self.entropy_prior - self.mean_entropy_z

    @property
    def holevo_bound(self) -> float:
        return self.von_neumann - self.mean_entropy_z

    @property
    def rigorous_bound(self) -> float:
        return self.bound + sum(o.probability * o.rigorous_correction for o in self.outcomes)

    @property
    def flagged(self) -> list[str]:
        return [o.label for o in self.outcomes if not o.quasi_parallel]


def is_orthogonal(e: Ensemble, tol: float = 1e-9) -> bool:
    g = e.states.conj() @ e.states.T
    return bool(np.abs(g - np.eye(len(e))).max() <= tol)


def averaged_tradeoff(e: Ensemble, inst) -> AveragedReport:
    if not isinstance(inst, PureInstrument):
        try:
            inst = PureInstrument(tuple(inst))
        except (TypeError, InvalidInput) as exc:
            raise InvalidInstrument(str(exc)) from exc
    rho = density_operator(e)
    s_rho = matcore.von_neumann_entropy(rho)
    rep = AveragedReport(0.0, e.entropy(), s_rho, s_rho, 0.0, is_orthogonal(e))
    for label, m in zip(inst.labels, inst.outcomes):
        p = float(joint_probability_vector(e, m).sum())
        if p <= IMPOSSIBLE_TOL:
            continue
        sq = squashed_tradeoff_report(e, m)
        quasi = bool(np.all(sq.counts == 1))
        rec = OutcomeRecord(label, p, sq.delta_I, sq.entropy_z, quasi, sq.rigorous_correction)
        rep.outcomes.append(rec)
        rep.delta_I_avg += p * rec.delta_I
        rep.mean_entropy_z += p * rec.entropy_z
    return rep


def unitary_correlation(m) -> float:
    """Closed-form input-output unitary correlation ``(||M||_1^2 + ||M||_2^2) / (d(d+1))``."""
    m = as_contraction(m)
    d = m.dim
    return (matcore.shatten_norm(m.matrix, 1) ** 2 + matcore.shatten_norm(m.matrix, 2) ** 2) / (d * (d + 1))


@dataclass(frozen=True)
class MonteCarloEstimate:
    mean: float
    stderr: float
    n_samples: int

    def agrees_with(self, value: float, n_sigma: float = 4.0) -> bool:
        return abs(self.mean - value) <= n_sigma * self.stderr + 1e-12


def monte_carlo_unitary_correlation(m, n_samples: int = 100_000, seed=None) -> MonteCarloEstimate:
    """Haar average of ``|<psi| V^H M |psi>|^2`` with ``V`` the polar unitary of ``M``."""
    m = as_contraction(m)
    if n_samples < 1000:
        raise InvalidInput("need at least 1000 samples")
    rng = np.random.default_rng(seed)
    d = m.dim
    f = m.svd
    v = f.left @ matcore.dagger(f.right)
    a = matcore.dagger(v) @ m.matrix
    psi = rng.standard_normal((n_samples, d)) + 1j * rng.standard_normal((n_samples, d))
    psi /= np.linalg.norm(psi, axis=1, keepdims=True)
    vals = np.abs(np.sum(psi.conj() * (psi @ a.T), axis=1)) ** 2
    return MonteCarloEstimate(float(vals.mean()), float(vals.std(ddof=1) / math.sqrt(n_samples)), n_samples)


def partial_trace_second(psi_mat: np.ndarray) -> np.ndarray:
    """Reduced state on the first factor of ``sum_ak psi[a, k] |a>|k>``."""
    return psi_mat @ matcore.dagger(psi_mat)


def purification(rho: np.ndarray) -> np.ndarray:
    """Standard purification ``sum_k sqrt(e_k) |e_k>|k>`` as a ``d x d`` coefficient matrix."""
    w, v = np.linalg.eigh(rho)
    return v * np.sqrt(np.clip(w, 0.0, None))


def eigen_ensemble(rho) -> Ensemble:
    w, v = np.linalg.eigh(np.asarray(rho, dtype=complex))
    w = np.clip(w, 0.0, None)
    return Ensemble(v.T, w / w.sum())


@dataclass(frozen=True)
class EntanglementReport:
    disturbance: float
    reduced_entropy: float
    entanglement_after: float
    entanglement_before: float

    @property
    def max_discrepancy(self) -> float:
        vals = (self.disturbance, -self.reduced_entropy, -self.entanglement_after)
        return max(vals) - min(vals)


def entanglement_reduction_check(m, rho) -> EntanglementReport:
    """Compare ``-H(z_M)``, ``-S(M rho M^H / Tr)`` and the entropy of entanglement after ``M (x) I``.

    Only meaningful for ``rho`` commuting with ``M^H M``.
    """
    m = as_contraction(m)
    rho = matcore.as_matrix(rho)
    comm = matcore.commutator_norm(rho, m.effect)
    if comm > 1e-9:
        raise PreconditionViolated(f"[rho, M^H M] has norm {comm:.3e}")
    e = eigen_ensemble(rho)
    dist = disturbance(e, m)
    out = m.matrix @ rho @ matcore.dagger(m.matrix)
    out /= np.real(np.trace(out))
    psi = m.matrix @ purification(rho)
    psi /= np.linalg.norm(psi)
    return EntanglementReport(
        disturbance=dist,
        reduced_entropy=matcore.von_neumann_entropy(out),
        entanglement_after=matcore.von_neumann_entropy(partial_trace_second(psi)),
        entanglement_before=matcore.von_neumann_entropy(rho),
    )


def chaotic_disturbance(m) -> float:
    """Disturbance for the maximally chaotic ensemble, straight from the singular values."""
    m = as_contraction(m)
    s2 = m.singular_values**2
    total = s2.sum()
    if m.rank == 0:
        raise InvalidInput("zero contraction has no disturbance")
    w = s2[s2 > 0] / total
    return float(np.sum(w * np.log2(w)))


def ozawa_disturbance(m) -> float:
    m = as_contraction(m)
    if m.rank == 0:
        raise InvalidInput("zero contraction has no disturbance")
    return -math.log2(m.rank)


def tradeoff_report(e: Ensemble, m, label: str = "0") -> dict:
    """JSON-ready summary of every trade-off quantity for one outcome."""
    m = as_contraction(m)
    v = classify_parallelism(e, m)
    tv = z_vector(e, m)
    weak = verify_weak_majorization(e, m)
    sq = squashed_tradeoff_report(e, m)
    if v.quasi_parallel:
        kind = "parallel" if v.kind is Parallelism.PARALLEL else "quasi"
        bound = sq.entropy_prior - sq.entropy_z
    else:
        kind = "squashed"
        bound = sq.rhs
    out = {
        "outcome": label,
        "probability": tv.outcome_prob,
        "delta_I_bits": sq.delta_I,
        "z": [float(x) for x in tv.z],
        "disturbance_bits": -sq.entropy_z,
        "bound_bits": bound,
        "slack": bound - sq.delta_I,
        "majorization": {"weak": weak.to_json(), "strong": sq.majorization.to_json()},
        "parallelism": kind,
        "row_sums": [float(x) for x in v.row_sums],
    }
    if kind == "squashed":
        out["squash"] = {
            "copies": [int(c) for c in sq.counts],
            "correction_bits": sq.correction,
            "correction_sign": sq.correction_sign,
            "rigorous_bound_bits": sq.rigorous_bound,
        }
    return out

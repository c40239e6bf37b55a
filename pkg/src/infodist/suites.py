"""Randomized verification suites for every identity and inequality.

Each suite draws its own instances from a seeded generator and records
checks as *slacks*: a check passes when ``slack >= -tol``. Identities record
``-residual``; inequalities ``a <= b`` record ``b - a``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from . import matcore, sampling
from .contraction import Contraction
from .ensembles import (
    Ensemble,
    basis_ensemble,
    classify_parallelism,
    conjugate_basis_ensemble,
    expand,
    squash_counts,
)
from .measurement import (
    ObservableSpec,
    bhattacharyya_overlap,
    cascade,
    information_gain,
    observable_instrument,
)
from .reversal import (
    cascade_reversion_probability,
    optimal_reversion,
    verify_erasure,
)
from .tradeoff import (
    averaged_tradeoff,
    chaotic_disturbance,
    disturbance,
    entanglement_reduction_check,
    joint_probability_vector,
    monte_carlo_unitary_correlation,
    ozawa_disturbance,
    squashed_tradeoff_report,
    tradeoff_bound,
    unitary_correlation,
    verify_majorization,
    verify_weak_majorization,
)


@dataclass
class CheckStats:
    count: int = 0
    violations: int = 0
    worst_slack: float = math.inf


@dataclass
class SuiteResult:
    name: str
    tol: float
    checks: dict[str, CheckStats] = field(default_factory=dict)
    failure: dict | None = None
    notes: dict = field(default_factory=dict)

    def record(self, check: str, slack: float, instance: Callable[[], dict] | None = None, tol: float | None = None):
        tol = self.tol if tol is None else tol
        st = self.checks.setdefault(check, CheckStats())
        st.count += 1
        slack = float(slack)
        if slack < st.worst_slack:
            st.worst_slack = slack
        if not slack >= -tol:
            st.violations += 1
            if self.failure is None:
                self.failure = {"check": check, "slack": slack, "tol": tol}
                if instance is not None:
                    self.failure["instance"] = instance()

    @property
    def violations(self) -> int:
        return sum(c.violations for c in self.checks.values())

    @property
    def passed(self) -> bool:
        return self.violations == 0

    def to_json(self) -> dict:
        return {
            "suite": self.name,
            "tol": self.tol,
            "passed": self.passed,
            "violations": self.violations,
            "checks": {
                k: {"count": v.count, "violations": v.violations, "worst_slack": v.worst_slack}
                for k, v in sorted(self.checks.items())
            },
            "failure": self.failure,
            "notes": self.notes,
        }


def _pair(e: Ensemble, m: Contraction) -> Callable[[], dict]:
    return lambda: {"ensemble": e.to_json(), "contraction": matcore.matrix_to_json(m.matrix)}


def _relative(lhs: np.ndarray, rhs: np.ndarray) -> float:
    return float(np.linalg.norm(lhs - rhs) / max(1.0, np.linalg.norm(rhs)))


def _possible(e: Ensemble, m) -> bool:
    return float(joint_probability_vector(e, m).sum()) > 1e-12


def _record_disturbance(res: SuiteResult, e: Ensemble, m: Contraction):
    d = disturbance(e, m)
    res.record("disturbance_upper", -d, _pair(e, m))
    res.record("disturbance_lower", d + math.log2(m.rank), _pair(e, m))


def moore_penrose(
    seed: int, trials: int = 1000, max_dim: int = 8, tol: float = 1e-9, tol_rank: float = matcore.RANK_TOL
) -> SuiteResult:
    """Pseudoinverse identities and SVD reconstruction (relative to the matrix scale)."""
    rng = np.random.default_rng(seed)
    res = SuiteResult("moore_penrose", tol)
    for _ in range(trials):
        rows = int(rng.integers(1, max_dim + 1))
        cols = rows if rng.random() < 0.5 else int(rng.integers(1, max_dim + 1))
        k = min(rows, cols)
        rank = int(rng.integers(1, k + 1)) if rng.random() < 0.5 else k
        a = sampling.ginibre(rng, rows, rank) @ sampling.ginibre(rng, rank, cols)
        inst = lambda a=a: {"matrix": matcore.matrix_to_json(a)}
        ap = matcore.pseudoinverse(a, tol_rank)
        res.record("a_ap_a", -_relative(a @ ap @ a, a), inst)
        res.record("ap_a_ap", -_relative(ap @ a @ ap, ap), inst)
        res.record("ap_a_hermitian", -_relative(matcore.dagger(ap @ a), ap @ a), inst)
        res.record("a_ap_hermitian", -_relative(matcore.dagger(a @ ap), a @ ap), inst)
        f = matcore.svd(a, tol_rank)
        res.record("svd_reconstruction", -_relative(f.reconstruct(), a), inst)
        res.record("svd_rank", -abs(f.rank - rank), inst, tol=0)
        res.record("left_unitary", -np.linalg.norm(matcore.dagger(f.left) @ f.left - np.eye(rows)), inst)
        res.record("right_unitary", -np.linalg.norm(matcore.dagger(f.right) @ f.right - np.eye(cols)), inst)
        n1, n2, ninf = (matcore.shatten_norm(a, p) for p in (1, 2, np.inf))
        res.record("norm_order", min(n2 - ninf, n1 - n2) / max(1.0, n1), inst)
    return res


def weak_majorization(seed: int, trials: int = 2000, max_dim: int = 6, tol: float = 1e-9) -> SuiteResult:
    """Joint probabilities are weakly majorized by the squared singular values, for any pair."""
    rng = np.random.default_rng(seed)
    res = SuiteResult("weak_majorization", tol)
    for _ in range(trials):
        d = int(rng.integers(2, max_dim + 1))
        rank = int(rng.integers(1, d + 1)) if rng.random() < 0.3 else None
        m = sampling.random_contraction(rng, d, rank)
        e = sampling.random_ensemble(rng, d)
        v = verify_weak_majorization(e, m)
        res.record("majw", -v.worst_partial_sum_gap, _pair(e, m))
        if _possible(e, m):
            _record_disturbance(res, e, m)
    return res


def _quasi_parallel_pair(rng, d: int, path: str) -> tuple[Ensemble, Contraction]:
    rank = int(rng.integers(1, d + 1)) if rng.random() < 0.3 else None
    m = sampling.random_contraction(rng, d, rank)
    if path == "parallel":
        return sampling.parallel_ensemble(rng, m), m
    e = sampling.random_ensemble(rng, d)
    v = classify_parallelism(e, m)
    if v.quasi_parallel:
        return e, m
    return expand(e, squash_counts(v.row_sums)), m


def majorization_tradeoff(seed: int, trials: int = 2000, max_dim: int = 6, tol: float = 1e-9) -> SuiteResult:
    """Posterior majorized by z_M and the single-outcome bound, on quasi-parallel pairs.

    Half of the pairs are parallel by construction (states on right singular
    vectors), half are random pairs squashed into quasi-parallel form.
    """
    rng = np.random.default_rng(seed)
    res = SuiteResult("majorization_tradeoff", tol)
    survey = {"non_quasi_pairs": 0, "uniform_split_rhs_negative_slack": 0, "correction_negative": 0}
    for t in range(trials):
        d = int(rng.integers(2, max_dim + 1))
        path = "parallel" if t % 2 == 0 else "squashed"
        e, m = _quasi_parallel_pair(rng, d, path)
        if not _possible(e, m):
            continue
        v = verify_majorization(e, m)
        res.record("majz", -max(v.worst_partial_sum_gap, abs(v.total_gap)), _pair(e, m))
        b = tradeoff_bound(e, m)
        res.record("Iz_slack", b.slack, _pair(e, m))
        # entropy is Schur-concave: the majorized side has the larger entropy
        res.record("schur_consistency", b.entropy_prior - b.delta_I - b.entropy_z, _pair(e, m))
        _record_disturbance(res, e, m)
        # survey of the un-squashed correction term on fully random pairs
        e2 = sampling.random_ensemble(rng, d)
        if _possible(e2, m):
            sq = squashed_tradeoff_report(e2, m)
            if np.any(sq.counts > 1):
                survey["non_quasi_pairs"] += 1
                survey["uniform_split_rhs_negative_slack"] += int(sq.rhs - sq.delta_I < -tol)
                survey["correction_negative"] += int(sq.correction_sign < 0)
                res.record("squashed_majz", -sq.majorization.worst_partial_sum_gap, _pair(e2, m))
                res.record("squashed_rigorous_bound", sq.rigorous_bound - sq.delta_I, _pair(e2, m))
    res.notes["survey"] = survey
    return res


def holevo_chain(seed: int, trials: int = 500, max_dim: int = 5, tol: float = 1e-8) -> SuiteResult:
    """Averaged bound chain on orthogonal ensembles with complete instruments.

    Instances rotate through three constructions whose outcomes are all
    quasi-parallel: chaotic basis ensemble with a Gaussian instrument;
    random-prior orthonormal ensemble with an instrument diagonal in the same
    basis; any orthonormal ensemble with a random-unitary instrument.
    """
    rng = np.random.default_rng(seed)
    res = SuiteResult("holevo_chain", tol)
    for t in range(trials):
        d = int(rng.integers(2, max_dim + 1))
        u = sampling.haar_unitary(rng, d)
        kind = t % 3
        if kind == 0:
            e = Ensemble(u.T, np.full(d, 1.0 / d))
            inst = sampling.random_instrument(rng, d)
        elif kind == 1:
            n = int(rng.integers(1, d + 1))
            e = Ensemble(u.T[:n], sampling.random_priors(rng, n))
            inst = sampling.diagonal_instrument(rng, u)
        else:
            n = int(rng.integers(1, d + 1))
            e = Ensemble(u.T[:n], sampling.random_priors(rng, n))
            inst = sampling.random_unitary_instrument(rng, d, int(rng.integers(1, 4)))
        rep = averaged_tradeoff(e, inst)
        inst_json = lambda e=e, inst=inst: {"ensemble": e.to_json(), "instrument": inst.to_json()}
        res.record("all_outcomes_quasi_parallel", -len(rep.flagged), inst_json, tol=0)
        res.record("info_le_holevo_bound", rep.holevo_bound - rep.delta_I_avg, inst_json)
        res.record("holevo_bound_le_chi", rep.chi - rep.holevo_bound, inst_json)
        res.record("info_nonnegative", rep.delta_I_avg, inst_json)
        res.record("entropy_equals_S", -abs(rep.entropy_prior - rep.von_neumann), inst_json)
        if kind == 2:
            res.record("random_unitary_zero_info", -abs(rep.delta_I_avg), inst_json)
        for m in inst.outcomes:
            if _possible(e, m):
                _record_disturbance(res, e, m)
    return res


def reversal(seed: int, trials: int = 100, max_dim: int = 6, states: int = 100, tol: float = 1e-9) -> SuiteResult:
    """Input independence, the bound chain and information erasure."""
    rng = np.random.default_rng(seed)
    res = SuiteResult("reversal", tol)
    for _ in range(trials):
        d = int(rng.integers(2, max_dim + 1))
        m = sampling.random_contraction(rng, d, min_sigma=0.1)
        plan = optimal_reversion(m)
        inst = lambda m=m: {"contraction": matcore.matrix_to_json(m.matrix)}
        psi = sampling.haar_states(rng, d, states)
        out = psi @ m.matrix.T
        p_fwd = np.sum(np.abs(out) ** 2, axis=1)
        back = (out / np.sqrt(p_fwd)[:, None]) @ plan.reverser.matrix.T
        p_rev = np.sum(np.abs(back) ** 2, axis=1)
        for r in np.abs(p_fwd * p_rev - m.singular_values[-1] ** 2):
            res.record("input_independence", -r, inst)
        res.record("reverser_saturated", -abs(np.linalg.norm(plan.reverser.matrix, 2) - 1.0), inst)
        c = cascade_reversion_probability(m)
        res.record("sigma_le_geomean", c.geometric_mean - c.probability, inst)
        res.record("geomean_le_hs", c.hilbert_schmidt_bound - c.geometric_mean, inst)
        e = sampling.random_ensemble(rng, d)
        rep = verify_erasure(e, m)
        res.record("cancellation", -abs(rep.total - rep.direct), _pair(e, m))
        res.record("full_rank_erasure", -abs(rep.direct), _pair(e, m))
        # split instance: uniform ensemble with states in Rng(M^H) and Ker(M)
        r = int(rng.integers(1, d))
        ms = sampling.random_contraction(rng, d, rank=r, min_sigma=0.1)
        y = ms.svd.right
        n_par = int(rng.integers(1, 4))
        n_ker = int(rng.integers(1, 4))
        par = sampling.haar_states(rng, r, n_par) @ y[:, :r].T
        ker = sampling.haar_states(rng, d - r, n_ker) @ y[:, r:].T
        es = Ensemble(np.vstack([par, ker]), np.full(n_par + n_ker, 1.0 / (n_par + n_ker)))
        rep = verify_erasure(es, ms)
        res.record("split_cancellation", -abs(rep.total - rep.direct), _pair(es, ms))
        res.record("split_erasure", -abs(rep.direct - math.log2((n_par + n_ker) / n_par)), _pair(es, ms))
    return res


def unitary_correlation_oracle(
    seed: int, trials: int = 20, dims=(2, 3, 4), n_samples: int = 100_000, tol: float = 1e-9
) -> SuiteResult:
    """Closed-form C(M) against the Haar Monte-Carlo estimate (4 standard errors)."""
    rng = np.random.default_rng(seed)
    res = SuiteResult("unitary_correlation", tol)
    for t in range(trials):
        d = int(dims[t % len(dims)])
        rank = int(rng.integers(1, d + 1))
        m = sampling.random_contraction(rng, d, rank)
        inst = lambda m=m: {"contraction": matcore.matrix_to_json(m.matrix)}
        c = unitary_correlation(m)
        est = monte_carlo_unitary_correlation(m, n_samples, int(rng.integers(2**63)))
        res.record("monte_carlo_4se", 4 * est.stderr - abs(est.mean - c), inst, tol=0)
        res.record("range", min(c, 1 - c), inst)
        cn = unitary_correlation(Contraction(m.matrix / m.singular_values[0]))
        res.record("saturated_range", min(cn - 2 / (d * (d + 1)), 1 - cn), inst)
        uni = Contraction(sampling.haar_unitary(rng, d))
        res.record("unitary_endpoint", -abs(unitary_correlation(uni) - 1.0))
        v = sampling.haar_states(rng, d, 2)
        r1 = Contraction(np.outer(v[0], v[1].conj()))
        res.record("rank_one_endpoint", -abs(unitary_correlation(r1) - 2 / (d * (d + 1))))
    return res


def entanglement_identity(seed: int, trials: int = 200, max_dim: int = 6, tol: float = 1e-8) -> SuiteResult:
    """Disturbance equals the entanglement reduction for parallel pairs.

    Every third instance has a degenerate singular value with a density
    operator that is block diagonal but not diagonal in the computed basis.
    """
    rng = np.random.default_rng(seed)
    res = SuiteResult("entanglement_identity", tol)
    for t in range(trials):
        d = int(rng.integers(2, max_dim + 1))
        u = sampling.haar_unitary(rng, d)
        v = sampling.haar_unitary(rng, d)
        sigma = np.sort(rng.uniform(0.05, 1.0, d))[::-1]
        if rng.random() < 0.2:
            sigma[int(rng.integers(1, d)):] = 0.0
        lam = sampling.random_priors(rng, d)
        rho_y = np.diag(lam).astype(complex)
        if t % 3 == 0:
            sigma[1] = sigma[0]
            blk = sampling.ginibre(rng, 2)
            blk = blk @ matcore.dagger(blk)
            rho_y[:2, :2] = blk / np.trace(blk).real * lam[:2].sum()
        m = Contraction((u * sigma) @ matcore.dagger(v))
        rho = v @ rho_y @ matcore.dagger(v)
        rho = (rho + matcore.dagger(rho)) / 2
        inst = lambda m=m, rho=rho: {"contraction": matcore.matrix_to_json(m.matrix), "rho": matcore.matrix_to_json(rho)}
        if np.real(np.trace(rho @ m.effect)) <= 1e-12:
            continue
        rep = entanglement_reduction_check(m, rho)
        res.record("three_way_equality", -rep.max_discrepancy, inst)
    return res


def observables(seed: int, trials: int = 500, max_dim: int = 5, tol: float = 1e-9) -> SuiteResult:
    """Average reversion probability versus the Bhattacharyya overlap."""
    rng = np.random.default_rng(seed)
    res = SuiteResult("observables", tol)
    for _ in range(trials):
        d = int(rng.integers(2, max_dim + 1))
        n = int(rng.integers(2, 5))
        p = sampling.random_channel(rng, n, d)
        if rng.random() < 0.2:
            p[:, int(rng.integers(d))] = np.eye(n)[int(rng.integers(n))]
        spec = ObservableSpec(p, sampling.haar_unitary(rng, d), tuple(sampling.haar_unitary(rng, d) for _ in range(n)))
        inst = observable_instrument(spec)
        total = sum(o.singular_values[-1] ** 2 for o in inst.outcomes)
        b = bhattacharyya_overlap(spec)
        spec_json = lambda spec=spec: {"spec": spec.to_json()}
        res.record("avg_reversion_le_B", b - total, spec_json)
        res.record("B_in_unit_interval", min(b, 1 - b), spec_json)
        for y, o in enumerate(inst.outcomes):
            a = matcore.dagger(spec.backaction(y)) @ o.matrix
            projs = (np.outer(spec.basis[:, x], spec.basis[:, x].conj()) for x in range(d))
            comm = max(matcore.commutator_norm(a, pr) for pr in projs)
            res.record("backaction_diagonal", -comm, spec_json)
    return res


def cascades(seed: int, trials: int = 1000, steps: int = 50, tol: float = 1e-9) -> SuiteResult:
    """Repeated p=0.9 measurements: concentration, reversion decay and compensation."""
    rng = np.random.default_rng(seed)
    res = SuiteResult("cascades", tol)
    spec = ObservableSpec([[0.9, 0.1], [0.1, 0.9]])
    concentrated = 0
    for _ in range(trials):
        tr = cascade(spec, 0, steps, compensate=False, seed=int(rng.integers(2**63)))
        last = tr.steps[-1]
        concentrated += last.posterior[0] >= 0.999
        res.record("sigma_min_sq_below_1e-10", 1e-10 - last.sigma_min_sq, tol=0)
        k0 = sum(1 for s in tr.steps if s.outcome == 0)
        oracle = 1.0 / (1.0 + 9.0 ** -(2 * k0 - steps))
        res.record("posterior_oracle", -abs(last.posterior[0] - oracle))
        # compensated cascade with random back-actions on a random basis
        d = int(rng.integers(2, 5))
        n = int(rng.integers(2, 4))
        p = sampling.random_channel(rng, n, d)
        cspec = ObservableSpec(p, sampling.haar_unitary(rng, d), tuple(sampling.haar_unitary(rng, d) for _ in range(n)))
        ctr = cascade(cspec, int(rng.integers(d)), 10, compensate=True, seed=int(rng.integers(2**63)))
        res.record("compensated_fidelity", -max(abs(1 - s.fidelity) for s in ctr.steps))
    frac = concentrated / trials
    res.notes["concentration_fraction"] = frac
    res.record("concentration_probability", frac - 0.99, tol=0)
    return res


def conjugate_zero_information(seed: int, trials: int = 100, dims=(2, 3, 4, 5), tol: float = 1e-9) -> SuiteResult:
    """Conjugate-basis ensembles gain nothing from any observable on the X basis."""
    rng = np.random.default_rng(seed)
    res = SuiteResult("conjugate_zero_information", tol)
    for t in range(trials):
        d = int(dims[t % len(dims)])
        e = conjugate_basis_ensemble(d)
        n = int(rng.integers(2, 5))
        spec = ObservableSpec(sampling.random_channel(rng, n, d), None, tuple(sampling.haar_unitary(rng, d) for _ in range(n)))
        for m in observable_instrument(spec).outcomes:
            res.record("zero_information", -abs(information_gain(e, m)), _pair(e, m))
    return res


def disturbance_bounds(seed: int, trials: int = 500, max_dim: int = 6, tol: float = 1e-9) -> SuiteResult:
    """Range of the disturbance and its comparison with the rank-based value."""
    rng = np.random.default_rng(seed)
    res = SuiteResult("disturbance_bounds", tol)
    for _ in range(trials):
        d = int(rng.integers(2, max_dim + 1))
        rank = int(rng.integers(1, d + 1))
        m = sampling.random_contraction(rng, d, rank)
        inst = lambda m=m: {"contraction": matcore.matrix_to_json(m.matrix)}
        cd = chaotic_disturbance(m)
        res.record("chaotic_matches_ensemble", -abs(cd - disturbance(basis_ensemble(d), m)), inst)
        res.record("chaotic_ge_ozawa", cd - ozawa_disturbance(m), inst)
        s2 = m.singular_values[: m.rank] ** 2
        if s2[0] > s2[-1] * (1 + 1e-6):
            # equality only for flat profiles
            res.record("strict_unless_flat", cd - ozawa_disturbance(m) - 1e-15, inst, tol=0)
        res.record("chaotic_le_zero", -cd, inst)
        for e in (sampling.random_ensemble(rng, d), sampling.parallel_ensemble(rng, m)):
            if _possible(e, m):
                _record_disturbance(res, e, m)
        # flat singular values attain the rank-based value exactly
        u, v = sampling.haar_unitary(rng, d), sampling.haar_unitary(rng, d)
        flat = np.zeros(d)
        flat[:rank] = rng.uniform(0.1, 1.0)
        mf = Contraction((u * flat) @ matcore.dagger(v))
        res.record("flat_equality", -abs(chaotic_disturbance(mf) + math.log2(rank)))
        # sigma_i^2 proportional to 1/lambda_i attains the minimum on a parallel ensemble
        lam = sampling.random_priors(rng, d)
        s2 = lam.min() / lam
        mm = Contraction((u * np.sqrt(s2)) @ matcore.dagger(v))
        em = Ensemble(v.T, lam)
        res.record("minimum_attained", -abs(disturbance(em, mm) + math.log2(d)))
    return res


SUITES: dict[str, Callable[..., SuiteResult]] = {
    "moore_penrose": moore_penrose,
    "weak_majorization": weak_majorization,
    "majorization_tradeoff": majorization_tradeoff,
    "holevo_chain": holevo_chain,
    "reversal": reversal,
    "unitary_correlation": unitary_correlation_oracle,
    "entanglement_identity": entanglement_identity,
    "observables": observables,
    "cascades": cascades,
    "conjugate_zero_information": conjugate_zero_information,
    "disturbance_bounds": disturbance_bounds,
}


def run_all(
    seed: int,
    trials: int,
    dim: int,
    tol: float | None = None,
    overrides: dict[str, float] | None = None,
    only: list[str] | None = None,
    tol_rank: float = matcore.RANK_TOL,
) -> list[SuiteResult]:
    """Run every suite with ``trials`` instances each (Monte-Carlo suites capped) up to dimension ``dim``.

    ``tol`` replaces every suite's default tolerance; ``overrides`` sets it per
    suite. ``only`` restricts the run to the named suites without changing
    their seeds, so a subset reproduces the corresponding part of a full run.
    """
    overrides = overrides or {}
    dim = max(2, dim)
    out = []
    for i, (name, fn) in enumerate(SUITES.items()):
        if only is not None and name not in only:
            continue
        s = seed + 1009 * i
        kw: dict = {}
        t = overrides.get(name, tol)
        if t is not None:
            kw["tol"] = t
        if name == "unitary_correlation":
            kw.update(trials=min(trials, 20), dims=tuple(range(2, min(dim, 4) + 1)))
        elif name == "cascades":
            kw.update(trials=max(trials, 100))
        elif name == "conjugate_zero_information":
            kw.update(trials=trials, dims=tuple(range(2, dim + 1)))
        else:
            kw.update(trials=trials, max_dim=dim)
        if name == "moore_penrose":
            kw["tol_rank"] = tol_rank
        out.append(fn(s, **kw))
    return out

"""Acceptance criteria, one test per criterion.

Each test prints a single ``ACCEPTANCE <n> PASS|FAIL`` line (shown even when
pytest captures output). Run directly with ``python tests/test_acceptance.py``
or through pytest.
"""

import subprocess
import sys
import time

import numpy as np
import pytest

from infodist import suites
from infodist.ensembles import basis_ensemble, conjugate_basis_ensemble
from infodist.measurement import ObservableSpec, bhattacharyya_overlap, min_reversion_probabilities, observable_instrument
from infodist.tradeoff import averaged_tradeoff, tradeoff_bound, unitary_correlation

SEED = 20050101


@pytest.fixture
def report(capsys):
    def emit(n, ok, detail):
        with capsys.disabled():
            print(f"\nACCEPTANCE {n:>2} {'PASS' if ok else 'FAIL'}  {detail}")
        assert ok, detail

    return emit


def timed(fn, *args, **kw):
    t0 = time.perf_counter()
    res = fn(*args, **kw)
    return res, time.perf_counter() - t0


def worst(res, *checks):
    names = checks or tuple(res.checks)
    return min(res.checks[c].worst_slack for c in names)


def summary(res, elapsed=None):
    s = f"{res.name}: {sum(c.count for c in res.checks.values())} checks, {res.violations} violations, worst slack {worst(res):.2e}"
    return s if elapsed is None else f"{s}, {elapsed:.1f} s"


def test_criterion_01_moore_penrose(report):
    res, dt = timed(suites.moore_penrose, SEED, trials=1000, max_dim=8, tol=1e-9)
    report(1, res.passed and dt < 10, summary(res, dt))


def test_criterion_02_weak_majorization(report):
    res, dt = timed(suites.weak_majorization, SEED, trials=2000, max_dim=6, tol=1e-9)
    report(2, res.passed and dt < 30, summary(res, dt))


def test_criterion_03_majorization_tradeoff(report):
    res = suites.majorization_tradeoff(SEED, trials=2000, max_dim=6, tol=1e-9)
    r = tradeoff_bound(basis_ensemble(2), np.diag([1.0, 0.5]))
    worked = abs(r.delta_I - 0.27807) < 1e-5 and abs(r.bound - 0.27807) < 1e-5 and abs(r.slack) < 1e-6
    report(3, res.passed and worked, f"{summary(res)}; worked instance dI={r.delta_I:.5f} bound={r.bound:.5f}")


def test_criterion_04_holevo_chain(report):
    res = suites.holevo_chain(SEED, trials=500, tol=1e-8)
    rep = averaged_tradeoff(basis_ensemble(2), observable_instrument(ObservableSpec([[0.9, 0.1], [0.1, 0.9]])))
    worked = abs(rep.delta_I_avg - 0.53100) < 1e-5 and abs(rep.holevo_bound - rep.delta_I_avg) < 1e-6
    report(4, res.passed and worked, f"{summary(res)}; p=0.9 dI_avg={rep.delta_I_avg:.5f} S-<H(z)>={rep.holevo_bound:.5f}")


def test_criterion_05_reversal(report):
    res = suites.reversal(SEED, trials=100, states=100, tol=1e-9)
    needed = {"input_independence", "sigma_le_geomean", "geomean_le_hs", "cancellation", "full_rank_erasure",
              "split_cancellation", "split_erasure"}
    report(5, res.passed and needed <= set(res.checks), summary(res))


def test_criterion_06_unitary_correlation(report):
    res = suites.unitary_correlation_oracle(SEED, trials=20, dims=(2, 3, 4), n_samples=100_000)
    ends = max(abs(unitary_correlation(np.eye(d)) - 1) for d in (2, 3, 4))
    ends = max(ends, max(abs(unitary_correlation(np.diag([1.0] + [0.0] * (d - 1))) - 2 / (d * (d + 1))) for d in (2, 3, 4)))
    report(6, res.passed and ends < 1e-9, f"{summary(res)}; endpoint error {ends:.1e}")


def test_criterion_07_entanglement_identity(report):
    res = suites.entanglement_identity(SEED, trials=200, tol=1e-8)
    report(7, res.passed, summary(res))


def test_criterion_08_observables_and_cascades(report):
    obs = suites.observables(SEED, trials=500, tol=1e-9)
    cas = suites.cascades(SEED, trials=1000, steps=50)
    spec = ObservableSpec([[0.9, 0.1], [0.1, 0.9]])
    lhs, b = float(min_reversion_probabilities(spec).sum()), bhattacharyya_overlap(spec)
    worked = abs(lhs - 0.2) < 1e-12 and abs(b - 0.6) < 1e-12
    frac = cas.notes["concentration_fraction"]
    report(8, obs.passed and cas.passed and worked,
           f"{summary(obs)}; {summary(cas)}; concentration {frac:.3f}; p=0.9: {lhs:.3f} <= {b:.3f}")


def test_criterion_09_conjugate_zero_information(report):
    res = suites.conjugate_zero_information(SEED, trials=100, dims=(2, 3, 4, 5))
    # binary-symmetric style channel on every d: the conjugate ensemble still learns nothing
    direct = 0.0
    for d in (2, 3, 4, 5):
        p = np.full((2, d), 0.1)
        p[0, 0], p[1, 0] = 0.9, 0.1
        p[:, 1:] = [[0.3], [0.7]]
        inst = observable_instrument(ObservableSpec(p))
        direct = max(direct, abs(averaged_tradeoff(conjugate_basis_ensemble(d), inst).delta_I_avg))
    report(9, res.passed and direct < 1e-9, f"{summary(res)}; fixed channel max |dI| {direct:.1e}")


def test_criterion_10_disturbance_bounds(report):
    runs = suites.run_all(SEED, trials=200, dim=6)
    totals = {"disturbance_lower": 0, "disturbance_upper": 0}
    bad = 0
    for r in runs:
        for name in totals:
            if name in r.checks:
                totals[name] += r.checks[name].count
                bad += r.checks[name].violations
    own = next(r for r in runs if r.name == "disturbance_bounds")
    ozawa = all(own.checks[c].violations == 0 for c in ("chaotic_ge_ozawa", "flat_equality", "strict_unless_flat"))
    ok = bad == 0 and ozawa and totals["disturbance_lower"] > 0
    report(10, ok, f"{totals['disturbance_lower']} instances across all suites, {bad} range violations; Ozawa comparison ok={ozawa}")


def test_full_verify_under_two_minutes(report, tmp_path):
    t0 = time.perf_counter()
    proc = subprocess.run([sys.executable, "-m", "infodist.cli", "verify", "--out", str(tmp_path / "v.json")])
    dt = time.perf_counter() - t0
    report(11, proc.returncode == 0 and dt < 120, f"infodist verify (defaults) exit {proc.returncode} in {dt:.1f} s")


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-q"]))

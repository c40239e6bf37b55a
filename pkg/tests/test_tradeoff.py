import math

import numpy as np
import pytest

from conftest import DIAG_HALF, KET0, PLUS, h2
from infodist.ensembles import Ensemble, basis_ensemble, conjugate_basis_ensemble, squash
from infodist.errors import InvalidInput, InvalidInstrument, PreconditionViolated
from infodist.measurement import ObservableSpec, PureInstrument, observable_instrument
from infodist.sampling import haar_unitary, random_contraction, random_unitary_instrument
from infodist.tradeoff import (
    averaged_tradeoff,
    chaotic_disturbance,
    disturbance,
    entanglement_reduction_check,
    joint_probability_vector,
    majorizes,
    monte_carlo_unitary_correlation,
    ozawa_disturbance,
    s_matrix,
    squashed_tradeoff_report,
    tradeoff_bound,
    tradeoff_report,
    unitary_correlation,
    verify_majorization,
    verify_weak_majorization,
    weak_majorizes,
    z_vector,
)

P0 = np.diag([1.0, 0.0])


def test_majorization_primitives():
    assert majorizes([0.5, 0.5], [1.0, 0.0]).holds
    v = majorizes([0.3, 0.7], [0.7, 0.3])
    assert v.holds and v.worst_partial_sum_gap == pytest.approx(0.0)
    assert not majorizes([1.0, 0.0], [0.5, 0.5]).holds
    assert weak_majorizes([0.5, 0.3125], [1.0, 0.25]).holds
    assert not weak_majorizes([0.9, 0.9], [1.0, 0.5]).holds
    # shorter vectors are zero padded
    assert majorizes([1.0], [1.0, 0.0]).padded_length == 2


def test_joint_probability_vector(rng, zero_plus):
    assert np.allclose(joint_probability_vector(basis_ensemble(2), DIAG_HALF), [0.5, 0.125])
    assert np.allclose(joint_probability_vector(zero_plus, DIAG_HALF), [0.5, 0.3125])
    e = Ensemble([KET0, PLUS], [0.3, 0.7])
    assert np.allclose(joint_probability_vector(e, haar_unitary(rng, 2)), [0.3, 0.7])


def test_z_vector():
    tv = z_vector(basis_ensemble(2), DIAG_HALF)
    assert np.allclose(tv.lambdas, [0.5, 0.5])
    assert tv.outcome_prob == pytest.approx(0.625)
    assert np.allclose(tv.z, [0.8, 0.2])
    assert np.allclose(z_vector(conjugate_basis_ensemble(3), haar_unitary(np.random.default_rng(0), 3)).z, 1 / 3)
    assert np.allclose(z_vector(basis_ensemble(2), P0).z, [1.0, 0.0])


def test_s_matrix(zero_plus):
    b = s_matrix(basis_ensemble(2), DIAG_HALF)
    assert np.allclose(b.S, np.eye(2))
    assert np.allclose(b.row_sums, [1, 1])
    aug = b.augmented
    assert aug.shape == (4, 4)
    assert np.allclose(aug.sum(axis=0), 1) and np.allclose(aug.sum(axis=1), 1)
    b = s_matrix(zero_plus, DIAG_HALF)
    assert np.allclose(b.row_sums, [2 / 3, 4 / 3])
    assert b.augmented is None and not b.quasi_parallel
    b = s_matrix(Ensemble([KET0], [1.0]), DIAG_HALF)
    assert np.allclose(b.S, [[1.0]]) and np.allclose(b.row_sums, [1.0])


def test_weak_majorization_examples(rng, zero_plus):
    assert verify_weak_majorization(zero_plus, DIAG_HALF).holds
    e = Ensemble([KET0, PLUS], [0.3, 0.7])
    assert verify_weak_majorization(e, haar_unitary(rng, 2)).holds


def test_strong_majorization_examples(zero_plus):
    v = verify_majorization(basis_ensemble(2), DIAG_HALF)
    assert v.holds and v.worst_partial_sum_gap == pytest.approx(0.0, abs=1e-12)
    assert verify_majorization(squash(zero_plus, DIAG_HALF), DIAG_HALF).holds
    assert verify_majorization(basis_ensemble(2), P0).holds
    with pytest.raises(PreconditionViolated):
        verify_majorization(zero_plus, DIAG_HALF)


def test_disturbance_examples(rng):
    assert disturbance(basis_ensemble(2), DIAG_HALF) == pytest.approx(-0.72193, abs=1e-5)
    assert disturbance(basis_ensemble(3), haar_unitary(rng, 3)) == pytest.approx(-math.log2(3))
    assert disturbance(basis_ensemble(2), P0) == pytest.approx(0.0)


def test_tradeoff_bound_examples(rng):
    r = tradeoff_bound(basis_ensemble(2), DIAG_HALF)
    assert r.delta_I == pytest.approx(0.27807, abs=1e-5)
    assert r.bound == pytest.approx(0.27807, abs=1e-5)
    assert abs(r.slack) < 1e-6
    r = tradeoff_bound(basis_ensemble(3), haar_unitary(rng, 3))
    assert r.bound == pytest.approx(0.0, abs=1e-12) and abs(r.slack) < 1e-12


def test_squashed_report(zero_plus):
    rep = squashed_tradeoff_report(zero_plus, DIAG_HALF)
    assert list(rep.counts) == [1, 2]
    # the split |+> contributes an H(q) = 1 bit term weighted by a_+ - a_+|M
    post_plus = 0.3125 / 0.8125
    assert rep.correction == pytest.approx(-(0.5 - post_plus) * 1.0)
    assert rep.rigorous_correction == pytest.approx(post_plus)
    assert rep.delta_I <= rep.rigorous_bound + 1e-12
    assert rep.majorization.holds
    rep = squashed_tradeoff_report(basis_ensemble(2), DIAG_HALF)
    assert rep.correction == 0.0 and rep.correction_sign == 0


def test_averaged_tradeoff():
    inst = observable_instrument(ObservableSpec([[0.9, 0.1], [0.1, 0.9]]))
    rep = averaged_tradeoff(basis_ensemble(2), inst)
    assert rep.delta_I_avg == pytest.approx(0.53100, abs=1e-5)
    assert rep.mean_entropy_z == pytest.approx(h2(0.9))
    assert rep.bound == pytest.approx(rep.delta_I_avg, abs=1e-6)
    assert rep.holevo_bound <= rep.chi + 1e-12 and rep.chi == pytest.approx(1.0)
    vn = observable_instrument(ObservableSpec(np.eye(3)))
    e = basis_ensemble(3, [0.5, 0.3, 0.2])
    rep = averaged_tradeoff(e, vn)
    assert rep.delta_I_avg == pytest.approx(e.entropy())
    assert rep.mean_entropy_z == pytest.approx(0.0)
    ru = random_unitary_instrument(np.random.default_rng(4), 3)
    rep = averaged_tradeoff(e, ru)
    assert rep.delta_I_avg == pytest.approx(0.0, abs=1e-12)
    assert rep.delta_I_avg <= rep.holevo_bound + 1e-9 <= rep.chi + 2e-9


def test_averaged_tradeoff_needs_complete_instrument():
    with pytest.raises((InvalidInstrument, InvalidInput)):
        averaged_tradeoff(basis_ensemble(2), [DIAG_HALF])


def test_unitary_correlation_closed_form(rng):
    assert unitary_correlation(haar_unitary(rng, 2)) == pytest.approx(1.0)
    assert unitary_correlation(P0) == pytest.approx(1 / 3)
    assert unitary_correlation(DIAG_HALF) == pytest.approx(0.58333, abs=1e-5)
    d = 4
    rank_one = np.zeros((d, d))
    rank_one[0, 2] = 1.0
    assert unitary_correlation(rank_one) == pytest.approx(2 / (d * (d + 1)))


@pytest.mark.parametrize("m", [np.eye(2), DIAG_HALF, P0], ids=["unitary", "diag", "rank_one"])
def test_unitary_correlation_monte_carlo(m):
    est = monte_carlo_unitary_correlation(m, 100_000, seed=8)
    assert est.agrees_with(unitary_correlation(m))


def test_monte_carlo_needs_samples():
    with pytest.raises(InvalidInput):
        monte_carlo_unitary_correlation(DIAG_HALF, 10)


def test_entanglement_identity_examples(rng):
    r = entanglement_reduction_check(DIAG_HALF, np.eye(2) / 2)
    assert r.disturbance == pytest.approx(-0.72193, abs=1e-5)
    assert r.max_discrepancy < 1e-10
    rho = np.diag([0.6, 0.3, 0.1])
    u = haar_unitary(rng, 3)
    r = entanglement_reduction_check(u, np.eye(3) / 3)
    assert r.reduced_entropy == pytest.approx(r.entanglement_before)
    r = entanglement_reduction_check(np.diag([0.0, 1.0, 0.0]), rho)
    assert r.reduced_entropy == pytest.approx(0.0, abs=1e-12)
    with pytest.raises(PreconditionViolated):
        entanglement_reduction_check(DIAG_HALF, np.array([[0.75, 0.25], [0.25, 0.25]]))


def test_chaotic_and_ozawa_disturbance():
    u = haar_unitary(np.random.default_rng(6), 4)
    assert chaotic_disturbance(u) == pytest.approx(-2.0)
    assert ozawa_disturbance(u) == -2.0
    assert chaotic_disturbance(DIAG_HALF) == pytest.approx(-0.72193, abs=1e-5)
    assert ozawa_disturbance(DIAG_HALF) == -1.0
    assert chaotic_disturbance(np.diag([1.0, 1.0, 0.0])) == pytest.approx(-1.0)
    assert ozawa_disturbance(np.diag([1.0, 1.0, 0.0])) == -1.0
    with pytest.raises(InvalidInput):
        chaotic_disturbance(np.zeros((2, 2)))


def test_chaotic_matches_ensemble_disturbance(rng):
    for _ in range(20):
        m = random_contraction(rng, 4)
        assert chaotic_disturbance(m) == pytest.approx(disturbance(conjugate_basis_ensemble(4), m), abs=1e-9)


def test_report_shapes(zero_plus):
    rep = tradeoff_report(basis_ensemble(2), DIAG_HALF, "a")
    assert rep["parallelism"] == "parallel" and rep["slack"] == pytest.approx(0.0, abs=1e-12)
    rep = tradeoff_report(zero_plus, DIAG_HALF)
    assert rep["parallelism"] == "squashed"
    assert rep["squash"]["copies"] == [1, 2]
    assert rep["majorization"]["weak"]["holds"]


def test_reversal_disturbance_compared_with_unitary():
    # a unitary leaves z equal to the priors, so its disturbance is -H(E)
    rev = np.diag([0.5, 1.0])
    flat = basis_ensemble(2)
    assert disturbance(flat, rev) > disturbance(flat, np.eye(2)) + 0.2
    # on a skewed posterior the same reversal flattens z below the unitary value
    skewed = basis_ensemble(2, [0.8, 0.2])
    assert disturbance(skewed, rev) == pytest.approx(-1.0)
    assert disturbance(skewed, np.eye(2)) == pytest.approx(-0.72193, abs=1e-5)

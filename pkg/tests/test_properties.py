"""Property-based checks of the trade-off relations on generated instances."""

import math

import numpy as np
from hypothesis import given, settings
from hypothesis import strategies as st

from infodist import matcore
from infodist.ensembles import Parallelism, classify_parallelism, squash
from infodist.measurement import ObservableSpec, bhattacharyya_overlap, information_gain, min_reversion_probabilities
from infodist.reversal import input_independence_residual, verify_erasure
from infodist.sampling import (
    haar_states,
    parallel_ensemble,
    random_channel,
    random_contraction,
    random_ensemble,
    random_matrix,
)
from infodist.tradeoff import (
    disturbance,
    squashed_tradeoff_report,
    tradeoff_bound,
    verify_majorization,
    verify_weak_majorization,
)

seeds = st.integers(min_value=0, max_value=2**32 - 1)
dims = st.integers(min_value=2, max_value=5)
PROFILE = settings(max_examples=60, deadline=None)


@PROFILE
@given(seeds, dims, st.integers(min_value=1, max_value=5))
def test_pseudoinverse_identities(seed, d, r):
    rng = np.random.default_rng(seed)
    a = random_matrix(rng, d, min(r, d))
    ap = matcore.pseudoinverse(a)
    scale = max(1.0, np.linalg.norm(a), np.linalg.norm(ap))
    assert np.linalg.norm(a @ ap @ a - a) / scale < 1e-9
    assert np.linalg.norm(ap @ a @ ap - ap) / scale < 1e-9


@PROFILE
@given(seeds, dims)
def test_weak_majorization_always_holds(seed, d):
    rng = np.random.default_rng(seed)
    e, m = random_ensemble(rng, d), random_contraction(rng, d)
    assert verify_weak_majorization(e, m).holds


@PROFILE
@given(seeds, dims)
def test_parallel_pairs_satisfy_tradeoff(seed, d):
    rng = np.random.default_rng(seed)
    m = random_contraction(rng, d)
    e = parallel_ensemble(rng, m)
    assert classify_parallelism(e, m).kind is Parallelism.PARALLEL
    assert verify_majorization(e, m).holds
    assert tradeoff_bound(e, m).slack >= -1e-9


@PROFILE
@given(seeds, dims)
def test_squashed_ensembles_become_quasi_parallel(seed, d):
    rng = np.random.default_rng(seed)
    e, m = random_ensemble(rng, d), random_contraction(rng, d)
    sq = squash(e, m)
    assert classify_parallelism(sq, m).quasi_parallel
    assert verify_majorization(sq, m).holds
    rep = squashed_tradeoff_report(e, m)
    assert rep.delta_I <= rep.rigorous_bound + 1e-9


@PROFILE
@given(seeds, dims)
def test_disturbance_range(seed, d):
    rng = np.random.default_rng(seed)
    m = random_contraction(rng, d, rank=int(rng.integers(1, d + 1)))
    e = random_ensemble(rng, d)
    if np.sum(e.priors * np.linalg.norm(e.states @ m.matrix.T, axis=1) ** 2) <= 1e-12:
        return
    dist = disturbance(e, m)
    assert -math.log2(m.rank) - 1e-9 <= dist <= 1e-9


@PROFILE
@given(seeds, dims)
def test_reversal_cancels_information(seed, d):
    rng = np.random.default_rng(seed)
    m = random_contraction(rng, d)
    e = random_ensemble(rng, d)
    r = verify_erasure(e, m)
    assert abs(r.total) < 1e-9 and abs(r.direct) < 1e-9
    assert max(input_independence_residual(m, psi) for psi in haar_states(rng, d, 5)) < 1e-9
    assert abs(r.forward - information_gain(e, m)) < 1e-12


@PROFILE
@given(seeds, dims, st.integers(min_value=2, max_value=4))
def test_bhattacharyya_bounds_reversion(seed, d, n):
    rng = np.random.default_rng(seed)
    spec = ObservableSpec(random_channel(rng, n, d))
    assert min_reversion_probabilities(spec).sum() <= bhattacharyya_overlap(spec) + 1e-9

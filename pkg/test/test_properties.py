"""
Property based tests over random USD problems
"""
import numpy as np
import pytest
from hypothesis import assume, given, seed, settings as hsettings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from usdembed import (
    build_lossy,
    validate_usd,
    canonical_embedding,
    optimal_hamiltonian,
    cost_report,
    reduce_ancilla,
    unitary_action
)
from usdembed import numkernel as nk
from usdembed import settings
from usdembed.usd import LossyOperator, random_usd_instance, povm_from_lossy, outcome_probabilities, scale_marginal
from usdembed.dynamics import HamiltonianSchedule, schedule_action, verify_lower_bound
from usdembed.neumark import equivalence_check
from usdembed.exceptions import PassivityError

MAX_DIMENSION = 5
TOL = 1e-9

seeds = st.integers(min_value=0, max_value=2**32 - 1)
dims = st.integers(min_value=1, max_value=MAX_DIMENSION)


@seed(1)
@hsettings(max_examples=60, deadline=None)
@given(n=dims, rng_seed=seeds)
def test_random_instance_is_unambiguous(n, rng_seed):
    rng = np.random.default_rng(rng_seed)
    states, probs = random_usd_instance(n, rng)
    k = build_lossy(states, probs)
    assert k.is_passive
    validation = validate_usd(k, states)
    assert validation.passed
    assert validation.probabilities == pytest.approx(probs, abs=1e-8)


@seed(2)
@hsettings(max_examples=60, deadline=None)
@given(n=dims, rng_seed=seeds)
def test_povm_is_complete(n, rng_seed):
    rng = np.random.default_rng(rng_seed)
    k = build_lossy(*random_usd_instance(n, rng))
    povm = povm_from_lossy(k)
    total = povm.conclusive.sum(axis=0) + povm.inconclusive
    assert np.allclose(total, np.eye(n), atol=TOL)
    probs = outcome_probabilities(nk.random_density_matrix(n, rng), povm)
    assert probs.sum() == pytest.approx(1.)
    assert np.all(probs >= -TOL)


@seed(3)
@hsettings(max_examples=80, deadline=None)
@given(n=dims, rng_seed=seeds, t=st.floats(min_value=0.05, max_value=20.))
def test_optimal_hamiltonian_costs_the_minimum(n, rng_seed, t):
    rng = np.random.default_rng(rng_seed)
    k = nk.random_contraction(n, rng)
    e = canonical_embedding(k)
    h = optimal_hamiltonian(e, t)
    report = cost_report(k)
    assert nk.unitarity_error(e.matrix) < TOL
    assert np.allclose(nk.exp_unitary(h.matrix, t), e.matrix, atol=1e-8)
    assert h.action('spectral') == pytest.approx(report.spectral_action, abs=TOL)
    assert h.action('hs') == pytest.approx(report.hs_action, abs=TOL)
    assert unitary_action(e.matrix) == pytest.approx(report.spectral_action, abs=1e-8)
    assert report.hs_action >= report.spectral_action - TOL


@seed(4)
@hsettings(max_examples=60, deadline=None)
@given(
    singulars=arrays(np.float64, (3,), elements=st.floats(min_value=0., max_value=1.)),
    rng_seed=seeds
)
def test_minimal_ancilla(singulars, rng_seed):
    rng = np.random.default_rng(rng_seed)
    k = nk.random_unitary(3, rng) @ np.diag(singulars) @ nk.random_unitary(3, rng)
    reduced = reduce_ancilla(canonical_embedding(k))
    n_lossy = int(np.sum(nk.rotation_angles(nk.singular_values(k)) >= 1e-9))
    assert reduced.n_anc == n_lossy
    assert nk.unitarity_error(reduced.matrix) < TOL
    assert equivalence_check(k, reduced.matrix, n_states_samples=5, rng=rng, tol=1e-8).passed


@seed(5)
@hsettings(max_examples=40, deadline=None)
@given(rng_seed=seeds, n_split=st.integers(min_value=1, max_value=6))
def test_split_schedule_keeps_bound(rng_seed, n_split):
    rng = np.random.default_rng(rng_seed)
    k = nk.random_contraction(2, rng)
    h = optimal_hamiltonian(canonical_embedding(k), float(rng.uniform(0.5, 2.)))
    sched = HamiltonianSchedule.from_constant(h.matrix, h.duration).split(n_split)
    report = verify_lower_bound(sched, k)
    assert report.passed
    assert schedule_action(sched) == pytest.approx(report.minimal_action, abs=1e-9)


@seed(6)
@hsettings(max_examples=80, deadline=None)
@given(n=dims, rank=dims, rng_seed=seeds)
def test_norm_ordering(n, rank, rng_seed):
    rng = np.random.default_rng(rng_seed)
    rank = min(rank, n)
    a = (rng.normal(size=(n, rank)) + 1j * rng.normal(size=(n, rank))) @ rng.normal(size=(rank, n))
    spectral, hs = nk.spectral_norm(a), nk.hs_norm(a)
    assert spectral <= hs + TOL
    assert hs <= np.sqrt(np.linalg.matrix_rank(a)) * spectral + TOL


@seed(7)
@hsettings(max_examples=80, deadline=None)
@given(n=dims, rng_seed=seeds, scale=st.floats(min_value=0.5, max_value=1.5))
def test_passive_iff_inconclusive_is_positive(n, rng_seed, scale):
    assume(abs(scale - 1) > 1e-6)
    rng = np.random.default_rng(rng_seed)
    k = scale_marginal(build_lossy(*random_usd_instance(n, rng)))
    scaled = LossyOperator(k.matrix * scale, check_passive=False)
    lowest = np.linalg.eigvalsh(np.eye(n) - scaled.matrix.conj().T @ scaled.matrix)[0]
    tol = settings.get_setting('tol_passivity')
    assert scaled.is_passive == (scale < 1)
    if scaled.is_passive:
        assert lowest >= -tol
        assert np.linalg.eigvalsh(povm_from_lossy(scaled).inconclusive)[0] >= -tol
    else:
        assert lowest < -tol
        with pytest.raises(PassivityError):
            povm_from_lossy(scaled)


if __name__ == '__main__':
    pytest.main(args=[__file__])

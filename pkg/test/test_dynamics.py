"""
Tests for schedules, the lower bound and the simulated measurement
"""
import numpy as np
import pytest

from usdembed import canonical_embedding, optimal_hamiltonian, cost_report
from usdembed import numkernel as nk
from usdembed import settings
from usdembed.dynamics import (
    HamiltonianSchedule,
    propagate,
    schedule_action,
    fubini_angle,
    verify_lower_bound,
    random_realizing_schedule,
    MeasurementRecord,
    conclusive_basis,
    outcome_distribution,
    simulate_discrimination
)
from usdembed.exceptions import ValidationError, VerificationError, ScheduleMismatchError


def test_schedule_validation():
    with pytest.raises(ValidationError):
        HamiltonianSchedule(np.array([[0., 1.], [0., 0.]]), [1.])
    with pytest.raises(ValidationError):
        HamiltonianSchedule(np.eye(2), [0.])
    with pytest.raises(ValidationError):
        HamiltonianSchedule(np.stack([np.eye(2)] * 2), [1.])
    with pytest.raises(ValidationError):
        HamiltonianSchedule(np.zeros((0, 2, 2)), [])


def test_empty_schedule():
    sched = HamiltonianSchedule.empty(3)
    assert len(sched) == 0
    assert sched.duration == 0.
    assert np.allclose(sched.total_unitary(), np.eye(3))
    assert schedule_action(sched) == 0.
    psi = np.array([0., 1., 0.])
    assert np.allclose(propagate(sched, psi), psi)


def test_time_ordering(rng):
    """
    Later segments act from the left.
    """
    h1 = nk.random_hermitian(2, rng)
    h2 = nk.random_hermitian(2, rng)
    sched = HamiltonianSchedule(np.stack([h1, h2]), [0.3, 0.7])
    expected = nk.exp_unitary(h2, 0.7) @ nk.exp_unitary(h1, 0.3)
    assert np.allclose(sched.total_unitary(), expected, atol=1e-12)
    psi = np.array([1., 0.])
    assert np.allclose(propagate(sched, psi), expected @ psi, atol=1e-12)


def test_split_and_concatenate(rng):
    h = nk.random_hermitian(3, rng)
    sched = HamiltonianSchedule.from_constant(h, 2.)
    fine = sched.split(5)
    assert len(fine) == 5
    assert fine.duration == pytest.approx(2.)
    assert np.allclose(fine.total_unitary(), sched.total_unitary(), atol=1e-12)
    assert schedule_action(fine) == pytest.approx(schedule_action(sched))
    joined = sched + HamiltonianSchedule.from_constant(-h, 2.)
    assert np.allclose(joined.total_unitary(), np.eye(3), atol=1e-12)
    with pytest.raises(ValidationError):
        sched + HamiltonianSchedule.from_constant(np.eye(2), 1.)


def test_propagate_rejects_bad_state():
    sched = HamiltonianSchedule.from_constant(np.eye(2), 1.)
    with pytest.raises(ValidationError):
        propagate(sched, [1., 1.])
    with pytest.raises(ValidationError):
        propagate(sched, [1., 0., 0.])


def test_schedule_action():
    h = np.diag([1., -3.])
    sched = HamiltonianSchedule(np.stack([h, 2 * h]), [0.5, 0.25])
    assert schedule_action(sched) == pytest.approx(3.)
    assert schedule_action(sched, 'hs') == pytest.approx(np.sqrt(10.))


def test_fubini_angle():
    assert fubini_angle([1., 0.], [0., 1.]) == pytest.approx(np.pi / 2)
    assert fubini_angle([1., 0.], [1j, 0.]) == pytest.approx(0.)
    assert fubini_angle([1., 0.], [np.cos(0.2), np.sin(0.2)]) == pytest.approx(0.2)
    with pytest.raises(ValidationError):
        fubini_angle([1., 0.], [1., 1.])


def test_fubini_angle_bounded_by_action(rng):
    """
    A state cannot move further than the action of its schedule.
    """
    for _ in range(50):
        h = nk.random_hermitian(3, rng)
        t = float(rng.uniform(0.1, 2.))
        psi = nk.random_unitary(3, rng)[:, 0]
        out = propagate(HamiltonianSchedule.from_constant(h, t), psi)
        assert fubini_angle(psi, out) <= schedule_action(HamiltonianSchedule.from_constant(h, t)) + 1e-12


def test_optimal_schedule_saturates_bound(lossy_06):
    e = canonical_embedding(lossy_06)
    h = optimal_hamiltonian(e)
    report = verify_lower_bound(HamiltonianSchedule.from_constant(h.matrix, h.duration), lossy_06)
    assert report.surplus == pytest.approx(0., abs=1e-10)
    assert report.passed
    report.raise_for_status()
    assert report.minimal_action == pytest.approx(np.pi / 3)


def test_random_schedules_respect_bound(rng):
    for _ in range(100):
        k = nk.random_contraction(int(rng.integers(2, 5)), rng)
        e = canonical_embedding(k)
        sched = random_realizing_schedule(e, int(rng.integers(1, 6)), rng)
        report = verify_lower_bound(sched, k)
        assert report.passed
        assert report.schedule_action >= cost_report(k).spectral_action - 1e-9


def test_lower_bound_detects_wrong_target(lossy_06):
    sched = HamiltonianSchedule.from_constant(np.zeros((4, 4)), 1.)
    with pytest.raises(ScheduleMismatchError):
        verify_lower_bound(sched, lossy_06)


def test_measurement_record():
    record = MeasurementRecord(
        trials=100, conclusive_counts=[30, 30], inconclusive=40,
        errors=0, seed=1, expected_inconclusive=0.4
    )
    assert record.inconclusive_frequency == pytest.approx(0.4)
    assert record.passed
    assert MeasurementRecord.from_dict(record.to_dict()).to_dict() == record.to_dict()
    with pytest.raises(ValidationError):
        MeasurementRecord(trials=10, conclusive_counts=[1, 1], inconclusive=1,
                          errors=0, seed=1, expected_inconclusive=0.1)
    bad = MeasurementRecord(trials=100, conclusive_counts=[30, 30], inconclusive=40,
                            errors=2, seed=1, expected_inconclusive=0.4)
    with pytest.raises(VerificationError):
        bad.raise_for_status()


def test_conclusive_basis(pair_06, lossy_06):
    basis = conclusive_basis(lossy_06, pair_06)
    assert nk.is_unitary(basis)
    outputs = lossy_06.matrix @ pair_06.states.T
    overlaps = np.abs(basis.conj().T @ outputs)
    assert overlaps[0, 1] == pytest.approx(0., abs=1e-12)
    assert overlaps[1, 0] == pytest.approx(0., abs=1e-12)


def test_outcome_distribution(pair_06, lossy_06):
    e = canonical_embedding(lossy_06)
    dist = outcome_distribution(e.matrix, pair_06, conclusive_basis(lossy_06, pair_06))
    assert np.allclose(dist.sum(axis=1), 1.)
    assert dist[0, 1] == pytest.approx(0., abs=1e-12)
    assert dist[1, 0] == pytest.approx(0., abs=1e-12)
    assert dist[:, -1] == pytest.approx([0.6, 0.6], abs=1e-12)


def test_simulation_overlap_06(pair_06, lossy_06):
    """
    The inconclusive rate of the optimal symmetric measurement is the overlap.
    """
    e = canonical_embedding(lossy_06)
    record = simulate_discrimination(pair_06, e, trials=100_000, seed=0x05D1)
    assert record.errors == 0
    assert record.expected_inconclusive == pytest.approx(0.6, abs=1e-12)
    assert abs(record.inconclusive_frequency - 0.6) < 4 * np.sqrt(0.24 / 100_000)
    assert record.passed


def test_simulation_swapped_basis_errs(pair_06, lossy_06):
    e = canonical_embedding(lossy_06)
    basis = conclusive_basis(lossy_06, pair_06)[:, ::-1]
    record = simulate_discrimination(pair_06, e, trials=10_000, seed=3, output_basis=basis)
    assert record.errors > 0
    assert not record.passed


def test_simulation_independent_of_workers(pair_06, lossy_06):
    e = canonical_embedding(lossy_06)
    serial = simulate_discrimination(pair_06, e, trials=20_000, seed=11)
    threaded = simulate_discrimination(pair_06, e, trials=20_000, seed=11, workers=4)
    assert serial.to_dict() == threaded.to_dict()
    other = simulate_discrimination(pair_06, e, trials=20_000, seed=12)
    assert other.to_dict() != serial.to_dict()


def test_simulation_rejects_bad_input(pair_06, lossy_06):
    e = canonical_embedding(lossy_06)
    with pytest.raises(ValidationError):
        simulate_discrimination(pair_06, e, trials=0)
    with pytest.raises(ValidationError):
        simulate_discrimination(pair_06, e, trials=10, seed=-1)
    with pytest.raises(VerificationError):
        simulate_discrimination(pair_06, np.eye(4), trials=10)


@pytest.mark.parametrize('block_size', [1, 7, 128, 20_000])
def test_simulation_independent_of_block_size(pair_06, lossy_06, block_size, monkeypatch):
    e = canonical_embedding(lossy_06)
    reference = simulate_discrimination(pair_06, e, trials=5_000, seed=21)
    monkeypatch.setitem(settings.user_settings, 'block_size', block_size)
    record = simulate_discrimination(pair_06, e, trials=5_000, seed=21, workers=3)
    assert record.to_dict() == reference.to_dict()


def test_simulation_trials_share_prefix(pair_06, lossy_06):
    """
    Growing the run only appends trials, so the first outcomes are unchanged.
    """
    e = canonical_embedding(lossy_06)
    short = simulate_discrimination(pair_06, e, trials=1, seed=8)
    long = simulate_discrimination(pair_06, e, trials=2, seed=8)
    if short.inconclusive == 1:
        assert long.inconclusive >= 1
    else:
        assert np.all(long.conclusive_counts >= short.conclusive_counts)


if __name__ == '__main__':
    pytest.main(args=[__file__])

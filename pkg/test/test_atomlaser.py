"""
Tests for the three-level atom pulse design
"""
import warnings
import numpy as np
import pytest
import astropy.units as u

from usdembed import StateSet, build_lossy, cost_report, settings
from usdembed import numkernel as nk
from usdembed import units
from usdembed.usd import symmetric_pair, symmetric_two_state_probs
from usdembed.dynamics import conclusive_basis, simulate_discrimination
from usdembed.sweep import CostSweep
from usdembed.atomlaser import (
    AtomConfig,
    PulseDesign,
    design_pulse,
    rwa_hamiltonian,
    rwa_unitary,
    minimal_area,
    tradeoff_check,
    field,
    full_hamiltonian_at,
    discretize,
    rwa_fidelity,
    design_for_overlap,
    atom_sweep
)
from usdembed.exceptions import (
    ValidationError,
    DegenerateDesignError,
    ConvergenceError,
    VerificationError,
    RWAWarning
)


def test_atom_config():
    atom = AtomConfig.default()
    assert atom.transition_frequencies == pytest.approx([10., 9.])
    assert atom.detuning == pytest.approx(1.)
    restored = AtomConfig.from_dict(atom.to_dict())
    assert np.allclose(restored.levels, atom.levels)
    assert np.allclose(restored.dipoles, atom.dipoles)
    with_units = AtomConfig(levels=[0., 1., 10.] * units.energy, dipoles=[1., 1j])
    assert with_units.levels == pytest.approx([0., 1., 10.])


@pytest.mark.parametrize('levels', [
    [0., 1., 0.5],
    [0., 0., 10.],
    [0., 1., np.nan],
])
def test_atom_config_rejects(levels):
    with pytest.raises(ValidationError):
        AtomConfig(levels=levels, dipoles=[1., 1.])


def test_design_overlap_06():
    """
    The symmetric pair of overlap 0.6 needs area pi/3 on the first transition only.
    """
    plus, minus = symmetric_pair(0.6)
    p = design_pulse(plus, minus, t=1.0)
    assert abs(p.amplitudes[1]) == pytest.approx(0., abs=1e-12)
    assert p.amplitudes[0].real > 0
    assert p.area == pytest.approx(np.pi / 3, abs=1e-12)
    assert p.overlap == pytest.approx(0.6)
    assert minimal_area(0.6) == pytest.approx(np.pi / 3, abs=1e-12)
    report = tradeoff_check(p, 0.6)
    assert report.passed
    report.raise_for_status()


def test_design_amplitude_sets_duration():
    plus, minus = symmetric_pair(0.6)
    p = design_pulse(plus, minus, amplitude=0.01)
    assert p.rabi == pytest.approx(0.01)
    assert p.duration == pytest.approx(100 * np.pi / 3)
    q = design_pulse(plus, minus, t=2 * units.time)
    assert q.duration == pytest.approx(2.)
    with pytest.raises(ValidationError):
        design_pulse(plus, minus)


def test_design_phase_invariance():
    plus, minus = symmetric_pair(0.3, mixing_angle=0.4)
    p = design_pulse(plus, minus, t=1.)
    q = design_pulse(plus * 1j, minus * np.exp(0.7j), t=1.)
    assert np.allclose(p.amplitudes, q.amplitudes, atol=1e-12)


def test_design_degenerate():
    with pytest.raises(DegenerateDesignError):
        design_pulse([1., 0.], [0., 1.], t=1.)
    with pytest.raises(DegenerateDesignError):
        design_pulse([1., 0.], [1j, 0.], t=1.)
    with pytest.raises(ValidationError):
        design_pulse([1., 0., 0.], [0., 1., 0.], t=1.)


def test_tradeoff_detects_wrong_area():
    p = PulseDesign(amplitudes=[0.5, 0.], duration=1.)
    report = tradeoff_check(p, 0.6)
    assert not report.passed
    with pytest.raises(VerificationError):
        report.raise_for_status()


def test_rwa_hamiltonian_norm():
    p = PulseDesign(amplitudes=[3., 4.], duration=1.)
    h = rwa_hamiltonian(p)
    assert np.allclose(h, h.conj().T)
    assert nk.spectral_norm(h) == pytest.approx(5.)
    assert p.rabi == pytest.approx(5.)


def test_minimal_area():
    assert minimal_area(0.) == pytest.approx(0.)
    assert minimal_area(1.) == pytest.approx(np.pi / 2)
    with pytest.raises(ValidationError):
        minimal_area(1.5)


def test_minimal_area_is_increasing():
    overlaps = np.linspace(0., 1., 102)[1:-1]
    areas = np.array([minimal_area(c) for c in overlaps])
    assert np.all(np.diff(areas) > 0)
    assert areas[0] > 0.
    assert areas[-1] < np.pi / 2
    sweep = CostSweep.compute(overlaps)
    assert np.all(np.diff(sweep['spectral_action'].value) > 0)
    assert np.all(np.diff(sweep['hs_action'].value) > 0)


def _random_pair(c: float, rng: np.random.Generator):
    basis = nk.random_unitary(2, rng)
    phase = np.exp(1j * rng.uniform(0., 2 * np.pi))
    return basis[:, 0], phase * (c * basis[:, 0] + np.sqrt(1 - c**2) * basis[:, 1])


def test_design_generic_complex_pair(rng):
    plus, minus = _random_pair(0.45, rng)
    p = design_pulse(plus, minus, t=1.)
    assert p.overlap == pytest.approx(0.45)
    assert tradeoff_check(p, 0.45).passed
    states = StateSet(np.stack([plus, minus]))
    u_mat = rwa_unitary(p)
    basis = conclusive_basis(u_mat[:2, :2], states)
    record = simulate_discrimination(states, u_mat, trials=10_000, seed=13, output_basis=basis)
    assert record.errors == 0
    assert record.expected_inconclusive == pytest.approx(0.45, abs=1e-10)


def test_design_random_pairs(rng):
    """
    Every designed pulse separates its pair without conclusive errors.
    """
    for i in range(20):
        c = rng.uniform(0.05, 0.95)
        plus, minus = _random_pair(c, rng)
        p = design_pulse(plus, minus, amplitude=rng.uniform(0.005, 0.05))
        states = StateSet(np.stack([plus, minus]))
        u_mat = rwa_unitary(p)
        block = u_mat[:2, :2]
        assert cost_report(block).spectral_action == pytest.approx(p.area, abs=1e-10)
        basis = conclusive_basis(block, states)
        record = simulate_discrimination(states, u_mat, trials=10_000, seed=i, output_basis=basis)
        assert record.errors == 0
        assert record.within_sigma(5.)


def test_rotating_frame_keeps_orthogonality(rng):
    atom = AtomConfig(levels=[0., 1.3, 11.], dipoles=[1., 0.7j])
    plus, minus = _random_pair(0.7, rng)
    p = design_pulse(plus, minus, amplitude=0.02)
    rotated = rwa_unitary(p) @ np.stack([nk.pad(plus, 3), nk.pad(minus, 3)], axis=1)
    lab = np.exp(-1j * atom.levels * p.duration)[:, None] * rotated
    assert abs(np.vdot(rotated[:2, 0], rotated[:2, 1])) == pytest.approx(0., abs=1e-12)
    assert abs(np.vdot(lab[:2, 0], lab[:2, 1])) == pytest.approx(abs(np.vdot(rotated[:2, 0], rotated[:2, 1])), abs=1e-12)
    assert np.linalg.norm(lab[:2], axis=0) == pytest.approx(np.linalg.norm(rotated[:2], axis=0), abs=1e-12)


@pytest.mark.parametrize('c', [0.1, 0.3, 0.6, 0.9])
def test_area_matches_embedding_cost(c):
    """
    The least area equals the least action of the marginal USD embedding.
    """
    states = StateSet(np.stack(symmetric_pair(c)))
    k = build_lossy(states, symmetric_two_state_probs(states))
    assert minimal_area(c) == pytest.approx(cost_report(k).spectral_action, abs=1e-10)


def test_rwa_unitary_discriminates():
    pulse, pair = design_for_overlap(0.6, amplitude=0.05)
    states = StateSet(np.stack(pair))
    u_mat = rwa_unitary(pulse)
    assert nk.is_unitary(u_mat)
    basis = conclusive_basis(u_mat[:2, :2], states)
    record = simulate_discrimination(states, u_mat, trials=10_000, seed=7, output_basis=basis)
    assert record.errors == 0
    assert record.expected_inconclusive == pytest.approx(0.6, abs=1e-10)
    assert record.within_sigma(4.)


def test_design_for_orthogonal_pair():
    pulse, _ = design_for_overlap(0.)
    assert pulse.area == 0.
    pulse, _ = design_for_overlap(0., duration=3.)
    assert pulse.duration == 3.


def test_field_and_full_hamiltonian():
    atom = AtomConfig(levels=[0., 1., 10.], dipoles=[1., 0.5j])
    pulse, _ = design_for_overlap(0.3, amplitude=0.02, mixing_angle=0.3)
    times = np.linspace(0., pulse.duration, 7)
    h = full_hamiltonian_at(times, atom, pulse)
    assert h.shape == (7, 3, 3)
    assert np.allclose(h, np.swapaxes(h, -1, -2).conj())
    assert np.allclose(np.diagonal(h, axis1=-2, axis2=-1).real, atom.levels)
    assert np.allclose(field(times, atom, PulseDesign.null()), 0.)


def test_field_parameters():
    atom = AtomConfig(levels=[0., 1., 10.], dipoles=[2., 1j])
    p = PulseDesign(amplitudes=[1., 1.], duration=1.)
    amplitudes, phases = p.field_parameters(atom)
    assert amplitudes == pytest.approx([1., 2.])
    assert phases == pytest.approx([0., -np.pi / 2])
    dark = AtomConfig(levels=[0., 1., 10.], dipoles=[1., 0.])
    with pytest.raises(ValidationError):
        p.field_parameters(dark)


def test_discretize_without_field():
    atom = AtomConfig.default()
    sched = discretize(atom, PulseDesign.null(2.), 8)
    assert len(sched) == 16
    assert sched.duration == pytest.approx(2.)
    assert np.allclose(sched.total_unitary(), np.diag(np.exp(-2j * atom.levels)), atol=1e-12)
    with pytest.raises(ValidationError):
        discretize(atom, PulseDesign.null(), 0)


def test_rwa_fidelity_without_field():
    fidelity = rwa_fidelity(AtomConfig.default(), PulseDesign.null(2.), n_steps=4, states=[[1., 0.], [0.6, 0.8]])
    assert fidelity == pytest.approx(1., abs=1e-12)


def test_rwa_fidelity_convergence_error(monkeypatch):
    monkeypatch.setitem(settings.user_settings, 'rwa_max_steps', 16)
    pulse, _ = design_for_overlap(0.6, amplitude=0.05)
    with pytest.raises(ConvergenceError) as info:
        rwa_fidelity(AtomConfig.default(), pulse, n_steps=4, tol=-1.)
    assert info.value.suggested_steps == 64


def test_rwa_fidelity_warns_when_poor():
    # a strong pulse on nearly degenerate transitions breaks the approximation
    atom = AtomConfig(levels=[0., 0.5, 1.], dipoles=[1., 1.])
    pulse, _ = design_for_overlap(0.6, duration=1.)
    with pytest.warns(RWAWarning):
        rwa_fidelity(atom, pulse, n_steps=64)


@pytest.mark.slow
def test_rwa_fidelity_weak_pulse():
    pulse, _ = design_for_overlap(0.6, amplitude=0.01)
    with warnings.catch_warnings():
        warnings.simplefilter('error', RWAWarning)
        fidelity = rwa_fidelity(AtomConfig.default(), pulse)
    assert fidelity >= 0.999


def test_atom_sweep_without_fidelity():
    overlaps = np.array([0., 0.2, 0.6])
    table = atom_sweep(AtomConfig.default(), overlaps, with_fidelity=False)
    assert table['overlap'].unit == u.dimensionless_unscaled
    assert np.allclose(table['lhs'].value, table['rhs'].value, atol=1e-10)
    assert table['rhs'].value[2] == pytest.approx(np.pi / 3)
    assert np.all(np.isnan(table['fidelity'].value))


if __name__ == '__main__':
    pytest.main(args=[__file__])

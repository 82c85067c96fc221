"""
Lab frame propagation
=====================

Check the rotating wave approximation by propagating the full, time dependent
Hamiltonian of the atom in the field of the pulse.
"""
import logging
import warnings
from typing import Sequence, Tuple
import numpy as np

from .. import settings
from .. import numkernel as nk
from ..dynamics import HamiltonianSchedule
from ..exceptions import ConvergenceError, RWAWarning, ValidationError
from ..sweep import AtomSweep
from ..usd import symmetric_pair
from .atom import AtomConfig
from .pulse import PulseDesign, design_pulse, rwa_unitary, tradeoff_check

# fourth order commutator-free Magnus scheme, two exponentials per step
_NODES = np.array([0.5 - np.sqrt(3) / 6, 0.5 + np.sqrt(3) / 6])
_WEIGHTS = np.array([(3 - 2 * np.sqrt(3)) / 12, (3 + 2 * np.sqrt(3)) / 12])


def field(t, atom: AtomConfig, p: PulseDesign) -> np.ndarray:
    """
    The lab frame field ``sum_i a_i cos(omega_i t + phi_i)``.
    """
    amplitudes, phases = p.field_parameters(atom)
    t = np.asarray(t, dtype=float)
    omega = atom.transition_frequencies
    return np.sum(amplitudes * np.cos(omega * t[..., None] + phases), axis=-1)


def full_hamiltonian_at(t, atom: AtomConfig, p: PulseDesign) -> np.ndarray:
    """
    The lab frame Hamiltonian at time ``t``.

    Parameters
    ----------
    t : float or array_like
        Time or times.
    atom : AtomConfig
        The atom.
    p : PulseDesign
        The pulse.

    Returns
    -------
    np.ndarray
        ``diag(E)`` plus the dipole couplings, shape ``(3, 3)`` or ``t.shape + (3, 3)``.
    """
    eps = field(t, atom, p)
    h = np.zeros(eps.shape + (3, 3), dtype=complex)
    h[..., [0, 1, 2], [0, 1, 2]] = atom.levels
    h[..., 0, 2] = atom.dipoles[0] * eps
    h[..., 1, 2] = atom.dipoles[1] * eps
    h[..., 2, 0] = atom.dipoles[0].conjugate() * eps
    h[..., 2, 1] = atom.dipoles[1].conjugate() * eps
    return h


def discretize(atom: AtomConfig, p: PulseDesign, n_steps: int) -> HamiltonianSchedule:
    """
    A piecewise constant schedule that propagates the lab frame Hamiltonian
    over ``[0, T]`` to fourth order in the step.

    Each of the ``n_steps`` steps becomes two segments of half the step,
    built from the Hamiltonian at the two Gauss-Legendre nodes of the step.
    """
    if n_steps < 1:
        raise ValidationError(f'Need at least one step, got {n_steps}.')
    h = p.duration / n_steps
    starts = np.arange(n_steps) * h
    h1 = full_hamiltonian_at(starts + _NODES[0] * h, atom, p)
    h2 = full_hamiltonian_at(starts + _NODES[1] * h, atom, p)
    first = 2 * (_WEIGHTS[1] * h1 + _WEIGHTS[0] * h2)
    second = 2 * (_WEIGHTS[0] * h1 + _WEIGHTS[1] * h2)
    generators = np.stack([first, second], axis=1).reshape(2 * n_steps, 3, 3)
    return HamiltonianSchedule(generators, np.full(2 * n_steps, h / 2))


def _fidelity(atom: AtomConfig, p: PulseDesign, n_steps: int, states: np.ndarray) -> float:
    lab = discretize(atom, p, n_steps).total_unitary() @ states
    frame = np.exp(-1j * atom.levels * p.duration)[:, None]
    rwa = frame * (rwa_unitary(p) @ states)
    return float(np.min(np.abs(np.sum(lab.conj() * rwa, axis=0))))


def _design_states(p: PulseDesign, states) -> np.ndarray:
    if states is None:
        states = symmetric_pair(p.overlap)
    return np.stack([nk.pad(s, 3) for s in states], axis=1)


def rwa_fidelity(
    atom: AtomConfig,
    p: PulseDesign,
    n_steps: int = None,
    states: Sequence = None,
    tol: float = None,
    min_fidelity: float = 0.999,
    logger: logging.Logger = None
) -> float:
    """
    Agreement between the lab frame evolution and the rotating wave approximation.

    The step count is doubled until two successive fidelities differ by less
    than ``tol``.

    Parameters
    ----------
    atom : AtomConfig
        The atom.
    p : PulseDesign
        The pulse.
    n_steps : int, optional
        The initial step count. Defaults to ``rwa_initial_steps``.
    states : sequence of array_like, optional
        Qubit states to compare. Defaults to the symmetric pair of the design overlap.
    tol : float, optional
        Convergence tolerance. Defaults to ``rwa_convergence``.
    min_fidelity : float
        Below this an ``RWAWarning`` is issued.
    logger : logging.Logger, optional
        Receives the fidelity at every step count.

    Returns
    -------
    float
        The smallest ``|<psi_lab|psi_rwa>|`` over the states.

    Raises
    ------
    ConvergenceError
        If the step count would exceed ``rwa_max_steps``.
    """
    n = settings.get_setting('rwa_initial_steps') if n_steps is None else int(n_steps)
    tol = settings.get_setting('rwa_convergence') if tol is None else tol
    max_steps = settings.get_setting('rwa_max_steps')
    vectors = _design_states(p, states)
    previous = _fidelity(atom, p, n, vectors)
    if logger is not None:
        logger.debug(f'RWA fidelity {previous:.12f} with {n} steps.')
    while True:
        if 2 * n > max_steps:
            raise ConvergenceError(
                f'RWA fidelity did not converge within {max_steps} steps.', suggested_steps=4 * n
            )
        n *= 2
        current = _fidelity(atom, p, n, vectors)
        if logger is not None:
            logger.debug(f'RWA fidelity {current:.12f} with {n} steps.')
        if abs(current - previous) < tol:
            break
        previous = current
    if current < min_fidelity:
        warnings.warn(f'RWA fidelity {current:.6f} is below {min_fidelity}.', RWAWarning)
    return current


def design_for_overlap(
    c: float,
    amplitude: float = 0.01,
    mixing_angle: float = 0.,
    duration: float = None
) -> Tuple[PulseDesign, Tuple[np.ndarray, np.ndarray]]:
    """
    The least action pulse for the symmetric pair of overlap ``c``.

    Orthogonal pairs get the null pulse. A given ``duration`` takes
    precedence over ``amplitude``.
    """
    states = symmetric_pair(c, mixing_angle)
    if c <= settings.get_setting('tol_norm'):
        return PulseDesign.null(1.0 if duration is None else duration), states
    return design_pulse(*states, t=duration, amplitude=amplitude), states


def atom_sweep(
    atom: AtomConfig,
    overlaps,
    amplitude: float = 0.01,
    mixing_angle: float = 0.,
    duration: float = None,
    with_fidelity: bool = True,
    n_steps: int = None,
    logger: logging.Logger = None
) -> AtomSweep:
    """
    Pulse area, minimal area and RWA fidelity over a grid of overlaps.

    Parameters
    ----------
    atom : AtomConfig
        The atom.
    overlaps : array_like
        Overlaps in ``[0, 1)``.
    amplitude : float
        Pulse strength, which sets the duration of every design.
    mixing_angle : float
        Rotation applied to every symmetric pair.
    duration : float, optional
        Pulse length of every design, overriding ``amplitude``.
    with_fidelity : bool
        If False, the fidelity column is NaN.
    n_steps : int, optional
        Initial step count of the RWA check.
    logger : logging.Logger, optional
        Receives one message per overlap.
    """
    overlaps = np.asarray(overlaps, dtype=float)
    lhs = np.zeros_like(overlaps)
    rhs = np.zeros_like(overlaps)
    fidelity = np.full_like(overlaps, np.nan)
    for i, c in enumerate(overlaps):
        pulse, states = design_for_overlap(c, amplitude, mixing_angle, duration)
        report = tradeoff_check(pulse, c)
        lhs[i], rhs[i] = report.lhs, report.rhs
        if with_fidelity:
            fidelity[i] = rwa_fidelity(atom, pulse, n_steps=n_steps, states=states, logger=logger)
        if logger is not None:
            logger.info(f'overlap {c:.6f}: area {lhs[i]:.12f}, minimal {rhs[i]:.12f}, fidelity {fidelity[i]:.9f}')
    return AtomSweep(data={
        'overlap': overlaps * AtomSweep.COLUMNS['overlap'],
        'lhs': lhs * AtomSweep.COLUMNS['lhs'],
        'rhs': rhs * AtomSweep.COLUMNS['rhs'],
        'fidelity': fidelity * AtomSweep.COLUMNS['fidelity'],
    })

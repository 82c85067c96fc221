"""
Two-tone laser pulses
=====================

A pulse resonant with both transitions of a three-level atom couples the
two lower levels to the upper one. In the rotating frame the Hamiltonian is::

    [[0,    0,    A1],
     [0,    0,    A2],
     [A1*,  A2*,  0 ]]

and the upper level plays the part of the ancilla.
"""
from dataclasses import dataclass
from typing import Tuple, Union
import numpy as np
import astropy.units as u

from .. import settings
from .. import numkernel as nk
from .. import units
from ..exceptions import ValidationError, DegenerateDesignError, VerificationError
from .atom import AtomConfig


@dataclass(frozen=True)
class PulseDesign:
    """
    Weighted amplitudes and duration of a two-tone pulse.

    Attributes
    ----------
    amplitudes : np.ndarray
        The rotating frame couplings ``(A1, A2)`` in natural energy units.
    duration : float
        The pulse length ``T``.
    overlap : float
        The overlap of the pair of states the pulse was designed for.
    """
    amplitudes: np.ndarray
    duration: float
    overlap: float = 0.

    def __post_init__(self):
        amplitudes = np.asarray(self.amplitudes, dtype=complex)
        if amplitudes.shape != (2,):
            raise ValidationError(f'Expected two amplitudes, got shape {amplitudes.shape}.')
        object.__setattr__(self, 'amplitudes', amplitudes)
        if not self.duration > 0:
            raise ValidationError(f'Duration must be positive, got {self.duration}.')

    @classmethod
    def null(cls, t: float = 1.0) -> 'PulseDesign':
        """
        No light at all, which already discriminates orthogonal states.
        """
        return cls(amplitudes=np.zeros(2, dtype=complex), duration=t, overlap=0.)

    @property
    def rabi(self) -> float:
        """
        ``sqrt(|A1|^2 + |A2|^2)``.

        :type: float
        """
        return float(np.linalg.norm(self.amplitudes))

    @property
    def area(self) -> float:
        """
        The pulse area ``T sqrt(|A1|^2 + |A2|^2)``.

        :type: float
        """
        return self.rabi * self.duration

    def field_parameters(self, atom: AtomConfig) -> Tuple[np.ndarray, np.ndarray]:
        """
        Amplitudes ``a_i`` and phases ``phi_i`` of the lab frame field.

        With the lab state ``exp(-i diag(E) t)`` times the rotating frame
        state, the tones satisfy ``a_i exp(i phi_i) = 2 A_i / d_i``.

        Raises
        ------
        ValidationError
            If a tone is needed on a transition with zero dipole.
        """
        amplitudes = np.zeros(2)
        phases = np.zeros(2)
        for i in range(2):
            if self.amplitudes[i] == 0:
                continue
            if atom.dipoles[i] == 0:
                raise ValidationError(f'Transition {i + 1} has no dipole but the pulse drives it.')
            tone = 2 * self.amplitudes[i] / atom.dipoles[i]
            amplitudes[i] = abs(tone)
            phases[i] = np.angle(tone)
        return amplitudes, phases

    def to_dict(self) -> dict:
        return {
            'amplitudes': [[z.real, z.imag] for z in self.amplitudes],
            'duration': self.duration,
            'overlap': self.overlap,
            'area': self.area,
        }


def _fix_phase(v: np.ndarray) -> np.ndarray:
    # first non-negligible component real and non-negative
    index = int(np.argmax(np.abs(v) > settings.get_setting('tol_norm')))
    if abs(v[index]) == 0:
        return v
    return v * np.exp(-1j * np.angle(v[index]))


def design_pulse(
    alpha_plus,
    alpha_minus,
    t: Union[float, u.Quantity] = None,
    amplitude: float = None
) -> PulseDesign:
    """
    Design the pulse that discriminates two qubit states with least action.

    The coupling direction is that of ``alpha_plus + alpha_minus`` once the
    phase of ``alpha_minus`` makes their overlap real and non-negative. Only
    the product of strength and duration is fixed, so give either ``t`` or
    the strength ``amplitude``.

    Parameters
    ----------
    alpha_plus, alpha_minus : array_like
        Normalized states of the two lower levels.
    t : float or astropy.units.Quantity, optional
        The pulse length.
    amplitude : float, optional
        The strength ``sqrt(|A1|^2 + |A2|^2)``, used when ``t`` is not given.

    Returns
    -------
    PulseDesign
        The pulse, with ``A1`` real and non-negative (``A2`` when ``A1 = 0``).

    Raises
    ------
    DegenerateDesignError
        If the states are orthogonal or identical.
    ValidationError
        If the states are not normalized qubit states or neither ``t`` nor
        ``amplitude`` is given.
    """
    alpha_plus = nk.require_normalized(alpha_plus, 'alpha_plus')
    alpha_minus = nk.require_normalized(alpha_minus, 'alpha_minus')
    if alpha_plus.size != 2 or alpha_minus.size != 2:
        raise ValidationError('The three-level design needs states of the two lower levels.')
    overlap = np.vdot(alpha_minus, alpha_plus)
    c = min(float(abs(overlap)), 1.)
    tol = settings.get_setting('tol_norm')
    if c <= tol:
        raise DegenerateDesignError('Orthogonal states need no pulse, use PulseDesign.null.')
    if c >= 1 - tol:
        raise DegenerateDesignError('Identical states cannot be discriminated.')
    alpha_minus = alpha_minus * (overlap / abs(overlap))
    direction = _fix_phase(alpha_plus + alpha_minus)
    direction = direction / np.linalg.norm(direction)
    s_min = np.sqrt((1 - c) / (1 + c))
    area = float(nk.angle_from_cosine(s_min))
    if t is None:
        if amplitude is None:
            raise ValidationError('Give either the pulse length or its amplitude.')
        if not amplitude > 0:
            raise ValidationError(f'Amplitude must be positive, got {amplitude}.')
        t = area / amplitude
    t = units.to_natural(t, units.time)
    if not t > 0:
        raise ValidationError(f'Duration must be positive, got {t}.')
    return PulseDesign(amplitudes=direction * (area / t), duration=t, overlap=c)


def rwa_hamiltonian(p: PulseDesign) -> np.ndarray:
    """
    The rotating frame Hamiltonian of a pulse, upper level last.
    """
    h = np.zeros((3, 3), dtype=complex)
    h[:2, 2] = p.amplitudes
    h[2, :2] = p.amplitudes.conj()
    return h


def rwa_unitary(p: PulseDesign) -> np.ndarray:
    """
    ``exp(-i H_RWA T)``.
    """
    return nk.exp_unitary(rwa_hamiltonian(p), p.duration)


def minimal_area(c: float) -> float:
    """
    The least pulse area ``arcsin(sqrt(2c / (1 + c)))`` that discriminates two
    states of overlap ``c``.
    """
    if not 0 <= c <= 1:
        raise ValidationError(f'Overlap must lie in [0, 1], got {c}.')
    return float(np.arctan2(np.sqrt(2 * c), np.sqrt(1 - c)))


@dataclass
class TradeoffReport:
    """
    The pulse area of a design next to the least area for its overlap.
    """
    lhs: float
    rhs: float
    tol: float

    @property
    def passed(self) -> bool:
        return abs(self.lhs - self.rhs) <= self.tol

    def raise_for_status(self):
        if not self.passed:
            raise VerificationError(
                f'Pulse area {self.lhs:.16g} differs from the minimal area {self.rhs:.16g}.', self
            )

    def to_dict(self) -> dict:
        return {'lhs': self.lhs, 'rhs': self.rhs, 'passed': self.passed}


def tradeoff_check(p: PulseDesign, c: float, tol: float = None) -> TradeoffReport:
    """
    Compare ``T sqrt(|A1|^2 + |A2|^2)`` with ``arcsin(sqrt(2c / (1 + c)))``.
    """
    tol = settings.get_setting('tol_orth') if tol is None else tol
    return TradeoffReport(lhs=p.area, rhs=minimal_area(c), tol=tol)

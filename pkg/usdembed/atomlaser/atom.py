"""
Three-level atom
"""
from dataclasses import dataclass
import numpy as np
import astropy.units as u

from .. import settings
from .. import units
from ..exceptions import ValidationError


@dataclass(frozen=True)
class AtomConfig:
    """
    A three-level atom whose two lower levels couple to the third through dipoles.

    Parameters
    ----------
    levels : array_like
        Energies ``E1, E2, E3`` in natural units, or an energy Quantity.
    dipoles : array_like
        Complex couplings ``d1, d2`` of levels 1 and 2 to level 3.

    Raises
    ------
    ValidationError
        If a transition frequency ``E3 - Ei`` is not positive or the two
        frequencies are too close to be addressed separately.
    """
    levels: np.ndarray
    dipoles: np.ndarray

    def __post_init__(self):
        levels = self.levels
        if isinstance(levels, u.Quantity):
            levels = levels.to_value(units.energy)
        levels = np.asarray(levels, dtype=float)
        dipoles = np.asarray(self.dipoles, dtype=complex)
        if levels.shape != (3,) or dipoles.shape != (2,):
            raise ValidationError(f'Expected 3 levels and 2 dipoles, got {levels.shape} and {dipoles.shape}.')
        if not (np.all(np.isfinite(levels)) and np.all(np.isfinite(dipoles))):
            raise ValidationError('Atom parameters must be finite.')
        object.__setattr__(self, 'levels', levels)
        object.__setattr__(self, 'dipoles', dipoles)
        omega = self.transition_frequencies
        if np.any(omega <= 0):
            raise ValidationError(f'Level 3 must lie above levels 1 and 2, transition frequencies {omega.tolist()}.')
        separation = settings.get_setting('transition_separation') * omega.max()
        if abs(omega[0] - omega[1]) < separation:
            raise ValidationError(
                f'Transition frequencies {omega[0]:.16g} and {omega[1]:.16g} are not distinct.'
            )

    @classmethod
    def default(cls) -> 'AtomConfig':
        """
        ``E = (0, 1, 10)`` and unit dipoles.
        """
        return cls(levels=np.array([0., 1., 10.]), dipoles=np.array([1., 1.]))

    @classmethod
    def from_dict(cls, d: dict) -> 'AtomConfig':
        """
        Read ``levels`` and ``dipoles`` (``[re, im]`` pairs) from a dictionary.
        """
        dipoles = [complex(re, im) for re, im in d['dipoles']]
        return cls(levels=np.asarray(d['levels'], dtype=float), dipoles=np.asarray(dipoles))

    def to_dict(self) -> dict:
        return {
            'levels': self.levels.tolist(),
            'dipoles': [[z.real, z.imag] for z in self.dipoles],
        }

    @property
    def transition_frequencies(self) -> np.ndarray:
        """
        ``(E3 - E1, E3 - E2)``.

        :type: np.ndarray
        """
        return self.levels[2] - self.levels[:2]

    @property
    def detuning(self) -> float:
        return float(abs(self.transition_frequencies[0] - self.transition_frequencies[1]))


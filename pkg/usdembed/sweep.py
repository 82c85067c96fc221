"""
Overlap sweeps
==============

Tables of costs as a function of the overlap between two states.
"""
from pathlib import Path
from typing import Dict, Union
import io
import numpy as np

import astropy.units as u
from astropy import table

from .exceptions import ValidationError
from .usd import StateSet, build_lossy, symmetric_two_state_probs, symmetric_pair
from .embedding import cost_report
from . import units


def parse_sweep(text: str) -> np.ndarray:
    """
    Parse ``c_min:c_max:steps`` into a grid of overlaps.

    Raises
    ------
    ValidationError
        If the range is malformed or leaves ``[0, 1]``.

    Examples
    --------
    >>> parse_sweep('0.1:0.9:3').tolist()
    [0.1, 0.5, 0.9]
    """
    parts = text.split(':')
    if len(parts) != 3:
        raise ValidationError(f'Sweep must look like c_min:c_max:steps, got {text!r}.')
    try:
        c_min, c_max, steps = float(parts[0]), float(parts[1]), int(parts[2])
    except ValueError as err:
        raise ValidationError(f'Sweep must look like c_min:c_max:steps, got {text!r}.') from err
    if steps < 1 or not 0 <= c_min <= c_max <= 1:
        raise ValidationError(f'Sweep needs 0 <= c_min <= c_max <= 1 and steps >= 1, got {text!r}.')
    return np.linspace(c_min, c_max, steps)


class _SweepTable(table.QTable):
    """
    A ``QTable`` with fixed columns that round-trips through plain CSV.
    """
    COLUMNS: Dict[str, u.Unit] = {}

    def to_csv(self, path: Union[Path, str, None] = None) -> str:
        """
        Write the table as CSV, to ``path`` if given, and return the text.
        """
        plain = table.Table({name: self[name].to_value(unit) for name, unit in self.COLUMNS.items()})
        buffer = io.StringIO()
        plain.write(buffer, format='ascii.csv')
        text = buffer.getvalue()
        if path is not None:
            Path(path).write_text(text, encoding='utf-8')
        return text

    @classmethod
    def from_bytes(cls, b: bytes):
        """
        Load a table from CSV bytes.
        """
        b = b.replace(b'\r', b'')
        lines = [line for line in b.decode('utf-8').split('\n') if len(line) > 0]
        names = lines[0].split(',')
        if names != list(cls.COLUMNS):
            raise ValidationError(f'Expected columns {list(cls.COLUMNS)}, got {names}.')
        content = np.loadtxt(io.StringIO('\n'.join(lines[1:])), delimiter=',', ndmin=2)
        if content.size == 0:
            content = np.zeros((0, len(names)))
        data = {name: content[:, i] * unit for i, (name, unit) in enumerate(cls.COLUMNS.items())}
        return cls(data=data)

    @classmethod
    def from_file(cls, path: Path):
        with open(path, 'rb') as file:
            content = file.read()
        return cls.from_bytes(content)

    def __getitem__(self, item: str) -> u.Quantity:
        """
        Give a more helpful error message if the column is not in the table.
        """
        try:
            return super().__getitem__(item)
        except KeyError as e:
            msg = f'{item} not in table, acceptable keys are {self.keys()}'
            raise KeyError(msg) from e


class CostSweep(_SweepTable):
    """
    Minimal embedding actions of the symmetric two-state problem versus overlap.
    """
    COLUMNS = {
        'overlap': u.dimensionless_unscaled,
        'spectral_action': units.action,
        'hs_action': units.action,
    }

    @classmethod
    def compute(cls, overlaps) -> 'CostSweep':
        """
        Evaluate the costs at every overlap in ``overlaps``.
        """
        overlaps = np.asarray(overlaps, dtype=float)
        spectral = np.zeros_like(overlaps)
        hs = np.zeros_like(overlaps)
        for i, c in enumerate(overlaps):
            if c >= 1:
                raise ValidationError('Identical states cannot be discriminated.')
            states = StateSet(np.stack(symmetric_pair(c)))
            report = cost_report(build_lossy(states, symmetric_two_state_probs(states)))
            spectral[i] = report.spectral_action
            hs[i] = report.hs_action
        return cls(data={
            'overlap': overlaps * u.dimensionless_unscaled,
            'spectral_action': spectral * units.action,
            'hs_action': hs * units.action,
        })


class AtomSweep(_SweepTable):
    """
    Pulse area tradeoff and RWA fidelity of the three-level atom versus overlap.

    ``lhs`` is the designed pulse area and ``rhs`` the minimal action for the
    overlap. ``fidelity`` is NaN when it was not computed.
    """
    COLUMNS = {
        'overlap': u.dimensionless_unscaled,
        'lhs': units.action,
        'rhs': units.action,
        'fidelity': u.dimensionless_unscaled,
    }

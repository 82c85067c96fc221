"""
File formats
============

JSON problem files, atom scenario files and reports. Complex numbers are
written as ``[re, im]`` pairs.
"""
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path
from typing import Any, Dict, Optional, Union
import json
import math
import numpy as np
from dateutil import parser as dateparser

from . import settings
from .exceptions import ProblemFileError, ValidationError
from .usd import StateSet
from .atomlaser import AtomConfig


def encode_complex(values) -> list:
    """
    Nested ``[re, im]`` lists for a complex array.
    """
    values = np.asarray(values, dtype=complex)
    return np.stack([values.real, values.imag], axis=-1).tolist()


def _load_json(text: str) -> Any:
    try:
        return json.loads(text)
    except json.JSONDecodeError as err:
        raise ProblemFileError(err.msg, f'line {err.lineno} column {err.colno}') from err


def _complex(value, path: str) -> complex:
    if (
        not isinstance(value, (list, tuple)) or len(value) != 2
        or not all(isinstance(x, (int, float)) and not isinstance(x, bool) for x in value)
    ):
        raise ProblemFileError(f'expected an [re, im] pair, got {value!r}', path)
    return complex(value[0], value[1])


def _reals(value, path: str, length: int = None) -> np.ndarray:
    if not isinstance(value, list) or not all(
        isinstance(x, (int, float)) and not isinstance(x, bool) for x in value
    ):
        raise ProblemFileError(f'expected a list of numbers, got {value!r}', path)
    if length is not None and len(value) != length:
        raise ProblemFileError(f'expected {length} numbers, got {len(value)}', path)
    return np.asarray(value, dtype=float)


def _require(d: dict, key: str, path: str = ''):
    if key not in d:
        raise ProblemFileError('missing required field', f'{path}{key}')
    return d[key]


@dataclass
class ProblemFile:
    """
    A USD problem: the states, optionally their priors and the requested
    conclusive probabilities.
    """
    states: StateSet
    probs: Optional[np.ndarray] = None
    scenario: Dict[str, Any] = field(default_factory=dict)

    @classmethod
    def from_text(cls, text: str) -> 'ProblemFile':
        """
        Parse a problem from JSON text.

        Raises
        ------
        ProblemFileError
            With the line and column of a syntax error, or the path of the
            offending field.
        """
        d = _load_json(text)
        if not isinstance(d, dict):
            raise ProblemFileError('expected a JSON object', 'line 1 column 1')
        dim = _require(d, 'dim')
        if not isinstance(dim, int) or isinstance(dim, bool) or dim < 1:
            raise ProblemFileError(f'expected a positive integer, got {dim!r}', 'dim')
        raw_states = _require(d, 'states')
        if not isinstance(raw_states, list) or len(raw_states) != dim:
            raise ProblemFileError(f'expected {dim} states', 'states')
        states = np.zeros((dim, dim), dtype=complex)
        for i, state in enumerate(raw_states):
            if not isinstance(state, list) or len(state) != dim:
                raise ProblemFileError(f'expected {dim} components', f'states[{i}]')
            for j, value in enumerate(state):
                states[i, j] = _complex(value, f'states[{i}][{j}]')
        priors = _reals(d['priors'], 'priors', dim) if 'priors' in d else None
        probs = _reals(d['probs'], 'probs', dim) if 'probs' in d else None
        scenario = d.get('scenario', {})
        if not isinstance(scenario, dict):
            raise ProblemFileError('expected an object', 'scenario')
        try:
            state_set = StateSet(states, priors)
        except ValidationError as err:
            raise type(err)(f'states: {err}') from err
        return cls(states=state_set, probs=probs, scenario=scenario)

    @classmethod
    def from_file(cls, path: Union[Path, str]) -> 'ProblemFile':
        return cls.from_text(Path(path).read_text(encoding='utf-8'))

    def to_dict(self) -> dict:
        d = {
            'dim': self.states.dim,
            'states': encode_complex(self.states.states),
            'priors': self.states.priors.tolist(),
        }
        if self.probs is not None:
            d['probs'] = self.probs.tolist()
        if self.scenario:
            d['scenario'] = self.scenario
        return d


@dataclass
class AtomFile:
    """
    A three-level atom scenario and the overlaps to sweep.
    """
    atom: AtomConfig
    overlap_sweep: Optional[str] = None
    amplitude: float = 0.01
    duration: Optional[float] = None
    mixing_angle: float = 0.

    @classmethod
    def from_text(cls, text: str) -> 'AtomFile':
        d = _load_json(text)
        if not isinstance(d, dict):
            raise ProblemFileError('expected a JSON object', 'line 1 column 1')
        levels = _reals(_require(d, 'levels'), 'levels', 3)
        raw_dipoles = _require(d, 'dipoles')
        if not isinstance(raw_dipoles, list) or len(raw_dipoles) != 2:
            raise ProblemFileError('expected 2 dipoles', 'dipoles')
        dipoles = np.array([_complex(value, f'dipoles[{i}]') for i, value in enumerate(raw_dipoles)])
        sweep = d.get('overlap_sweep')
        if sweep is not None and not isinstance(sweep, str):
            raise ProblemFileError('expected a c_min:c_max:steps string', 'overlap_sweep')
        scalars = {}
        for key in ('amplitude', 'duration', 'mixing_angle'):
            if key in d:
                value = d[key]
                if not isinstance(value, (int, float)) or isinstance(value, bool):
                    raise ProblemFileError(f'expected a number, got {value!r}', key)
                scalars[key] = float(value)
        try:
            atom = AtomConfig(levels=levels, dipoles=dipoles)
        except ValidationError as err:
            raise ProblemFileError(str(err), 'levels') from err
        return cls(atom=atom, overlap_sweep=sweep, **scalars)

    @classmethod
    def from_file(cls, path: Union[Path, str]) -> 'AtomFile':
        return cls.from_text(Path(path).read_text(encoding='utf-8'))

    def to_dict(self) -> dict:
        d = self.atom.to_dict()
        d.update({'overlap_sweep': self.overlap_sweep, 'amplitude': self.amplitude,
                  'duration': self.duration, 'mixing_angle': self.mixing_angle})
        return d


def _check_finite(value, path: str = 'report'):
    if isinstance(value, bool) or value is None or isinstance(value, str):
        return
    if isinstance(value, (int, float)):
        if not math.isfinite(value):
            raise ValidationError(f'{path} is not finite.')
    elif isinstance(value, dict):
        for key, item in value.items():
            _check_finite(item, f'{path}.{key}')
    elif isinstance(value, (list, tuple)):
        for i, item in enumerate(value):
            _check_finite(item, f'{path}[{i}]')


def _now() -> datetime:
    return datetime.now(timezone.utc)


@dataclass
class ReportFile:
    """
    The machine readable result of a command.

    Attributes
    ----------
    command : str
        The subcommand that produced the report.
    seed : int or None
        The seed used, if any randomness was involved.
    inputs : dict
        Echo of the inputs.
    results : dict
        Costs, statistics and other numbers.
    checks : dict
        Pass or fail of every check that was run.
    schema_version : str
        Version of this layout.
    created : datetime.datetime
        Time of creation, timezone aware.
    """
    command: str
    seed: Optional[int] = None
    inputs: Dict[str, Any] = field(default_factory=dict)
    results: Dict[str, Any] = field(default_factory=dict)
    checks: Dict[str, bool] = field(default_factory=dict)
    schema_version: str = field(default_factory=lambda: settings.get_setting('schema_version'))
    created: datetime = field(default_factory=_now)

    @property
    def passed(self) -> bool:
        return all(self.checks.values())

    def to_dict(self) -> dict:
        """
        Raises
        ------
        ValidationError
            If a numeric field is not finite.
        """
        d = {
            'schema_version': self.schema_version,
            'command': self.command,
            'created': self.created.isoformat(),
            'seed': self.seed,
            'inputs': self.inputs,
            'results': self.results,
            'checks': self.checks,
            'passed': self.passed,
        }
        _check_finite(d)
        return d

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)

    def write(self, path: Union[Path, str]):
        Path(path).write_text(self.to_json() + '\n', encoding='utf-8')

    @classmethod
    def from_dict(cls, d: dict) -> 'ReportFile':
        return cls(
            command=d['command'],
            seed=d.get('seed'),
            inputs=d.get('inputs', {}),
            results=d.get('results', {}),
            checks=d.get('checks', {}),
            schema_version=d['schema_version'],
            created=dateparser.isoparse(d['created'])
        )

    @classmethod
    def from_json(cls, text: str) -> 'ReportFile':
        return cls.from_dict(_load_json(text))

    @classmethod
    def from_file(cls, path: Union[Path, str]) -> 'ReportFile':
        return cls.from_json(Path(path).read_text(encoding='utf-8'))

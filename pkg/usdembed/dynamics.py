"""
Dynamics
========

Piecewise-constant Hamiltonian schedules, their norm actions, and Monte Carlo
simulation of the discrimination protocol.
"""
import logging
from typing import Iterable, List, Tuple, Union
from dataclasses import dataclass
from concurrent.futures import ThreadPoolExecutor
import numpy as np

from . import settings
from . import numkernel as nk
from .numkernel import NormKind
from .usd import StateSet, LossyOperator, validate_usd
from .embedding import CanonicalEmbedding, optimal_hamiltonian, cost_report
from .exceptions import ValidationError, VerificationError, ScheduleMismatchError


class HamiltonianSchedule:
    """
    A sequence of constant Hamiltonians, each applied for a positive duration.

    Parameters
    ----------
    generators : array_like
        Hermitian generators, shape ``(m, d, d)``.
    durations : array_like
        Positive durations, shape ``(m,)``.
    dim : int, optional
        The dimension, required only for an empty schedule.

    Raises
    ------
    ValidationError
        If a generator is not Hermitian or a duration is not positive.
    """
    def __init__(self, generators, durations, dim: int = None):
        durations = np.atleast_1d(np.asarray(durations, dtype=float))
        if len(durations) == 0:
            if dim is None:
                raise ValidationError('An empty schedule needs an explicit dimension.')
            generators = np.zeros((0, dim, dim), dtype=complex)
        else:
            generators = np.asarray(generators, dtype=complex)
            if generators.ndim == 2:
                generators = generators[None]
            generators = nk.require_hermitian(generators, 'generators')
        if generators.ndim != 3 or generators.shape[0] != durations.shape[0]:
            raise ValidationError(
                f'Got {generators.shape[0]} generators but {durations.shape[0]} durations.'
            )
        if np.any(~(durations > 0)):
            raise ValidationError(f'Durations must be positive, got {durations.tolist()}.')
        if dim is not None and generators.shape[-1] != dim:
            raise ValidationError(f'Generators have dimension {generators.shape[-1]}, expected {dim}.')
        self.generators = generators
        self.durations = durations

    @classmethod
    def from_constant(cls, h, t: float) -> 'HamiltonianSchedule':
        """
        A single segment schedule.
        """
        return cls(np.asarray(h)[None], [t])

    @classmethod
    def empty(cls, dim: int) -> 'HamiltonianSchedule':
        return cls(np.zeros((0, dim, dim)), [], dim=dim)

    @property
    def dim(self) -> int:
        return self.generators.shape[-1]

    @property
    def duration(self) -> float:
        return float(self.durations.sum())

    def __len__(self):
        return self.durations.shape[0]

    @property
    def segments(self) -> List[Tuple[np.ndarray, float]]:
        return list(zip(self.generators, self.durations.tolist()))

    def split(self, n: int) -> 'HamiltonianSchedule':
        """
        Divide every segment into ``n`` equal parts.
        """
        if n < 1:
            raise ValidationError(f'Cannot split a segment into {n} parts.')
        return HamiltonianSchedule(
            np.repeat(self.generators, n, axis=0),
            np.repeat(self.durations / n, n),
            dim=self.dim
        )

    def concatenate(self, other: 'HamiltonianSchedule') -> 'HamiltonianSchedule':
        """
        ``self`` followed by ``other`` in time.
        """
        if other.dim != self.dim:
            raise ValidationError(f'Cannot join schedules of dimension {self.dim} and {other.dim}.')
        return HamiltonianSchedule(
            np.concatenate([self.generators, other.generators]),
            np.concatenate([self.durations, other.durations]),
            dim=self.dim
        )

    def __add__(self, other):
        return self.concatenate(other)

    def step_unitaries(self) -> np.ndarray:
        """
        The propagator of every segment, shape ``(m, d, d)``.
        """
        if len(self) == 0:
            return np.zeros((0, self.dim, self.dim), dtype=complex)
        return nk.exp_unitary(self.generators, self.durations)

    def total_unitary(self) -> np.ndarray:
        """
        The time ordered product of all segment propagators, latest on the left.
        """
        return time_ordered_product(self.step_unitaries(), self.dim)

    def norms(self, kind: Union[NormKind, str] = NormKind.SPECTRAL) -> np.ndarray:
        return np.array([nk.matrix_norm(h, kind) for h in self.generators])

    def __repr__(self):
        return f'HamiltonianSchedule(dim={self.dim}, segments={len(self)}, duration={self.duration:.6g})'


def time_ordered_product(unitaries: np.ndarray, dim: int) -> np.ndarray:
    """
    ``U_{m-1} ... U_1 U_0`` computed as a pairwise tree of batched products.
    """
    stack = np.asarray(unitaries, dtype=complex)
    if stack.shape[0] == 0:
        return np.eye(dim, dtype=complex)
    while stack.shape[0] > 1:
        odd = stack.shape[0] % 2
        paired = stack[1::2] @ stack[0:stack.shape[0] - odd:2]
        stack = np.concatenate([paired, stack[-1:]]) if odd else paired
    return stack[0]


def propagate(sched: HamiltonianSchedule, psi0) -> np.ndarray:
    """
    Evolve a state through a schedule.

    Parameters
    ----------
    sched : HamiltonianSchedule
        The schedule.
    psi0 : array_like
        Normalized initial state of length ``sched.dim``.

    Returns
    -------
    np.ndarray
        The final state.

    Raises
    ------
    ValidationError
        If the state has the wrong length or is not normalized.
    """
    psi0 = nk.require_normalized(psi0, 'psi0')
    if psi0.size != sched.dim:
        raise ValidationError(f'State has length {psi0.size}, schedule acts on {sched.dim}.')
    psi = psi0.copy()
    for step in sched.step_unitaries():
        psi = step @ psi
    return psi


def schedule_action(sched: HamiltonianSchedule, norm_kind: Union[NormKind, str] = NormKind.SPECTRAL) -> float:
    """
    The norm action ``sum_k ||H_k|| dt_k``.
    """
    if len(sched) == 0:
        return 0.
    return float(np.dot(sched.norms(norm_kind), sched.durations))


def fubini_angle(psi_in, psi_out) -> float:
    """
    The Fubini-Study angle ``arccos|<psi_in|psi_out>|`` in ``[0, pi/2]``.

    Raises
    ------
    ValidationError
        If either state is not normalized.
    """
    psi_in = nk.require_normalized(psi_in, 'psi_in')
    psi_out = nk.require_normalized(psi_out, 'psi_out')
    if psi_in.size != psi_out.size:
        raise ValidationError(f'States have lengths {psi_in.size} and {psi_out.size}.')
    return float(nk.angle_from_cosine(min(abs(np.vdot(psi_in, psi_out)), 1.)))


@dataclass
class LowerBoundReport:
    """
    Comparison of a schedule's action with the minimal action of its target.

    Attributes
    ----------
    schedule_action : float
        The spectral action of the schedule.
    minimal_action : float
        The minimal spectral action of the target.
    singular_value_error : float
        Largest difference between the singular values of the realized
        system block and those of the target.
    slack : float
        Tolerance allowed below the bound.
    """
    schedule_action: float
    minimal_action: float
    singular_value_error: float
    slack: float

    @property
    def surplus(self) -> float:
        return self.schedule_action - self.minimal_action

    @property
    def passed(self) -> bool:
        return self.surplus >= -self.slack

    def raise_for_status(self):
        if not self.passed:
            raise VerificationError(
                f'Schedule action {self.schedule_action:.16g} is below the bound {self.minimal_action:.16g}.',
                self
            )

    def to_dict(self) -> dict:
        return {
            'schedule_action': self.schedule_action,
            'minimal_action': self.minimal_action,
            'surplus': self.surplus,
            'singular_value_error': self.singular_value_error,
            'passed': self.passed,
        }


def verify_lower_bound(
    sched: HamiltonianSchedule,
    k: Union[LossyOperator, np.ndarray],
    tol: float = None
) -> LowerBoundReport:
    """
    Check that a schedule realizing ``K`` spends at least the minimal action.

    Parameters
    ----------
    sched : HamiltonianSchedule
        A schedule on the system plus an ancilla, system levels first.
    k : LossyOperator or array_like
        The target operator.
    tol : float, optional
        Tolerance on the singular values of the realized block. Defaults to ``bound_slack``.

    Returns
    -------
    LowerBoundReport
        The comparison. Call ``raise_for_status`` to assert the bound.

    Raises
    ------
    ScheduleMismatchError
        If the schedule does not realize ``K`` up to a left unitary.
    """
    k = k if isinstance(k, LossyOperator) else LossyOperator(k)
    tol = settings.get_setting('bound_slack') if tol is None else tol
    if sched.dim < k.dim:
        raise ValidationError(f'Schedule dimension {sched.dim} is smaller than the system {k.dim}.')
    block = sched.total_unitary()[:k.dim, :k.dim]
    error = float(np.max(np.abs(nk.singular_values(block) - k.singulars))) if k.dim else 0.
    if error > tol:
        raise ScheduleMismatchError(
            f'Schedule does not realize the target: singular values differ by {error:.3e}.'
        )
    return LowerBoundReport(
        schedule_action=schedule_action(sched, NormKind.SPECTRAL),
        minimal_action=cost_report(k).spectral_action,
        singular_value_error=error,
        slack=settings.get_setting('bound_slack')
    )


def _random_detour(e: CanonicalEmbedding, rng: np.random.Generator) -> Tuple[np.ndarray, float]:
    h_sys = nk.random_hermitian(e.n_sys, rng, norm=rng.uniform(0.1, 1.0))
    h_anc = nk.random_hermitian(e.n_anc, rng, norm=rng.uniform(0.1, 1.0))
    return nk.block_diag(h_sys, h_anc), float(rng.uniform(0.1, 1.0))


def random_realizing_schedule(
    e: CanonicalEmbedding,
    n_segments: int,
    rng: np.random.Generator
) -> HamiltonianSchedule:
    """
    A random schedule whose system block has the singular values of ``e``.

    The optimal Hamiltonian is applied once, surrounded by block diagonal
    detours that act on the system and the ancilla separately.
    """
    if n_segments < 1:
        raise ValidationError(f'Need at least one segment, got {n_segments}.')
    h_opt = optimal_hamiltonian(e, float(rng.uniform(0.5, 2.0)))
    n_before = int(rng.integers(0, n_segments))
    detours = [_random_detour(e, rng) for _ in range(n_segments - 1)]
    segments = detours[:n_before] + [(h_opt.matrix, h_opt.duration)] + detours[n_before:]
    generators, durations = zip(*segments)
    return HamiltonianSchedule(np.stack(generators), durations)


@dataclass
class MeasurementRecord:
    """
    Outcome statistics of a simulated discrimination run.

    Attributes
    ----------
    trials : int
        The number of trials.
    conclusive_counts : np.ndarray
        The number of times each conclusive outcome was observed.
    inconclusive : int
        The number of inconclusive outcomes.
    errors : int
        Conclusive outcomes that named the wrong state.
    seed : int
        The seed the run was drawn from.
    expected_inconclusive : float
        The inconclusive probability predicted from the priors.
    """
    trials: int
    conclusive_counts: np.ndarray
    inconclusive: int
    errors: int
    seed: int
    expected_inconclusive: float

    def __post_init__(self):
        self.conclusive_counts = np.asarray(self.conclusive_counts, dtype=int)
        if int(self.conclusive_counts.sum()) + self.inconclusive != self.trials:
            raise ValidationError('Outcome counts do not sum to the number of trials.')

    @property
    def inconclusive_frequency(self) -> float:
        return self.inconclusive / self.trials if self.trials else 0.

    @property
    def sigma(self) -> float:
        """
        Binomial standard deviation of the inconclusive frequency.

        :type: float
        """
        p = self.expected_inconclusive
        return float(np.sqrt(p * (1 - p) / self.trials)) if self.trials else 0.

    def within_sigma(self, n_sigma: float = 4.) -> bool:
        deviation = abs(self.inconclusive_frequency - self.expected_inconclusive)
        return deviation <= n_sigma * self.sigma + 0.5 / max(self.trials, 1)

    @property
    def passed(self) -> bool:
        return self.errors == 0 and self.within_sigma()

    def raise_for_status(self):
        if self.errors:
            raise VerificationError(f'{self.errors} conclusive outcomes named the wrong state.', self)
        if not self.within_sigma():
            raise VerificationError(
                f'Inconclusive frequency {self.inconclusive_frequency:.6f} is more than 4 sigma '
                f'from the expected {self.expected_inconclusive:.6f}.',
                self
            )

    def to_dict(self) -> dict:
        return {
            'trials': self.trials,
            'conclusive_counts': self.conclusive_counts.tolist(),
            'inconclusive': self.inconclusive,
            'errors': self.errors,
            'seed': self.seed,
            'expected_inconclusive': self.expected_inconclusive,
        }

    @classmethod
    def from_dict(cls, d: dict) -> 'MeasurementRecord':
        return cls(
            trials=int(d['trials']),
            conclusive_counts=np.asarray(d['conclusive_counts'], dtype=int),
            inconclusive=int(d['inconclusive']),
            errors=int(d['errors']),
            seed=int(d['seed']),
            expected_inconclusive=float(d['expected_inconclusive'])
        )


def conclusive_basis(k: Union[LossyOperator, np.ndarray], s: StateSet, tol: float = None) -> np.ndarray:
    """
    Orthonormal measurement directions ``K alpha_i / ||K alpha_i||`` as columns.

    Directions of states that are never detected are completed to a basis.

    Raises
    ------
    VerificationError
        If the outputs are not orthogonal.
    """
    tol = settings.get_setting('tol_orth') if tol is None else tol
    matrix = k.matrix if isinstance(k, LossyOperator) else nk.as_matrix(k)
    validate_usd(matrix, s).raise_for_status()
    outputs = matrix @ s.states.T
    norms = np.linalg.norm(outputs, axis=0)
    live = norms > tol
    basis = np.zeros_like(outputs)
    basis[:, live] = outputs[:, live] / norms[live]
    if not np.all(live):
        q, _ = np.linalg.qr(np.hstack([basis[:, live], np.eye(s.dim)]))
        basis[:, ~live] = q[:, int(live.sum()):s.dim]
    return basis


def outcome_distribution(
    u_mat: np.ndarray,
    s: StateSet,
    output_basis: np.ndarray
) -> np.ndarray:
    """
    Probability of every outcome given each true state, shape ``(N, N + 1)``.

    The last column is the inconclusive outcome, any click on an ancilla level.
    """
    n = s.dim
    inputs = np.zeros((u_mat.shape[0], n), dtype=complex)
    inputs[:n] = s.states.T
    outputs = u_mat @ inputs
    conclusive = np.abs(output_basis.conj().T @ outputs[:n]) ** 2
    inconclusive = np.sum(np.abs(outputs[n:]) ** 2, axis=0)
    dist = np.vstack([conclusive, inconclusive[None]]).T
    dist = np.clip(dist, 0., None)
    return dist / dist.sum(axis=1, keepdims=True)


def _sample_block(
    start: int,
    n_trials: int,
    seed: int,
    priors: np.ndarray,
    cdf: np.ndarray
) -> Tuple[np.ndarray, int]:
    # trial i owns doubles 2i and 2i+1 of the Philox stream keyed by seed;
    # each counter step yields four, so even starts begin at counter start // 2
    rng = np.random.Generator(np.random.Philox(key=seed, counter=start // 2))
    draws = rng.random((n_trials, 2))
    labels = np.minimum(np.searchsorted(np.cumsum(priors), draws[:, 0], side='right'), priors.size - 1)
    outcomes = np.minimum(np.sum(draws[:, 1, None] >= cdf[labels], axis=1), priors.size)
    counts = np.bincount(outcomes, minlength=priors.size + 1)
    errors = int(np.sum((outcomes < priors.size) & (outcomes != labels)))
    return counts, errors


def _blocks(trials: int, block_size: int) -> Iterable[Tuple[int, int]]:
    step = max(2, block_size + block_size % 2)
    for start in range(0, trials, step):
        yield start, min(step, trials - start)


def simulate_discrimination(
    s: StateSet,
    e: Union[CanonicalEmbedding, np.ndarray],
    trials: int = None,
    seed: int = None,
    output_basis=None,
    workers: int = None,
    logger: logging.Logger = None
) -> MeasurementRecord:
    """
    Simulate preparing, evolving and measuring the states many times.

    Each trial draws a label from the priors, evolves the labelled state with
    the ancilla in its ground level and measures the system in the conclusive
    basis and the ancilla in its level basis.

    Parameters
    ----------
    s : StateSet
        The states and their priors.
    e : CanonicalEmbedding or np.ndarray
        The embedding, or any unitary whose upper left block discriminates ``s``.
    trials : int, optional
        Number of trials. Defaults to the ``default_trials`` setting.
    seed : int, optional
        Non-negative seed. Defaults to the ``default_seed`` setting. Every
        trial is drawn from its own counter position, so the record depends
        only on the seed and the number of trials.
    output_basis : array_like, optional
        Conclusive measurement directions as columns. Defaults to
        :func:`conclusive_basis` of the system block for an embedding and the
        standard basis for a bare unitary.
    workers : int, optional
        Threads used to draw blocks of trials. The record does not depend on it.
    logger : logging.Logger, optional
        Receives progress messages.

    Returns
    -------
    MeasurementRecord
        The observed counts.

    Raises
    ------
    VerificationError
        If the system block does not map the states to orthogonal outputs.
    """
    trials = settings.get_setting('default_trials') if trials is None else int(trials)
    seed = settings.get_setting('default_seed') if seed is None else int(seed)
    if not 0 <= seed < 2**128:
        raise ValidationError(f'Seed must be a non-negative integer below 2**128, got {seed}.')
    if trials < 1:
        raise ValidationError(f'Need at least one trial, got {trials}.')
    if isinstance(e, CanonicalEmbedding):
        u_mat = e.matrix
        block = e.system_block
        if e.n_sys != s.dim:
            raise ValidationError(f'Embedding acts on {e.n_sys} levels, states have dimension {s.dim}.')
    else:
        u_mat = nk.require_unitary(e, 'u')
        if u_mat.shape[0] < s.dim:
            raise ValidationError(f'Unitary of size {u_mat.shape[0]} cannot hold states of dimension {s.dim}.')
        block = u_mat[:s.dim, :s.dim]
    validate_usd(block, s).raise_for_status()
    if output_basis is None:
        output_basis = conclusive_basis(block, s) if isinstance(e, CanonicalEmbedding) else np.eye(s.dim)
    output_basis = nk.require_unitary(output_basis, 'output_basis')

    dist = outcome_distribution(u_mat, s, output_basis)
    cdf = np.cumsum(dist, axis=1)
    cdf[:, -1] = 1.
    expected = float(np.dot(s.priors, dist[:, -1]))
    block_size = settings.get_setting('block_size')
    blocks = list(_blocks(trials, block_size))
    if logger is not None:
        logger.info(f'Simulating {trials} trials in {len(blocks)} blocks (seed {seed}).')

    def run(item):
        start, n = item
        return _sample_block(start, n, seed, s.priors, cdf)

    if workers is not None and workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(run, blocks))
    else:
        results = [run(item) for item in blocks]

    counts = np.sum([c for c, _ in results], axis=0)
    errors = sum(err for _, err in results)
    record = MeasurementRecord(
        trials=trials,
        conclusive_counts=counts[:-1],
        inconclusive=int(counts[-1]),
        errors=errors,
        seed=seed,
        expected_inconclusive=expected
    )
    if logger is not None:
        logger.info(
            f'Inconclusive frequency {record.inconclusive_frequency:.6f} '
            f'(expected {expected:.6f}), {errors} errors.'
        )
    return record

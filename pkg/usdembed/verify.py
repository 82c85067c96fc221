"""
Verification suite
==================

Named numerical checks that an embedding of a lossy operator is optimal and
consistent with the other views of the same measurement.
"""
import logging
from dataclasses import dataclass, field
from typing import Callable, Dict, List
import numpy as np

from . import settings
from . import numkernel as nk
from .numkernel import NormKind
from .usd import LossyOperator
from .embedding import (
    CanonicalEmbedding,
    CostReport,
    canonical_embedding,
    cost_report,
    exact_embedding,
    optimal_hamiltonian,
    perturbed_embedding,
    unitary_action,
    rotation_angle,
    reduce_ancilla,
    extend_ancilla
)
from .dynamics import HamiltonianSchedule, random_realizing_schedule, verify_lower_bound
from .neumark import equivalence_check, concentration_cost
from .exceptions import ValidationError, VerificationError, ScheduleMismatchError


@dataclass
class PropertyResult:
    """
    The outcome of one named check.
    """
    name: str
    passed: bool
    detail: str = ''

    def to_dict(self) -> dict:
        return {'name': self.name, 'passed': bool(self.passed), 'detail': self.detail}


@dataclass
class VerificationReport:
    """
    All checks run on one lossy operator.
    """
    results: List[PropertyResult] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(result.passed for result in self.results)

    @property
    def failures(self) -> List[str]:
        return [result.name for result in self.results if not result.passed]

    @property
    def checks(self) -> Dict[str, bool]:
        return {result.name: bool(result.passed) for result in self.results}

    def raise_for_status(self):
        if not self.passed:
            raise VerificationError(f'Failed properties: {", ".join(self.failures)}.', self)

    def to_dict(self) -> dict:
        return {
            'passed': self.passed,
            'failures': self.failures,
            'results': [result.to_dict() for result in self.results],
        }


@dataclass
class _Context:
    k: LossyOperator
    embedding: CanonicalEmbedding
    costs: CostReport
    rng: np.random.Generator
    samples: int


def _optimality(ctx: _Context, kind: NormKind) -> PropertyResult:
    name = f'optimality_{kind.value}'
    slack = settings.get_setting('bound_slack')
    target = ctx.costs.action(kind)
    at_identity = unitary_action(ctx.embedding.matrix, kind)
    if abs(at_identity - target) > settings.get_setting('tol_unitary'):
        return PropertyResult(name, False, f'unperturbed action {at_identity:.16g} != {target:.16g}')
    worst = np.inf
    for _ in range(ctx.samples):
        u_s = nk.random_unitary(ctx.embedding.n_sys, ctx.rng)
        u_a = nk.random_unitary(ctx.embedding.n_anc, ctx.rng)
        worst = min(worst, unitary_action(perturbed_embedding(ctx.embedding, u_s, u_a), kind))
    passed = worst >= target - slack
    return PropertyResult(name, passed, f'least sampled action {worst:.16g}, minimal {target:.16g}')


def optimality_spectral(ctx: _Context) -> PropertyResult:
    return _optimality(ctx, NormKind.SPECTRAL)


def optimality_hs(ctx: _Context) -> PropertyResult:
    return _optimality(ctx, NormKind.HS)


def lower_bound(ctx: _Context) -> PropertyResult:
    try:
        return _lower_bound(ctx)
    except ScheduleMismatchError as err:
        return PropertyResult('lower_bound', False, str(err))


def _lower_bound(ctx: _Context) -> PropertyResult:
    h_opt = optimal_hamiltonian(ctx.embedding)
    direct = verify_lower_bound(HamiltonianSchedule.from_constant(h_opt.matrix, h_opt.duration), ctx.k)
    if abs(direct.surplus) > settings.get_setting('bound_slack'):
        return PropertyResult('lower_bound', False, f'optimal schedule misses the bound by {direct.surplus:.3e}')
    least = np.inf
    for _ in range(min(ctx.samples, 100)):
        sched = random_realizing_schedule(ctx.embedding, int(ctx.rng.integers(2, 11)), ctx.rng)
        report = verify_lower_bound(sched, ctx.k)
        if not report.passed:
            return PropertyResult('lower_bound', False, f'schedule action {report.schedule_action:.16g} below bound')
        least = min(least, report.surplus)
    return PropertyResult('lower_bound', True, f'least surplus {least:.3e}')


def neumark_probabilities(ctx: _Context) -> PropertyResult:
    worst = 0.
    for u in (exact_embedding(ctx.k), ctx.embedding.matrix):
        report = equivalence_check(ctx.k, u, n_states_samples=20, rng=ctx.rng)
        if not report.passed:
            return PropertyResult('neumark_probabilities', False, str(report.to_dict()))
        worst = max(worst, report.conclusive_error, report.inconclusive_error)
    return PropertyResult('neumark_probabilities', True, f'largest probability error {worst:.3e}')


def concentration(ctx: _Context) -> PropertyResult:
    try:
        cost = concentration_cost(exact_embedding(ctx.k), ctx.k.dim)
    except VerificationError as err:
        return PropertyResult('concentration_cost', False, str(err))
    embedded = unitary_action(ctx.embedding.matrix)
    passed = abs(cost - embedded) <= settings.get_setting('tol_unitary')
    return PropertyResult('concentration_cost', passed, f'concentration {cost:.16g}, embedding {embedded:.16g}')


def generator(ctx: _Context) -> PropertyResult:
    w = ctx.embedding.matrix
    if w.size == 0:
        return PropertyResult('generator', True, 'empty embedding')
    h_opt = optimal_hamiltonian(ctx.embedding)
    tol = settings.get_setting('tol_unitary')
    forward = float(np.max(np.abs(h_opt.propagator() - w)))
    backward = float(np.max(np.abs(nk.log_unitary(w) + 1j * h_opt.matrix * h_opt.duration)))
    passed = forward <= tol and backward <= 10 * tol
    return PropertyResult('generator', passed, f'exp error {forward:.3e}, log error {backward:.3e}')


def ancilla_reduce(ctx: _Context) -> PropertyResult:
    reduced = reduce_ancilla(ctx.embedding)
    n_unit = int(np.sum(nk.rotation_angles(ctx.k.singulars) < settings.get_setting('theta_reduce_tol')))
    expected = ctx.k.dim - n_unit
    block_error = float(np.max(np.abs(reduced.system_block - ctx.embedding.system_block))) if ctx.k.dim else 0.
    unitary = nk.is_unitary(reduced.matrix)
    passed = reduced.n_anc == expected and block_error <= settings.get_setting('tol_recon') and unitary
    return PropertyResult(
        'ancilla_reduce', passed,
        f'n_anc {reduced.n_anc} (expected {expected}), block change {block_error:.3e}, unitary {unitary}'
    )


def ancilla_extend(ctx: _Context) -> PropertyResult:
    before = optimal_hamiltonian(ctx.embedding)
    after = optimal_hamiltonian(extend_ancilla(ctx.embedding, ctx.embedding.n_anc + 2))
    diffs = [abs(before.action(kind) - after.action(kind)) for kind in NormKind]
    passed = max(diffs) <= settings.get_setting('tol_recon')
    return PropertyResult('ancilla_extend', passed, f'action changes {diffs[0]:.3e} and {diffs[1]:.3e}')


def rotation_witness(ctx: _Context) -> PropertyResult:
    if ctx.k.dim == 0:
        return PropertyResult('rotation_witness', True, 'empty system')
    singular = nk.svd(ctx.k.matrix)
    psi = singular.right[:, -1]
    angle = rotation_angle(psi, ctx.embedding)
    target = ctx.costs.spectral_action
    # compare cosines, the angle is ill conditioned near zero
    passed = abs(np.cos(angle) - np.cos(target)) <= settings.get_setting('tol_unitary')
    return PropertyResult('rotation_witness', passed, f'rotation {angle:.16g}, minimal action {target:.16g}')


PROPERTIES: Dict[str, Callable[[_Context], PropertyResult]] = {
    'optimality_spectral': optimality_spectral,
    'optimality_hs': optimality_hs,
    'lower_bound': lower_bound,
    'neumark_probabilities': neumark_probabilities,
    'concentration_cost': concentration,
    'generator': generator,
    'ancilla_reduce': ancilla_reduce,
    'ancilla_extend': ancilla_extend,
    'rotation_witness': rotation_witness,
}


def run_suite(
    k,
    samples: int = 200,
    seed: int = None,
    theta_scale: float = 1.0,
    properties: List[str] = None,
    logger: logging.Logger = None
) -> VerificationReport:
    """
    Run the named checks on the canonical embedding of ``K``.

    Parameters
    ----------
    k : LossyOperator or array_like
        The lossy operator.
    samples : int
        Random perturbations per sampled property.
    seed : int, optional
        Seed of the samples. Defaults to ``default_seed``.
    theta_scale : float
        Multiplies the rotation angles of the embedding under test. Any value
        other than one breaks optimality and is meant for exercising failures.
    properties : list of str, optional
        Names from ``PROPERTIES``. Defaults to all of them.
    logger : logging.Logger, optional
        Receives one message per property.

    Returns
    -------
    VerificationReport
        One result per property.
    """
    k = k if isinstance(k, LossyOperator) else LossyOperator(k)
    seed = settings.get_setting('default_seed') if seed is None else int(seed)
    if seed < 0:
        raise ValidationError(f'Seed must be non-negative, got {seed}.')
    embedding = canonical_embedding(k)
    if theta_scale != 1.0:
        embedding = embedding.with_theta(embedding.theta * theta_scale)
    ctx = _Context(
        k=k,
        embedding=embedding,
        costs=cost_report(k),
        rng=np.random.default_rng(seed),
        samples=samples
    )
    names = list(PROPERTIES) if properties is None else properties
    report = VerificationReport()
    for name in names:
        if name not in PROPERTIES:
            raise KeyError(f'Unknown property {name}.')
        result = PROPERTIES[name](ctx)
        if logger is not None:
            logger.info(f'{name}: {"pass" if result.passed else "FAIL"} ({result.detail})')
        report.results.append(result)
    return report

"""
Neumark dilation
================

Measuring the levels of the dilated space after an embedding unitary is the
same as measuring the projectors ``U^dagger |k><k| U`` before it. This module
builds those projectors and checks that they reproduce the USD POVM.
"""
from dataclasses import dataclass
import numpy as np

from . import settings
from . import numkernel as nk
from .usd import LossyOperator, povm_from_lossy, outcome_probabilities
from .embedding import canonical_embedding, cost_report, unitary_action
from .exceptions import ValidationError, VerificationError, EmbeddingMismatchError


@dataclass
class DilationSet:
    """
    Orthogonal projectors on the dilated space, one per level.

    Attributes
    ----------
    projectors : np.ndarray
        Stack ``Pi_k = U^dagger |k><k| U``, shape ``(D, D, D)``.
    n_sys : int
        The number of system levels. The remaining levels are the ancilla.

    Raises
    ------
    ValidationError
        If the projectors are not Hermitian, idempotent, mutually orthogonal
        and complete.
    """
    projectors: np.ndarray
    n_sys: int

    def __post_init__(self):
        tol = settings.get_setting('tol_unitary')
        p = np.asarray(self.projectors, dtype=complex)
        dim = p.shape[-1]
        if p.shape != (dim, dim, dim):
            raise ValidationError(f'Expected one projector per level, got shape {p.shape}.')
        if not 0 <= self.n_sys <= dim:
            raise ValidationError(f'System size {self.n_sys} does not fit in dimension {dim}.')
        if dim and np.max(np.abs(p - np.swapaxes(p, -1, -2).conj())) > tol:
            raise ValidationError('Dilation projectors are not Hermitian.')
        products = np.einsum('jab,kbc->jkac', p, p)
        expected = np.einsum('jk,jac->jkac', np.eye(dim), p)
        if dim and np.max(np.abs(products - expected)) > tol:
            raise ValidationError('Dilation projectors are not idempotent and mutually orthogonal.')
        if dim and np.max(np.abs(p.sum(axis=0) - np.eye(dim))) > tol:
            raise ValidationError('Dilation projectors do not sum to the identity.')
        self.projectors = p

    @property
    def dim(self) -> int:
        return self.projectors.shape[-1]

    @property
    def n_anc(self) -> int:
        return self.dim - self.n_sys

    @property
    def anchor(self) -> np.ndarray:
        """
        Projector onto the system levels, where the input is prepared with the
        ancilla in its initial state.

        :type: np.ndarray
        """
        return np.diag(np.r_[np.ones(self.n_sys), np.zeros(self.n_anc)]).astype(complex)

    def aggregate(self, probabilities: np.ndarray):
        """
        Split per-level probabilities into conclusive ones and the summed
        inconclusive weight of the ancilla levels.
        """
        probabilities = np.asarray(probabilities)
        return probabilities[:self.n_sys], float(probabilities[self.n_sys:].sum())


def dilation_projectors(u, n_sys: int) -> DilationSet:
    """
    The projectors ``Pi_k = U^dagger |k><k| U`` for every level ``k``.

    Parameters
    ----------
    u : array_like
        A unitary on the dilated space.
    n_sys : int
        The number of system levels.

    Raises
    ------
    ValidationError
        If ``u`` is not unitary.
    """
    u = nk.require_unitary(u, 'u')
    projectors = np.einsum('ka,kb->kab', u.conj(), u)
    return DilationSet(projectors=projectors, n_sys=n_sys)


def dilation_probabilities(rho_sys, d: DilationSet) -> np.ndarray:
    """
    Probability of every level of the dilated space, ``tr((rho (+) 0) Pi_k)``.

    Raises
    ------
    ValidationError
        If ``rho_sys`` is not a density matrix on the system.
    """
    rho_sys = nk.check_density_matrix(rho_sys, dim=d.n_sys)
    rho = nk.block_diag(rho_sys, np.zeros((d.n_anc, d.n_anc)))
    return np.einsum('ab,kba->k', rho, d.projectors).real


@dataclass
class EquivalenceReport:
    """
    Agreement between dilation probabilities and the POVM of ``K``.

    Attributes
    ----------
    block_residual : float
        ``max|U_sys - w K|`` for the best aligning unitary ``w``.
    conclusive_error : float
        Largest conclusive probability difference over the samples.
    inconclusive_error : float
        Largest inconclusive probability difference over the samples.
    samples : int
        The number of random density matrices compared.
    tol : float
        The tolerance applied to all three errors.
    """
    block_residual: float
    conclusive_error: float
    inconclusive_error: float
    samples: int
    tol: float

    @property
    def passed(self) -> bool:
        return max(self.block_residual, self.conclusive_error, self.inconclusive_error) <= self.tol

    def raise_for_status(self):
        if not self.passed:
            raise EmbeddingMismatchError(
                f'Unitary does not embed K: block residual {self.block_residual:.3e}, '
                f'probability errors {self.conclusive_error:.3e} and {self.inconclusive_error:.3e}.',
                self
            )

    def to_dict(self) -> dict:
        return {
            'block_residual': self.block_residual,
            'conclusive_error': self.conclusive_error,
            'inconclusive_error': self.inconclusive_error,
            'samples': self.samples,
            'passed': self.passed,
        }


def equivalence_check(
    k,
    u,
    n_states_samples: int = 20,
    rng: np.random.Generator = None,
    tol: float = None
) -> EquivalenceReport:
    """
    Compare the dilation of ``u`` with the POVM of ``K`` on random inputs.

    The system block of ``u`` may differ from ``K`` by a unitary on the left,
    which only relabels the output directions.

    Parameters
    ----------
    k : LossyOperator or array_like
        The lossy operator.
    u : array_like
        A unitary on the dilated space, system levels first.
    n_states_samples : int
        The number of random density matrices.
    rng : np.random.Generator, optional
        Source of the random density matrices.
    tol : float, optional
        Defaults to the ``tol_povm`` setting.

    Returns
    -------
    EquivalenceReport
        The largest discrepancies.
    """
    k = k if isinstance(k, LossyOperator) else LossyOperator(k)
    tol = settings.get_setting('tol_povm') if tol is None else tol
    rng = np.random.default_rng(settings.get_setting('default_seed')) if rng is None else rng
    u = nk.require_unitary(u, 'u')
    if u.shape[0] < k.dim:
        raise ValidationError(f'Unitary of size {u.shape[0]} cannot embed a {k.dim}x{k.dim} operator.')
    block = u[:k.dim, :k.dim]
    alignment = nk.polar(k.matrix @ block.conj().T).unitary_factor
    residual = float(np.max(np.abs(block - alignment.conj().T @ k.matrix))) if k.dim else 0.
    povm = povm_from_lossy(k, output_basis=alignment)
    dilation = dilation_projectors(u, k.dim)
    conclusive_error = 0.
    inconclusive_error = 0.
    for _ in range(n_states_samples):
        rho = nk.random_density_matrix(k.dim, rng)
        conclusive, inconclusive = dilation.aggregate(dilation_probabilities(rho, dilation))
        expected = outcome_probabilities(rho, povm)
        conclusive_error = max(conclusive_error, float(np.max(np.abs(conclusive - expected[:-1]))))
        inconclusive_error = max(inconclusive_error, abs(inconclusive - float(expected[-1])))
    return EquivalenceReport(
        block_residual=residual,
        conclusive_error=conclusive_error,
        inconclusive_error=inconclusive_error,
        samples=n_states_samples,
        tol=tol
    )


def concentration_cost(u, n_sys: int, tol: float = None) -> float:
    """
    The action needed to concentrate the conclusive information of ``u``.

    This is the action of the canonical embedding of the system block of
    ``u``, which realizes the same POVM with a positive system block.

    Parameters
    ----------
    u : array_like
        A unitary embedding, system levels first.
    n_sys : int
        The number of system levels.
    tol : float, optional
        Allowed difference from the minimal embedding action. Defaults to ``tol_unitary``.

    Raises
    ------
    ValidationError
        If ``u`` is not unitary.
    VerificationError
        If the cost differs from the minimal embedding action.
    """
    tol = settings.get_setting('tol_unitary') if tol is None else tol
    u = nk.require_unitary(u, 'u')
    k = LossyOperator(u[:n_sys, :n_sys])
    cost = unitary_action(canonical_embedding(k).matrix)
    minimal = cost_report(k).spectral_action
    if abs(cost - minimal) > tol:
        raise VerificationError(
            f'Concentration cost {cost:.16g} differs from the embedding cost {minimal:.16g}.'
        )
    return cost

"""
Unambiguous state discrimination
================================

The objects of a USD problem: the set of states to discriminate, their
reciprocal basis, the lossy operator ``K`` that maps them to orthogonal
outputs and the POVM it realizes.
"""
from typing import List, Sequence, Tuple
from dataclasses import dataclass, field
import numpy as np

from . import settings
from . import numkernel as nk
from .exceptions import (
    ValidationError,
    NotDiscriminableError,
    InfeasibleProbabilitiesError,
    PassivityError,
    VerificationError
)


class StateSet:
    """
    A set of ``N`` normalized, linearly independent pure states in an
    ``N`` dimensional space.

    Parameters
    ----------
    states : array_like
        The states, one per row, shape ``(N, N)``.
    priors : array_like, optional
        Prior probabilities of the states. Defaults to uniform.

    Raises
    ------
    ValidationError
        If a state is not normalized or the priors are not a distribution.
    NotDiscriminableError
        If the states are linearly dependent.

    Notes
    -----
    The priors are only used when simulating or reporting. The lossy
    operator does not depend on them.
    """
    def __init__(self, states, priors=None):
        states = np.asarray(states, dtype=complex)
        if states.ndim != 2 or states.shape[0] != states.shape[1]:
            raise ValidationError(f'Expected N states of length N, got shape {states.shape}.')
        if not np.all(np.isfinite(states)):
            raise ValidationError('States have non-finite entries.')
        for i, state in enumerate(states):
            nk.require_normalized(state, f'state {i}')
        self.states = states
        n = states.shape[0]
        priors = np.full(n, 1 / n) if priors is None else np.asarray(priors, dtype=float)
        if priors.shape != (n,):
            raise ValidationError(f'Expected {n} priors, got shape {priors.shape}.')
        if np.any(priors < 0) or abs(priors.sum() - 1) > settings.get_setting('tol_prob'):
            raise ValidationError(f'Priors must be non-negative and sum to one, got {priors}.')
        self.priors = priors
        self.min_gram_eigenvalue()

    @property
    def dim(self) -> int:
        """
        The dimension ``N`` of the state space.

        :type: int
        """
        return self.states.shape[1]

    def __len__(self):
        return self.states.shape[0]

    def __getitem__(self, item) -> np.ndarray:
        return self.states[item]

    @property
    def gram(self) -> np.ndarray:
        """
        The Gram matrix ``G_ij = <alpha_i|alpha_j>``.

        :type: np.ndarray
        """
        return self.states.conj() @ self.states.T

    def overlap(self, i: int, j: int) -> float:
        """
        The overlap magnitude ``|<alpha_i|alpha_j>|``.
        """
        return float(abs(np.vdot(self.states[i], self.states[j])))

    def min_gram_eigenvalue(self) -> float:
        """
        Smallest eigenvalue of the Gram matrix.

        Raises
        ------
        NotDiscriminableError
            If it does not exceed the ``lin_indep_tol`` setting.
        """
        lowest = float(np.linalg.eigvalsh(self.gram)[0])
        tol = settings.get_setting('lin_indep_tol')
        if lowest <= tol:
            raise NotDiscriminableError(
                f'States not discriminable: smallest Gram eigenvalue {lowest:.3e} <= {tol:.1e}.'
            )
        return lowest

    def density_matrix(self, i: int) -> np.ndarray:
        return np.outer(self.states[i], self.states[i].conj())

    def __repr__(self):
        return f'StateSet(dim={self.dim}, priors={self.priors.tolist()!r})'


class LossyOperator:
    """
    A lossy evolution operator ``K``, a contraction on the system space.

    Parameters
    ----------
    matrix : array_like
        The square matrix ``K``.
    check_passive : bool, optional
        If True (default), reject operators with ``||K|| > 1``.

    Raises
    ------
    PassivityError
        If ``check_passive`` and the spectral norm exceeds ``1 + tol_passivity``.
    """
    def __init__(self, matrix, check_passive: bool = True):
        self.matrix = nk.require_square(matrix, 'K')
        self.singulars = nk.singular_values(self.matrix)
        if check_passive and not self.is_passive:
            raise PassivityError(f'||K|| = {self.norm:.16g} exceeds one.')

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    @property
    def norm(self) -> float:
        """
        The spectral norm ``s_max``.

        :type: float
        """
        return float(self.singulars[0]) if self.singulars.size else 0.

    @property
    def s_max(self) -> float:
        return self.norm

    @property
    def s_min(self) -> float:
        return float(self.singulars[-1]) if self.singulars.size else 0.

    @property
    def is_passive(self) -> bool:
        return self.norm <= 1 + settings.get_setting('tol_passivity')

    def __repr__(self):
        return f'LossyOperator(singulars={self.singulars.tolist()!r})'


@dataclass
class PovmSet:
    """
    A USD POVM: ``N`` rank-one conclusive elements and one inconclusive element.

    Attributes
    ----------
    conclusive : np.ndarray
        Stack of the conclusive elements ``F_1..F_N``, shape ``(N, d, d)``.
    inconclusive : np.ndarray
        The inconclusive element ``F_{N+1}``.

    Raises
    ------
    ValidationError
        If an element is not positive semidefinite, the elements do not sum to
        the identity or a conclusive element has rank above one.
    """
    conclusive: np.ndarray
    inconclusive: np.ndarray

    def __post_init__(self):
        self.conclusive = np.asarray(self.conclusive, dtype=complex)
        self.inconclusive = nk.require_square(self.inconclusive, 'F_inconclusive')
        tol = settings.get_setting('tol_povm')
        d = self.inconclusive.shape[0]
        for i, element in enumerate(self.elements):
            eigs = np.linalg.eigvalsh(0.5 * (element + element.conj().T))
            if eigs.size and eigs[0] < -tol:
                raise ValidationError(f'POVM element {i} is not positive semidefinite ({eigs[0]:.3e}).')
            if i < len(self.conclusive) and eigs.size > 1 and eigs[-2] >= tol:
                raise ValidationError(f'Conclusive element {i} is not rank one.')
        completeness = np.max(np.abs(self.elements.sum(axis=0) - np.eye(d))) if d else 0.
        if completeness > tol:
            raise ValidationError(f'POVM elements do not sum to the identity ({completeness:.3e}).')

    @property
    def elements(self) -> np.ndarray:
        """
        All ``N + 1`` elements, the inconclusive one last.

        :type: np.ndarray
        """
        return np.concatenate([self.conclusive, self.inconclusive[None]], axis=0)

    @property
    def inconclusive_rank(self) -> int:
        """
        Numerical rank of the inconclusive element.

        :type: int
        """
        eigs = np.linalg.eigvalsh(0.5 * (self.inconclusive + self.inconclusive.conj().T))
        return int(np.sum(eigs > settings.get_setting('tol_povm')))


@dataclass
class UsdValidation:
    """
    The result of checking that ``K`` maps the states to orthogonal outputs.

    Attributes
    ----------
    probabilities : np.ndarray
        Conclusive probabilities ``||K alpha_i||^2``.
    offending_pairs : list of tuple
        Zero based index pairs ``(i, j)`` whose outputs overlap.
    max_overlap : float
        Largest ``|<K alpha_i|K alpha_j>|`` over ``i != j``.
    """
    probabilities: np.ndarray
    offending_pairs: List[Tuple[int, int]] = field(default_factory=list)
    max_overlap: float = 0.

    @property
    def passed(self) -> bool:
        return len(self.offending_pairs) == 0

    def raise_for_status(self):
        """
        Raise a ``VerificationError`` listing the offending pairs, if any.
        """
        if not self.passed:
            pairs = ', '.join(f'({i}, {j})' for i, j in self.offending_pairs)
            msg = f'Outputs are not orthogonal for state pairs {pairs} (max overlap {self.max_overlap:.3e}).'
            raise VerificationError(msg, self)

    def to_dict(self) -> dict:
        return {
            'passed': self.passed,
            'probabilities': self.probabilities.tolist(),
            'offending_pairs': [list(pair) for pair in self.offending_pairs],
            'max_overlap': self.max_overlap,
        }


def reciprocal_basis(s: StateSet) -> np.ndarray:
    """
    The dual vectors ``alpha~_i`` with ``<alpha~_i|alpha_j> = delta_ij``.

    Parameters
    ----------
    s : StateSet
        The states.

    Returns
    -------
    np.ndarray
        The dual vectors, one per row.

    Raises
    ------
    NotDiscriminableError
        If the Gram matrix is near singular.
    """
    s.min_gram_eigenvalue()
    # rows of inv(A) are the dual bras when the columns of A are the states
    inverse = np.linalg.inv(s.states.T)
    return inverse.conj()


def build_lossy(s: StateSet, probs: Sequence[float]) -> LossyOperator:
    """
    Build ``K = sum_i sqrt(p_i) |i><alpha~_i|`` so that ``K|alpha_j> = sqrt(p_j)|j>``.

    Parameters
    ----------
    s : StateSet
        The states to discriminate.
    probs : sequence of float
        Conclusive probability for each state, each in ``[0, 1]``.

    Returns
    -------
    LossyOperator
        The lossy operator.

    Raises
    ------
    ValidationError
        If ``probs`` has the wrong length or values outside ``[0, 1]``.
    InfeasibleProbabilitiesError
        If the resulting operator is not a contraction.
    """
    probs = np.asarray(probs, dtype=float)
    if probs.shape != (len(s),):
        raise ValidationError(f'Expected {len(s)} conclusive probabilities, got shape {probs.shape}.')
    if np.any(probs < 0) or np.any(probs > 1):
        raise ValidationError(f'Conclusive probabilities must lie in [0, 1], got {probs}.')
    duals = reciprocal_basis(s)
    matrix = np.sqrt(probs)[:, None] * duals.conj()
    k = LossyOperator(matrix, check_passive=False)
    if not k.is_passive:
        raise InfeasibleProbabilitiesError(
            f'Infeasible conclusive probabilities {probs.tolist()}: ||K|| = {k.norm:.16g} > 1.'
        )
    return k


def scale_marginal(k: LossyOperator) -> LossyOperator:
    """
    Rescale ``K`` to be marginally passive, ``K / ||K||``.

    Raises
    ------
    ValidationError
        If ``K`` is the zero operator.
    """
    if k.norm == 0:
        raise ValidationError('Cannot rescale the zero operator.')
    return LossyOperator(k.matrix / k.norm)


def povm_from_lossy(k: LossyOperator, output_basis=None) -> PovmSet:
    """
    The POVM realized by measuring the output of ``K``.

    ``F_i = K^dagger pi_i K`` with ``pi_i`` the projector on output level ``i``
    and ``F_{N+1} = I - K^dagger K``.

    Parameters
    ----------
    k : LossyOperator
        The lossy operator.
    output_basis : array_like, optional
        Orthonormal output directions as columns. Defaults to the standard basis.

    Raises
    ------
    PassivityError
        If the inconclusive element has a negative eigenvalue.
    """
    matrix = k.matrix
    if output_basis is not None:
        output_basis = nk.require_unitary(output_basis, 'output_basis')
        matrix = output_basis.conj().T @ matrix
    conclusive = np.einsum('ki,kj->kij', matrix.conj(), matrix)
    inconclusive = np.eye(k.dim) - k.matrix.conj().T @ k.matrix
    inconclusive = 0.5 * (inconclusive + inconclusive.conj().T)
    lowest = np.linalg.eigvalsh(inconclusive)[0] if k.dim else 0.
    if lowest < -settings.get_setting('tol_passivity'):
        raise PassivityError(f'Inconclusive element has negative eigenvalue {lowest:.3e}; K is not passive.')
    return PovmSet(conclusive=conclusive, inconclusive=inconclusive)


def outcome_probabilities(rho, p: PovmSet) -> np.ndarray:
    """
    Outcome probabilities ``tr(rho F_i)`` for all ``N + 1`` outcomes.

    Raises
    ------
    ValidationError
        If ``rho`` is not a valid density matrix.
    """
    rho = nk.check_density_matrix(rho, dim=p.inconclusive.shape[0])
    return np.einsum('ij,kji->k', rho, p.elements).real


def two_state_smin(overlap: float) -> float:
    """
    Smallest singular value of the optimal marginal two-state USD operator,
    ``sqrt((1 - c) / (1 + c))``.

    Raises
    ------
    ValidationError
        If the overlap is outside ``[0, 1]``.

    Examples
    --------
    >>> two_state_smin(0.6)
    0.5
    """
    if not 0 <= overlap <= 1:
        raise ValidationError(f'Overlap must lie in [0, 1], got {overlap}.')
    return float(np.sqrt((1 - overlap) / (1 + overlap)))


def symmetric_two_state_probs(s: StateSet) -> np.ndarray:
    """
    The symmetric optimum ``p_i = 1 - |<alpha_1|alpha_2>|`` for two states.
    """
    if len(s) != 2:
        raise ValidationError(f'The symmetric optimum is only provided for two states, got {len(s)}.')
    return np.full(2, 1 - s.overlap(0, 1))


def equal_marginal_probs(s: StateSet) -> np.ndarray:
    """
    The largest equal conclusive probability for every state, the one that
    makes ``K`` marginally passive.

    For two states this is the symmetric optimum ``1 - |<alpha_1|alpha_2>|``.
    """
    norm = nk.spectral_norm(reciprocal_basis(s))
    return np.full(len(s), min(1., 1 / norm**2))


def two_state_angle_check(k: LossyOperator, s: StateSet, tol: float = None) -> float:
    """
    Check ``tan(phi/2) = s_min/s_max`` where ``cos(phi) = |<alpha_-|alpha_+>|``.

    Returns
    -------
    float
        The angle ``phi`` between the states.

    Raises
    ------
    ValidationError
        If there are not exactly two states.
    VerificationError
        If the relation does not hold within ``tol``.
    """
    tol = settings.get_setting('tol_orth') if tol is None else tol
    if len(s) != 2:
        raise ValidationError(f'The angle check needs two states, got {len(s)}.')
    c = min(s.overlap(1, 0), 1.)
    phi = float(nk.angle_from_cosine(c))
    half_tan = np.sqrt((1 - c) / (1 + c))
    ratio = k.s_min / k.s_max
    if abs(half_tan - ratio) > tol:
        raise VerificationError(
            f'tan(phi/2) = {half_tan:.16g} but s_min/s_max = {ratio:.16g}.'
        )
    return phi


def validate_usd(k: LossyOperator, s: StateSet, tol: float = None) -> UsdValidation:
    """
    Check that ``K`` maps the states to mutually orthogonal outputs.

    Parameters
    ----------
    k : LossyOperator or array_like
        The lossy operator or a system block.
    s : StateSet
        The states.
    tol : float, optional
        Orthogonality tolerance. Defaults to ``tol_orth``.

    Returns
    -------
    UsdValidation
        The conclusive probabilities and any offending pairs.
    """
    tol = settings.get_setting('tol_orth') if tol is None else tol
    matrix = k.matrix if isinstance(k, LossyOperator) else nk.require_square(k, 'K')
    if matrix.shape[1] != s.dim:
        raise ValidationError(f'K acts on dimension {matrix.shape[1]}, states have dimension {s.dim}.')
    outputs = matrix @ s.states.T
    gram = outputs.conj().T @ outputs
    probabilities = np.real(np.diag(gram)).copy()
    off = np.abs(gram - np.diag(np.diag(gram)))
    pairs = [(i, j) for i in range(len(s)) for j in range(i + 1, len(s)) if off[i, j] > tol]
    return UsdValidation(
        probabilities=probabilities,
        offending_pairs=pairs,
        max_overlap=float(off.max()) if off.size else 0.
    )


def symmetric_pair(c: float, mixing_angle: float = 0.) -> Tuple[np.ndarray, np.ndarray]:
    """
    Two real qubit states ``(cos t, +-sin t)`` with overlap ``c = cos(2t)``,
    both rotated by ``mixing_angle``.

    Raises
    ------
    ValidationError
        If ``c`` is outside ``[0, 1]``.
    """
    if not 0 <= c <= 1:
        raise ValidationError(f'Overlap must lie in [0, 1], got {c}.')
    half = 0.5 * float(nk.angle_from_cosine(c))
    rotation = np.array([
        [np.cos(mixing_angle), -np.sin(mixing_angle)],
        [np.sin(mixing_angle), np.cos(mixing_angle)]
    ])
    plus = rotation @ np.array([np.cos(half), np.sin(half)])
    minus = rotation @ np.array([np.cos(half), -np.sin(half)])
    return plus.astype(complex), minus.astype(complex)


def random_state_set(n: int, rng: np.random.Generator) -> StateSet:
    """
    ``n`` random normalized states in dimension ``n``.
    """
    vectors = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    vectors /= np.linalg.norm(vectors, axis=1)[:, None]
    return StateSet(vectors)


def random_usd_instance(n: int, rng: np.random.Generator) -> Tuple[StateSet, np.ndarray]:
    """
    A random state set with random feasible conclusive probabilities.

    Probabilities are drawn uniformly and scaled down, when needed, so that
    the resulting operator is marginally passive.
    """
    s = random_state_set(n, rng)
    probs = rng.uniform(0.05, 1.0, size=n)
    norm = np.linalg.norm(np.sqrt(probs)[:, None] * reciprocal_basis(s).conj(), 2)
    if norm > 1:
        probs = probs / norm**2
    return s, probs

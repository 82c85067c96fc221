"""
Unitary embeddings
==================

Embed a lossy operator ``K`` into a unitary ``W`` on the system plus an
ancilla, with the smallest possible Hamiltonian action.

``W`` has the block form::

    [[ u_K cos(theta) u_K^H        , -i u_K sin(theta) u_D^H                  ],
     [ -i u_D sin(theta) u_K^H     ,  u_D cos(theta) u_D^H + (I - u_D u_D^H)  ]]

where ``cos(theta)`` holds the singular values of ``K``. ``u_D`` is an
``n_anc x n_sys`` partial isometry: its columns are orthonormal, except for
columns of directions removed by :func:`reduce_ancilla`, which are zero.
"""
from typing import Union
from dataclasses import dataclass, replace
import numpy as np
from scipy import linalg
from astropy import units as u

from . import settings
from . import numkernel as nk
from .numkernel import NormKind
from .usd import LossyOperator
from .exceptions import ValidationError
from . import units


@dataclass(frozen=True)
class CanonicalEmbedding:
    """
    The minimal-cost unitary embedding of the positive part of ``K``.

    Attributes
    ----------
    u_k : np.ndarray
        Unitary on the system, columns are the right singular vectors of ``K``.
    u_d : np.ndarray
        ``n_anc x n_sys`` partial isometry into the ancilla.
    theta : np.ndarray
        Rotation angles in ``[0, pi/2]``, ``cos(theta_i) = s_i``.
    u_s : np.ndarray
        Left unitary factor with ``K = u_s @ system_block``.
    """
    u_k: np.ndarray
    u_d: np.ndarray
    theta: np.ndarray
    u_s: np.ndarray

    @property
    def n_sys(self) -> int:
        return self.u_k.shape[0]

    @property
    def n_anc(self) -> int:
        return self.u_d.shape[0]

    @property
    def dim(self) -> int:
        return self.n_sys + self.n_anc

    @property
    def system_block(self) -> np.ndarray:
        """
        The positive system block ``u_K cos(theta) u_K^H``.

        :type: np.ndarray
        """
        block = (self.u_k * np.cos(self.theta)) @ self.u_k.conj().T
        return 0.5 * (block + block.conj().T)

    @property
    def b_block(self) -> np.ndarray:
        """
        The ancilla to system block.

        :type: np.ndarray
        """
        return -1j * (self.u_k * np.sin(self.theta)) @ self.u_d.conj().T

    @property
    def c_block(self) -> np.ndarray:
        """
        The system to ancilla block.

        :type: np.ndarray
        """
        return -1j * (self.u_d * np.sin(self.theta)) @ self.u_k.conj().T

    @property
    def d_block(self) -> np.ndarray:
        """
        The ancilla block.

        :type: np.ndarray
        """
        projector = self.u_d @ self.u_d.conj().T
        block = (self.u_d * np.cos(self.theta)) @ self.u_d.conj().T + np.eye(self.n_anc) - projector
        return 0.5 * (block + block.conj().T)

    @property
    def matrix(self) -> np.ndarray:
        """
        The full unitary ``W``.

        :type: np.ndarray
        """
        return np.block([
            [self.system_block, self.b_block],
            [self.c_block, self.d_block]
        ])

    @property
    def min_ancilla(self) -> int:
        """
        The number of ancilla levels needed, one per singular value below one.

        :type: int
        """
        return int(np.sum(self.theta >= settings.get_setting('theta_reduce_tol')))

    def with_theta(self, theta) -> 'CanonicalEmbedding':
        """
        A copy with different rotation angles and the same singular vectors.
        """
        theta = np.asarray(theta, dtype=float)
        if theta.shape != self.theta.shape:
            raise ValidationError(f'Expected {self.theta.shape} angles, got {theta.shape}.')
        return replace(self, theta=theta)


@dataclass(frozen=True)
class HamiltonianOpt:
    """
    The time-independent Hamiltonian that generates ``W`` in time ``duration``.

    Attributes
    ----------
    matrix : np.ndarray
        The Hermitian generator, zero on the diagonal blocks.
    duration : float
        The evolution time ``T``.
    n_sys : int
        The size of the system block.
    """
    matrix: np.ndarray
    duration: float
    n_sys: int

    @property
    def off_diagonal(self) -> np.ndarray:
        """
        The system-ancilla block ``u_K theta u_D^H / T``.

        :type: np.ndarray
        """
        return self.matrix[:self.n_sys, self.n_sys:]

    def action(self, kind: Union[NormKind, str] = NormKind.SPECTRAL) -> float:
        """
        The norm action ``||H|| T``.
        """
        return nk.matrix_norm(self.matrix, kind) * self.duration

    def propagator(self) -> np.ndarray:
        return nk.exp_unitary(self.matrix, self.duration)


@dataclass(frozen=True)
class CostReport:
    """
    Resource costs of embedding ``K``, as functions of its singular values.

    Actions are in radians (energy times time with hbar = 1).

    Attributes
    ----------
    singulars : np.ndarray
        Singular values of ``K``, descending.
    s_min : float
        The smallest singular value.
    max_transfer_fraction : float
        The largest probability of leaking into the ancilla, ``1 - s_min^2``.
    spectral_action : float
        The minimal spectral norm action.
    hs_action : float
        The minimal Hilbert-Schmidt norm action.
    """
    singulars: np.ndarray
    s_min: float
    max_transfer_fraction: float
    spectral_action: float
    hs_action: float

    @property
    def spectral_action_quantity(self) -> u.Quantity:
        return self.spectral_action * units.action

    @property
    def hs_action_quantity(self) -> u.Quantity:
        return self.hs_action * units.action

    def action(self, kind: Union[NormKind, str]) -> float:
        match NormKind(kind):
            case NormKind.SPECTRAL:
                return self.spectral_action
            case NormKind.HS:
                return self.hs_action

    def to_dict(self) -> dict:
        return {
            'singulars': self.singulars.tolist(),
            's_min': self.s_min,
            'max_transfer_fraction': self.max_transfer_fraction,
            'spectral_action': self.spectral_action,
            'hs_action': self.hs_action,
        }


def _as_lossy(k) -> LossyOperator:
    return k if isinstance(k, LossyOperator) else LossyOperator(k)


def canonical_embedding(k: Union[LossyOperator, np.ndarray]) -> CanonicalEmbedding:
    """
    Build the canonical embedding of ``K``.

    The system block is the positive part of the polar decomposition
    ``K = u_s @ P``, which realizes the same POVM as ``K``.

    Parameters
    ----------
    k : LossyOperator or array_like
        A contraction.

    Returns
    -------
    CanonicalEmbedding
        The embedding, with ``u_D = u_K`` and ``n_anc = n_sys``.

    Raises
    ------
    PassivityError
        If ``K`` is not a contraction.

    Examples
    --------
    >>> e = canonical_embedding(np.diag([1., 0.]))
    >>> np.round(e.theta, 6).tolist()
    [0.0, 1.570796]
    """
    k = _as_lossy(k)
    result = nk.svd(k.matrix)
    theta = nk.rotation_angles(result.singulars)
    u_s = result.left @ result.right.conj().T
    return CanonicalEmbedding(
        u_k=result.right,
        u_d=result.right.copy(),
        theta=theta,
        u_s=u_s
    )


def exact_embedding(k: Union[LossyOperator, np.ndarray]) -> np.ndarray:
    """
    A unitary whose upper left block is ``K`` itself, ``diag(u_s, I) @ W``.

    Raises
    ------
    PassivityError
        If ``K`` is not a contraction.
    """
    e = canonical_embedding(k)
    return nk.block_diag(e.u_s, np.eye(e.n_anc)) @ e.matrix


def optimal_hamiltonian(e: CanonicalEmbedding, t: Union[float, u.Quantity] = 1.0) -> HamiltonianOpt:
    """
    The Hamiltonian ``H`` with ``exp(-i H t) = W`` and the least norm.

    Parameters
    ----------
    e : CanonicalEmbedding
        The embedding to generate.
    t : float or astropy.units.Quantity
        The evolution time, positive.

    Returns
    -------
    HamiltonianOpt
        The generator.

    Raises
    ------
    ValidationError
        If ``t <= 0``.
    """
    t = units.to_natural(t, units.time)
    if not t > 0:
        raise ValidationError(f'Duration must be positive, got {t}.')
    x = (e.u_k * e.theta) @ e.u_d.conj().T
    zeros_sys = np.zeros((e.n_sys, e.n_sys), dtype=complex)
    zeros_anc = np.zeros((e.n_anc, e.n_anc), dtype=complex)
    matrix = np.block([[zeros_sys, x], [x.conj().T, zeros_anc]]) / t
    return HamiltonianOpt(matrix=matrix, duration=t, n_sys=e.n_sys)


def cost_report(k: Union[LossyOperator, np.ndarray]) -> CostReport:
    """
    The minimal spectral and Hilbert-Schmidt actions needed to realize ``K``.

    A singular ``K`` has ``s_min = 0`` and spectral action ``pi/2``.

    Raises
    ------
    PassivityError
        If ``K`` is not a contraction.

    Examples
    --------
    >>> r = cost_report(np.diag([1., 0.5]))
    >>> bool(np.isclose(r.spectral_action, np.pi / 3))
    True
    """
    k = _as_lossy(k)
    singulars = nk.clamp_contraction(k.singulars)
    theta = nk.rotation_angles(singulars)
    s_min = float(singulars[-1]) if singulars.size else 1.
    return CostReport(
        singulars=singulars,
        s_min=s_min,
        max_transfer_fraction=float((1 - s_min) * (1 + s_min)),
        spectral_action=float(theta.max()) if theta.size else 0.,
        hs_action=float(np.sqrt(2 * np.sum(theta**2)))
    )


def perturbed_embedding(e: CanonicalEmbedding, u_s, u_a) -> np.ndarray:
    """
    ``diag(u_s, u_a) @ W``, an embedding of the same POVM up to a left unitary.

    Raises
    ------
    ValidationError
        If the unitaries do not match the system and ancilla dimensions.
    """
    u_s = nk.require_unitary(u_s, 'u_s')
    u_a = nk.require_unitary(u_a, 'u_a')
    if u_s.shape[0] != e.n_sys or u_a.shape[0] != e.n_anc:
        raise ValidationError(
            f'Expected {e.n_sys}x{e.n_sys} and {e.n_anc}x{e.n_anc} unitaries, '
            f'got {u_s.shape} and {u_a.shape}.'
        )
    return nk.block_diag(u_s, u_a) @ e.matrix


def unitary_action(u_mat, norm_kind: Union[NormKind, str] = NormKind.SPECTRAL) -> float:
    """
    The norm of the principal logarithm of a unitary.

    This is the action of the time-independent Hamiltonian that generates it,
    read off the principal eigenangles.

    Raises
    ------
    ValidationError
        If ``u_mat`` is not unitary.
    """
    angles = nk.eigenangles(u_mat)
    if angles.size == 0:
        return 0.
    match NormKind(norm_kind):
        case NormKind.SPECTRAL:
            return float(np.max(np.abs(angles)))
        case NormKind.HS:
            return float(np.sqrt(np.sum(angles ** 2)))


def exact_embedding_cost(k: Union[LossyOperator, np.ndarray], norm_kind: Union[NormKind, str] = NormKind.SPECTRAL) -> float:
    """
    The action of generating :func:`exact_embedding` with a constant Hamiltonian.
    """
    return unitary_action(exact_embedding(k), norm_kind)


def rotation_angle(psi, e: CanonicalEmbedding) -> float:
    """
    The angle ``arccos|<psi|K|psi>|`` through which the embedding turns ``psi``.

    Raises
    ------
    ValidationError
        If ``psi`` is not normalized or has the wrong length.
    """
    psi = nk.require_normalized(psi, 'psi')
    if psi.size != e.n_sys:
        raise ValidationError(f'psi must have length {e.n_sys}, got {psi.size}.')
    overlap = abs(np.vdot(psi, e.system_block @ psi))
    return float(nk.angle_from_cosine(min(overlap, 1.)))


def reduce_ancilla(e: CanonicalEmbedding, tol: float = None) -> CanonicalEmbedding:
    """
    Remove the ancilla directions that unit singular values never reach.

    Parameters
    ----------
    e : CanonicalEmbedding
        The embedding.
    tol : float, optional
        Angles below ``tol`` count as zero. Defaults to ``theta_reduce_tol``.

    Returns
    -------
    CanonicalEmbedding
        An embedding with one ancilla level per angle above ``tol``.
        ``e`` itself when every ancilla level is still reached.
    """
    tol = settings.get_setting('theta_reduce_tol') if tol is None else tol
    active = np.flatnonzero(e.theta >= tol)
    theta = np.where(e.theta >= tol, e.theta, 0.)
    if active.size == e.n_anc and np.array_equal(theta, e.theta):
        return e
    # express u_D in a basis of the directions it still reaches
    basis = linalg.orth(e.u_d[:, active]) if active.size else np.zeros((e.n_anc, 0), dtype=complex)
    u_d = basis.conj().T @ e.u_d
    u_d[:, theta == 0.] = 0.
    return replace(e, u_d=u_d, theta=theta)


def extend_ancilla(e: CanonicalEmbedding, n_anc_new: int) -> CanonicalEmbedding:
    """
    Pad the ancilla with levels the evolution never touches.

    Raises
    ------
    ValidationError
        If ``n_anc_new`` is smaller than the current ancilla.
    """
    if n_anc_new < e.n_anc:
        raise ValidationError(f'Cannot shrink the ancilla from {e.n_anc} to {n_anc_new} levels.')
    padding = np.zeros((n_anc_new - e.n_anc, e.n_sys), dtype=complex)
    return replace(e, u_d=np.vstack([e.u_d, padding]))

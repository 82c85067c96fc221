"""
Numerical kernel
================

Dense complex linear algebra with explicit numerical contracts:
singular value and polar decompositions, the unitary exponential and
logarithm, and unitarily invariant norms.

Every function here is a pure function of its inputs.
"""
from typing import Union
from dataclasses import dataclass
from enum import Enum
import numpy as np
from scipy import linalg
from scipy.stats import unitary_group

from . import settings
from .exceptions import ValidationError, PassivityError, VerificationError


class NormKind(str, Enum):
    """
    The unitarily invariant norms used to cost a Hamiltonian.
    """
    SPECTRAL = 'spectral'
    HS = 'hs'


@dataclass(frozen=True)
class SvdResult:
    """
    The singular value decomposition ``a = left @ diag(singulars) @ right^dagger``.

    Attributes
    ----------
    left : np.ndarray
        Unitary matrix of left singular vectors (columns).
    singulars : np.ndarray
        Non-negative singular values in descending order.
    right : np.ndarray
        Unitary matrix of right singular vectors (columns).
    """
    left: np.ndarray
    singulars: np.ndarray
    right: np.ndarray

    def reconstruct(self) -> np.ndarray:
        """
        Multiply the factors back together.
        """
        return (self.left * self.singulars) @ self.right.conj().T


@dataclass(frozen=True)
class PolarResult:
    """
    The right polar decomposition ``a = unitary_factor @ positive_factor``.

    Attributes
    ----------
    unitary_factor : np.ndarray
        The unitary factor.
    positive_factor : np.ndarray
        The Hermitian positive semidefinite factor.
    """
    unitary_factor: np.ndarray
    positive_factor: np.ndarray


def as_matrix(a, name: str = 'a') -> np.ndarray:
    """
    Coerce ``a`` to a finite, two dimensional complex array.

    Raises
    ------
    ValidationError
        If ``a`` is not two dimensional or has non-finite entries.
    """
    arr = np.asarray(a, dtype=complex)
    if arr.ndim != 2:
        raise ValidationError(f'{name} must be a 2D matrix, got {arr.ndim} dimensions.')
    if not np.all(np.isfinite(arr)):
        raise ValidationError(f'{name} has non-finite entries.')
    return arr


def as_state(psi, name: str = 'psi') -> np.ndarray:
    """
    Coerce ``psi`` to a finite complex vector.
    """
    arr = np.asarray(psi, dtype=complex)
    if arr.ndim != 1:
        raise ValidationError(f'{name} must be a vector, got {arr.ndim} dimensions.')
    if not np.all(np.isfinite(arr)):
        raise ValidationError(f'{name} has non-finite entries.')
    return arr


def require_normalized(psi, name: str = 'psi', tol: float = None) -> np.ndarray:
    """
    Check that ``psi`` has unit norm.
    """
    tol = settings.get_setting('tol_norm') if tol is None else tol
    psi = as_state(psi, name)
    norm = np.linalg.norm(psi)
    if abs(norm - 1) > tol:
        raise ValidationError(f'{name} must have unit norm, got {norm:.16g}.')
    return psi


def require_square(a, name: str = 'a') -> np.ndarray:
    a = as_matrix(a, name)
    if a.shape[0] != a.shape[1]:
        raise ValidationError(f'{name} must be square, got shape {a.shape}.')
    return a


def hermiticity_error(h: np.ndarray) -> float:
    """
    Largest entrywise deviation of ``h`` from its adjoint.
    """
    if h.size == 0:
        return 0.
    return float(np.max(np.abs(h - np.swapaxes(h, -1, -2).conj())))


def require_hermitian(h, name: str = 'h', tol: float = None) -> np.ndarray:
    """
    Check that ``h`` (or every matrix of a stack) is Hermitian.

    The tolerance is relative to ``max(1, max|h_ij|)``.
    """
    tol = settings.get_setting('tol_herm') if tol is None else tol
    h = np.asarray(h, dtype=complex)
    if h.ndim not in (2, 3) or h.shape[-1] != h.shape[-2]:
        raise ValidationError(f'{name} must be a square matrix or a stack of them, got shape {h.shape}.')
    if not np.all(np.isfinite(h)):
        raise ValidationError(f'{name} has non-finite entries.')
    scale = max(1., float(np.max(np.abs(h)))) if h.size else 1.
    if hermiticity_error(h) > tol * scale:
        raise ValidationError(f'{name} is not Hermitian within {tol:.1e}.')
    return h


def unitarity_error(u: np.ndarray) -> float:
    """
    Largest entrywise deviation of ``u^dagger u`` from the identity.
    """
    if u.size == 0:
        return 0.
    return float(np.max(np.abs(u.conj().T @ u - np.eye(u.shape[1]))))


def is_unitary(u, tol: float = None) -> bool:
    tol = settings.get_setting('tol_unitary') if tol is None else tol
    u = np.asarray(u, dtype=complex)
    if u.ndim != 2 or u.shape[0] != u.shape[1]:
        return False
    return unitarity_error(u) <= tol


def require_unitary(u, name: str = 'u', tol: float = None) -> np.ndarray:
    """
    Check that ``u`` is unitary.

    Raises
    ------
    ValidationError
        If ``u`` is not square or ``u^dagger u`` departs from the identity by more than ``tol``.
    """
    tol = settings.get_setting('tol_unitary') if tol is None else tol
    u = require_square(u, name)
    err = unitarity_error(u)
    if err > tol:
        raise ValidationError(f'{name} is not unitary: |u^H u - I| = {err:.3e} > {tol:.1e}.')
    return u


def svd(a) -> SvdResult:
    """
    Singular value decomposition of a dense complex matrix.

    Parameters
    ----------
    a : array_like
        The matrix to decompose.

    Returns
    -------
    SvdResult
        Factors with descending singular values.

    Raises
    ------
    ValidationError
        If ``a`` is not a finite 2D matrix.

    Notes
    -----
    Degenerate singular values make the factors non-unique, only the
    reconstruction and the singular values are part of the contract.
    """
    a = as_matrix(a)
    if a.size == 0:
        m, n = a.shape
        return SvdResult(left=np.eye(m, dtype=complex), singulars=np.zeros(0), right=np.eye(n, dtype=complex))
    left, singulars, right_h = np.linalg.svd(a)
    return SvdResult(left=left, singulars=singulars, right=right_h.conj().T)


def singular_values(a) -> np.ndarray:
    """
    Descending singular values of ``a``.
    """
    a = as_matrix(a)
    if a.size == 0:
        return np.zeros(0)
    return np.linalg.svd(a, compute_uv=False)


def polar(a) -> PolarResult:
    """
    Right polar decomposition ``a = w @ p``.

    Computed from the SVD ``a = L S R^dagger`` as ``w = L R^dagger`` and
    ``p = R S R^dagger``.

    Raises
    ------
    ValidationError
        If ``a`` is not square.
    VerificationError
        If the positive factor has an eigenvalue below ``-tol_eig``.
    """
    a = require_square(a)
    result = svd(a)
    unitary_factor = result.left @ result.right.conj().T
    positive_factor = (result.right * result.singulars) @ result.right.conj().T
    positive_factor = 0.5 * (positive_factor + positive_factor.conj().T)
    if positive_factor.size:
        lowest = np.linalg.eigvalsh(positive_factor)[0]
        if lowest < -settings.get_setting('tol_eig'):
            raise VerificationError(f'Polar factor is not positive semidefinite, eigenvalue {lowest:.3e}.')
    return PolarResult(unitary_factor=unitary_factor, positive_factor=positive_factor)


def exp_unitary(h, t: Union[float, np.ndarray] = 1.0) -> np.ndarray:
    """
    The propagator ``exp(-i h t)`` of a Hermitian generator.

    Parameters
    ----------
    h : array_like
        A Hermitian matrix, or a stack of Hermitian matrices with shape ``(n, d, d)``.
    t : float or np.ndarray
        The duration. For a stack, either a scalar or one duration per matrix.

    Returns
    -------
    np.ndarray
        The unitary (or stack of unitaries).

    Raises
    ------
    ValidationError
        If ``h`` is not Hermitian within ``tol_herm``.
    """
    h = require_hermitian(h)
    h = 0.5 * (h + np.swapaxes(h, -1, -2).conj())
    if h.shape[-1] == 0:
        return h.copy()
    energies, vecs = np.linalg.eigh(h)
    t = np.asarray(t, dtype=float)
    if h.ndim == 3 and t.ndim == 1:
        t = t[:, None]
    phases = np.exp(-1j * energies * t)
    return np.einsum('...ij,...j,...kj->...ik', vecs, phases, vecs.conj())


def eigenangles(u, tol: float = None) -> np.ndarray:
    """
    Principal eigenangles of a unitary, in ``(-pi, pi]``.

    The complex Schur form of a normal matrix is diagonal, which keeps the
    eigenvectors orthonormal even for degenerate eigenvalues. An eigenvalue
    at exactly -1 maps to ``+pi``.
    """
    u = require_unitary(u, tol=tol)
    if u.shape[0] == 0:
        return np.zeros(0)
    schur_form, _ = linalg.schur(u, output='complex')
    return _principal(np.angle(np.diag(schur_form)))


def _principal(angles: np.ndarray) -> np.ndarray:
    angles = np.array(angles, dtype=float)
    angles[angles <= -np.pi] = np.pi
    return angles


def log_unitary(u, tol: float = None) -> np.ndarray:
    """
    The principal logarithm of a unitary.

    Parameters
    ----------
    u : array_like
        A unitary matrix.
    tol : float, optional
        Unitarity tolerance. Defaults to the ``tol_unitary`` setting.

    Returns
    -------
    np.ndarray
        Skew-Hermitian ``L`` with ``expm(L) = u`` and eigenangles in ``(-pi, pi]``.

    Raises
    ------
    ValidationError
        If ``u`` is not unitary.
    """
    u = require_unitary(u, tol=tol)
    if u.shape[0] == 0:
        return u.copy()
    schur_form, z = linalg.schur(u, output='complex')
    angles = _principal(np.angle(np.diag(schur_form)))
    log = (z * (1j * angles)) @ z.conj().T
    return 0.5 * (log - log.conj().T)


def spectral_norm(a) -> float:
    """
    The largest singular value of ``a``.
    """
    s = singular_values(a)
    return float(s[0]) if s.size else 0.


def hs_norm(a) -> float:
    """
    The Hilbert-Schmidt (Frobenius) norm ``sqrt(sum |a_ij|^2)``.
    """
    a = as_matrix(a)
    return float(np.sqrt(np.sum(np.abs(a)**2)))


def matrix_norm(a, kind: Union[NormKind, str]) -> float:
    """
    Dispatch to :func:`spectral_norm` or :func:`hs_norm`.
    """
    match NormKind(kind):
        case NormKind.SPECTRAL:
            return spectral_norm(a)
        case NormKind.HS:
            return hs_norm(a)


def clamp_contraction(singulars, window: float = None) -> np.ndarray:
    """
    Snap singular values within roundoff of one to exactly one.

    Unit singular values are only ever numerically unit, and ``arccos`` turns
    an error of ``1e-16`` into an angle of ``1e-8``.

    Parameters
    ----------
    singulars : array_like
        Singular values of a lossy operator.
    window : float, optional
        Largest distance from one that is treated as roundoff.
        Defaults to the ``clamp_window`` setting.

    Raises
    ------
    PassivityError
        If a singular value exceeds one by more than ``window``.
    """
    window = settings.get_setting('clamp_window') if window is None else window
    s = np.asarray(singulars, dtype=float)
    if s.size and s.max() > 1 + window:
        raise PassivityError(f'Operator is not a contraction: largest singular value {s.max():.16g}.')
    s = np.where(np.abs(s - 1) <= window, 1., s)
    return np.clip(s, 0., 1.)


def angle_from_cosine(x) -> np.ndarray:
    """
    ``arccos(x)`` for ``x`` in ``[0, 1]``, accurate at both ends of the range.
    """
    x = np.clip(np.asarray(x, dtype=float), 0., 1.)
    return np.arctan2(np.sqrt((1 - x) * (1 + x)), x)


def rotation_angles(singulars) -> np.ndarray:
    """
    Angles ``theta_i`` in ``[0, pi/2]`` with ``cos(theta_i) = s_i``.
    """
    return angle_from_cosine(clamp_contraction(singulars))


def check_density_matrix(rho, dim: int = None, tol: float = None) -> np.ndarray:
    """
    Validate a density matrix.

    Parameters
    ----------
    rho : array_like
        The candidate density matrix.
    dim : int, optional
        The expected dimension.
    tol : float, optional
        Tolerance on Hermiticity, trace and eigenvalues. Defaults to ``tol_prob``.

    Raises
    ------
    ValidationError
        If ``rho`` is not Hermitian, positive semidefinite and of unit trace.
    """
    tol = settings.get_setting('tol_prob') if tol is None else tol
    rho = require_square(rho, 'rho')
    if dim is not None and rho.shape[0] != dim:
        raise ValidationError(f'rho must be {dim}x{dim}, got {rho.shape}.')
    if hermiticity_error(rho) > tol:
        raise ValidationError('rho is not Hermitian.')
    trace = np.trace(rho).real
    if abs(trace - 1) > tol:
        raise ValidationError(f'rho must have unit trace, got {trace:.16g}.')
    lowest = np.linalg.eigvalsh(0.5 * (rho + rho.conj().T))[0]
    if lowest < -tol:
        raise ValidationError(f'rho is not positive semidefinite, eigenvalue {lowest:.3e}.')
    return rho


def pad(psi, dim: int) -> np.ndarray:
    """
    Embed a system vector into a larger space, ancilla amplitudes zero.
    """
    psi = as_state(psi)
    if dim < psi.size:
        raise ValidationError(f'Cannot embed a vector of length {psi.size} into dimension {dim}.')
    out = np.zeros(dim, dtype=complex)
    out[:psi.size] = psi
    return out


def block_diag(*blocks) -> np.ndarray:
    """
    Complex block diagonal matrix, tolerating empty blocks.
    """
    return linalg.block_diag(*[np.asarray(b, dtype=complex) for b in blocks])


def random_unitary(n: int, rng: np.random.Generator) -> np.ndarray:
    """
    A Haar random unitary.
    """
    if n == 0:
        return np.zeros((0, 0), dtype=complex)
    if n == 1:
        return np.exp(2j * np.pi * rng.random()) * np.ones((1, 1))
    return unitary_group.rvs(n, random_state=rng)


def random_hermitian(n: int, rng: np.random.Generator, norm: float = None) -> np.ndarray:
    """
    A random Hermitian matrix, optionally rescaled to a given spectral norm.
    """
    g = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    h = 0.5 * (g + g.conj().T)
    if norm is not None and n > 0:
        h = h * (norm / spectral_norm(h))
    return h


def random_density_matrix(n: int, rng: np.random.Generator) -> np.ndarray:
    """
    A random full-rank density matrix drawn from the Ginibre ensemble.
    """
    g = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    rho = g @ g.conj().T
    rho = 0.5 * (rho + rho.conj().T)
    return rho / np.trace(rho).real


def random_contraction(
    n: int,
    rng: np.random.Generator,
    s_min: float = 0.05,
    s_max: float = 1.0,
    marginal: bool = True
) -> np.ndarray:
    """
    A random contraction ``u @ diag(s) @ v`` with singular values in ``[s_min, s_max]``.

    Parameters
    ----------
    n : int
        The dimension.
    rng : np.random.Generator
        The random number generator.
    s_min, s_max : float
        Range of the singular values.
    marginal : bool
        If True, the largest singular value equals ``s_max``.
    """
    s = rng.uniform(s_min, s_max, size=n)
    if marginal and n > 0:
        s[np.argmax(s)] = s_max
    return (random_unitary(n, rng) * s) @ random_unitary(n, rng)

"""
Tests for the numerical kernel
"""
import numpy as np
import pytest
from scipy.linalg import expm

from usdembed import numkernel as nk
from usdembed.numkernel import NormKind
from usdembed.exceptions import ValidationError, PassivityError, VerificationError


def test_svd_reconstructs(rng):
    """
    The factors multiply back to the input.
    """
    a = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
    result = nk.svd(a)
    assert np.allclose(result.reconstruct(), a, atol=1e-12)
    assert np.all(np.diff(result.singulars) <= 0)
    assert nk.is_unitary(result.left)
    assert nk.is_unitary(result.right)


def test_svd_rejects_bad_input():
    with pytest.raises(ValidationError):
        nk.svd(np.ones(3))
    with pytest.raises(ValidationError):
        nk.svd(np.array([[1., np.nan], [0., 1.]]))


def test_polar(rng):
    """
    The polar factors are unitary and positive and multiply to the input.
    """
    a = nk.random_contraction(3, rng)
    result = nk.polar(a)
    assert np.allclose(result.unitary_factor @ result.positive_factor, a, atol=1e-12)
    assert nk.is_unitary(result.unitary_factor)
    assert np.allclose(result.positive_factor, result.positive_factor.conj().T)
    assert np.linalg.eigvalsh(result.positive_factor).min() > -1e-12


def test_polar_rejects_indefinite_factor(monkeypatch):
    bad = nk.SvdResult(left=np.eye(2, dtype=complex), singulars=np.array([1., -0.5]), right=np.eye(2, dtype=complex))
    monkeypatch.setattr(nk, 'svd', lambda a: bad)
    with pytest.raises(VerificationError):
        nk.polar(np.eye(2))


def test_exp_unitary_matches_expm(rng):
    h = nk.random_hermitian(4, rng)
    assert np.allclose(nk.exp_unitary(h, 0.7), expm(-0.7j * h), atol=1e-12)


def test_exp_unitary_batched(rng):
    """
    A stack of generators with one duration each.
    """
    hs = np.stack([nk.random_hermitian(3, rng) for _ in range(5)])
    ts = np.linspace(0.1, 0.5, 5)
    batched = nk.exp_unitary(hs, ts)
    for h, t, u in zip(hs, ts, batched):
        assert np.allclose(u, expm(-1j * t * h), atol=1e-12)


def test_exp_unitary_rejects_non_hermitian():
    with pytest.raises(ValidationError):
        nk.exp_unitary(np.array([[0., 1.], [0., 0.]]))


def test_log_unitary_round_trip(rng):
    h = nk.random_hermitian(4, rng, norm=2.0)
    u = nk.exp_unitary(h)
    log = nk.log_unitary(u)
    assert np.allclose(log, -1j * h, atol=1e-9)
    assert np.allclose(expm(log), u, atol=1e-10)


def test_log_unitary_branch():
    """
    An eigenvalue of -1 is mapped to the angle +pi.
    """
    angles = nk.eigenangles(np.diag([-1., 1.]))
    assert np.sort(angles) == pytest.approx([0., np.pi])
    assert nk.spectral_norm(nk.log_unitary(np.diag([-1., 1.]))) == pytest.approx(np.pi)


def test_log_unitary_rejects_non_unitary():
    with pytest.raises(ValidationError):
        nk.log_unitary(np.diag([1., 0.5]))


def test_norms():
    a = np.diag([3., -4.])
    assert nk.spectral_norm(a) == pytest.approx(4.)
    assert nk.hs_norm(a) == pytest.approx(5.)
    assert nk.matrix_norm(a, 'spectral') == pytest.approx(4.)
    assert nk.matrix_norm(a, NormKind.HS) == pytest.approx(5.)
    assert nk.spectral_norm(np.zeros((0, 0))) == 0.


def test_clamp_contraction():
    assert nk.clamp_contraction([1 + 1e-12, 0.5]).tolist() == [1., 0.5]
    assert nk.clamp_contraction([1 - 1e-15, 0.5]).tolist() == [1., 0.5]
    with pytest.raises(PassivityError):
        nk.clamp_contraction([1.1, 0.5])


def test_rotation_angles():
    """
    The angles are exact at both ends and in between.
    """
    theta = nk.rotation_angles([1., 0.5, 0.])
    assert theta == pytest.approx([0., np.pi / 3, np.pi / 2], abs=1e-15)


def test_check_density_matrix(rng):
    rho = nk.random_density_matrix(3, rng)
    assert np.allclose(nk.check_density_matrix(rho), rho)
    with pytest.raises(ValidationError):
        nk.check_density_matrix(2 * rho)
    with pytest.raises(ValidationError):
        nk.check_density_matrix(np.diag([1.5, -0.5]))
    with pytest.raises(ValidationError):
        nk.check_density_matrix(rho, dim=2)


def test_random_contraction(rng):
    k = nk.random_contraction(5, rng, s_min=0.2)
    s = nk.singular_values(k)
    assert s[0] == pytest.approx(1.)
    assert s[-1] >= 0.2 - 1e-12


def test_pad():
    assert nk.pad([1, 0], 4).tolist() == [1, 0, 0, 0]
    with pytest.raises(ValidationError):
        nk.pad([1, 0, 0], 2)


if __name__ == '__main__':
    pytest.main(args=[__file__])

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from photoatom.jacobi import JacobiConvergenceError, jacobi_eigh


def hermitian_with_spectrum(d, seed):
    rng = np.random.default_rng(seed)
    n = len(d)
    z = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    u, _ = np.linalg.qr(z)
    return (u * d) @ u.conj().T


def test_two_by_two_real():
    w, v = jacobi_eigh(np.array([[2.0, 1.0], [1.0, 2.0]]))
    np.testing.assert_allclose(w, [1.0, 3.0], atol=1e-15)
    assert abs(abs(v[0, 1]) - 1 / np.sqrt(2)) < 1e-15


def test_complex_two_by_two():
    h = np.array([[1.0, 2j], [-2j, 1.0]])
    w, v = jacobi_eigh(h)
    np.testing.assert_allclose(w, [-1.0, 3.0], atol=1e-14)
    np.testing.assert_allclose(h @ v, v * w, atol=1e-14)


@settings(max_examples=25, deadline=None)
@given(d=st.lists(st.floats(-10, 10), min_size=1, max_size=24), seed=st.integers(0, 2**32 - 1))
def test_recovers_constructed_spectrum(d, seed):
    h = hermitian_with_spectrum(np.array(d), seed)
    w, v = jacobi_eigh(h)
    scale = max(1.0, max(abs(x) for x in d))
    np.testing.assert_allclose(w, np.sort(d), atol=1e-12 * scale * len(d))
    np.testing.assert_allclose(v.conj().T @ v, np.eye(len(d)), atol=1e-12)
    np.testing.assert_allclose(h @ v, v * w, atol=1e-11 * scale * len(d))


def test_degenerate_spectrum():
    h = hermitian_with_spectrum(np.array([1.0, 1.0, 1.0, 0.0, 0.0]), 3)
    w, _ = jacobi_eigh(h)
    np.testing.assert_allclose(w, [0, 0, 1, 1, 1], atol=1e-13)


def test_zero_and_diagonal_input():
    w, v = jacobi_eigh(np.zeros((3, 3)))
    assert np.all(w == 0)
    w, v = jacobi_eigh(np.diag([3.0, 1.0, 2.0]))
    np.testing.assert_array_equal(w, [1.0, 2.0, 3.0])


def test_rejects_non_hermitian():
    with pytest.raises(ValueError):
        jacobi_eigh(np.array([[1.0, 2.0], [0.0, 1.0]]))
    with pytest.raises(ValueError):
        jacobi_eigh(np.ones((2, 3)))


def test_reports_non_convergence():
    h = hermitian_with_spectrum(np.arange(10.0), 1)
    with pytest.raises(JacobiConvergenceError):
        jacobi_eigh(h, max_sweeps=1)

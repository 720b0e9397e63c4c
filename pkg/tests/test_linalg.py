import numpy as np
import pytest

from kahlercheck.errors import FrameError, MetricError
from kahlercheck.linalg import (
    check_positive_definite,
    frame_normalizer,
    g_orthonormalize,
    haar_unitary,
    hermitian_inner,
    pencil_eigh,
    rng_for,
)


def random_metric(rng, dim):
    m = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    return m @ m.conj().T + dim * np.eye(dim)


def test_frame_normalizer_orthonormalizes():
    rng = np.random.default_rng(3)
    for dim in (1, 2, 3, 4):
        g = random_metric(rng, dim)
        c = frame_normalizer(g)
        np.testing.assert_allclose(c.T @ g @ c.conj(), np.eye(dim), atol=1e-10)


def test_g_orthonormalize_preserves_span_and_normalizes():
    rng = np.random.default_rng(4)
    g = random_metric(rng, 4)
    v = rng.normal(size=(4, 2)) + 1j * rng.normal(size=(4, 2))
    w = g_orthonormalize(g, v)
    np.testing.assert_allclose(w.T @ g @ w.conj(), np.eye(2), atol=1e-10)
    # columns of w stay inside the span of v
    proj, *_ = np.linalg.lstsq(v, w, rcond=None)
    np.testing.assert_allclose(v @ proj, w, atol=1e-9)


def test_g_orthonormalize_rejects_dependent_vectors():
    g = np.eye(3, dtype=complex)
    v = np.array([[1.0, 2.0], [1.0, 2.0], [0.0, 0.0]], dtype=complex)
    with pytest.raises(FrameError):
        g_orthonormalize(g, v)


def test_pencil_eigenvalues_are_ratio_extremes():
    rng = np.random.default_rng(5)
    g = random_metric(rng, 3)
    a = random_metric(rng, 3) - 2 * np.eye(3)
    vals, vecs = pencil_eigh(a, g)
    assert np.all(np.diff(vals) >= 0)
    for k in range(3):
        v = vecs[:, k]
        num = hermitian_inner(v, v, a)
        den = hermitian_inner(v, v, g)
        assert abs(den - 1.0) <= 1e-10
        assert abs(num / den - vals[k]) <= 1e-10
    # sampled ratios never escape the eigenvalue range
    for _ in range(200):
        v = rng.normal(size=3) + 1j * rng.normal(size=3)
        ratio = (hermitian_inner(v, v, a) / hermitian_inner(v, v, g)).real
        assert vals[0] - 1e-10 <= ratio <= vals[-1] + 1e-10


def test_haar_unitary_is_unitary_and_seeded():
    u = haar_unitary(4, rng_for(11, 0))
    np.testing.assert_allclose(u @ u.conj().T, np.eye(4), atol=1e-12)
    again = haar_unitary(4, rng_for(11, 0))
    np.testing.assert_array_equal(u, again)
    other = haar_unitary(4, rng_for(11, 1))
    assert np.max(np.abs(u - other)) > 1e-3


def test_validation_rejects_bad_metrics():
    with pytest.raises(MetricError):
        check_positive_definite(np.array([[1.0, 1.0], [0.0, 1.0]]))
    with pytest.raises(MetricError):
        check_positive_definite(np.diag([1.0, -2.0]).astype(complex))

import numpy as np
import pytest

from qbcommit import linalg
from qbcommit.errors import SpectralDecompositionError


def test_tensor_product_matches_kron():
    rng = np.random.default_rng(42)
    for _ in range(20):
        a = rng.standard_normal((3, 2)) + 1j * rng.standard_normal((3, 2))
        b = rng.standard_normal((2, 4)) + 1j * rng.standard_normal((2, 4))
        np.testing.assert_allclose(linalg.tensor_product(a, b), np.kron(a, b))


def test_tensor_product_entry_cap():
    a = np.zeros((1 << 11, 1))
    b = np.zeros((1 << 11, 1))
    with pytest.raises(ValueError):
        linalg.tensor_product(a, b, max_entries=1 << 20)


def test_partial_trace_of_product_states():
    rng = np.random.default_rng(3)
    for _ in range(10):
        a = rng.standard_normal((2, 2)) + 1j * rng.standard_normal((2, 2))
        b = rng.standard_normal((3, 3)) + 1j * rng.standard_normal((3, 3))
        m = np.kron(a, b)
        np.testing.assert_allclose(
            linalg.partial_trace(m, (2, 3), (1,)), a * np.trace(b), atol=1e-12
        )
        np.testing.assert_allclose(
            linalg.partial_trace(m, (2, 3), (0,)), b * np.trace(a), atol=1e-12
        )
        np.testing.assert_allclose(
            linalg.partial_trace(m, (2, 3), (0, 1)),
            np.array([[np.trace(a) * np.trace(b)]]),
            atol=1e-12,
        )


def test_partial_trace_three_slots():
    # Tracing the middle slot of a triple product leaves the outer product.
    rng = np.random.default_rng(4)
    a = rng.standard_normal((2, 2))
    b = rng.standard_normal((2, 2))
    c = rng.standard_normal((3, 3))
    m = np.kron(np.kron(a, b), c)
    np.testing.assert_allclose(
        linalg.partial_trace(m, (2, 2, 3), (1,)), np.kron(a, c) * np.trace(b),
        atol=1e-12,
    )


def test_trace_norm_hand_value():
    m = np.diag([3.0, -4.0])
    assert abs(linalg.trace_norm(m) - 7.0) < 1e-12
    assert abs(linalg.operator_norm(m) - 4.0) < 1e-12


def test_trace_norm_against_svd():
    rng = np.random.default_rng(11)
    for _ in range(10):
        m = rng.standard_normal((4, 4)) + 1j * rng.standard_normal((4, 4))
        s = np.linalg.svd(m, compute_uv=False)
        assert abs(linalg.trace_norm(m) - s.sum()) < 1e-10
        assert abs(linalg.operator_norm(m) - s.max()) < 1e-10


def test_norms_reject_nonsquare():
    with pytest.raises(ValueError):
        linalg.trace_norm(np.zeros((2, 3)))
    with pytest.raises(ValueError):
        linalg.operator_norm(np.zeros((2, 3)))


def test_as_state_normalization_check():
    v = linalg.as_state([1.0, 0.0])
    np.testing.assert_allclose(v, [1.0, 0.0])
    with pytest.raises(ValueError):
        linalg.as_state([1.0, 1.0])
    with pytest.raises(ValueError):
        linalg.as_state(np.zeros(3))


def test_normalize_state():
    v = linalg.normalize_state(np.array([3.0, 4.0j]))
    assert abs(np.linalg.norm(v) - 1.0) < 1e-12
    with pytest.raises(ValueError):
        linalg.normalize_state(np.zeros(2))


def test_hermitian_params_round_trip():
    for dim in range(1, 6):
        rng = linalg.spawn_rng(21, dim)
        z = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
        h = (z + z.conj().T) / 2.0
        p = linalg.params_from_hermitian(h)
        assert p.size == dim * dim
        np.testing.assert_allclose(linalg.hermitian_from_params(p), h, atol=1e-12)


def test_unitary_params_round_trip():
    for dim in range(1, 6):
        v = linalg.random_unitary(dim, linalg.spawn_rng(22, dim))
        p = linalg.params_from_unitary(v)
        v2 = linalg.unitary_from_params(p)
        np.testing.assert_allclose(v2, v, atol=1e-10)
        assert linalg.unitarity_residual(v2) < 1e-12


def test_unitary_from_params_is_unitary():
    rng = np.random.default_rng(5)
    for dim in (1, 2, 3, 4):
        p = rng.standard_normal(dim * dim) * 2.0
        v = linalg.unitary_from_params(p)
        assert v.shape == (dim, dim)
        assert linalg.unitarity_residual(v) < 1e-12


def test_unitary_from_params_rejects_bad_length():
    with pytest.raises(ValueError):
        linalg.unitary_from_params(np.zeros(5))


def test_unitary_param_gradient_matches_finite_differences():
    # Pushing a Wirtinger gradient through V = exp(iH(p)) is the one piece
    # of calculus everything else leans on, so it gets a direct check.
    for dim in (1, 2, 3):
        rng = linalg.spawn_rng(23, dim)
        p0 = linalg.params_from_unitary(linalg.random_unitary(dim, rng))
        g = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))

        def f(p):
            v = linalg.unitary_from_params(p)
            return float(np.real(np.sum(np.conj(g) * v) + np.sum(g * np.conj(v))))

        grad = linalg.unitary_param_gradient(p0, g)
        h = 1e-6
        for i in range(p0.size):
            bump = np.zeros_like(p0)
            bump[i] = h
            fd = (f(p0 + bump) - f(p0 - bump)) / (2.0 * h)
            assert abs(grad[i] - fd) < 5e-6


def test_unitary_param_gradient_degenerate_eigenvalues():
    # Identity has a fully degenerate spectrum; the divided-difference kernel
    # must fall back to its diagonal limit there.
    dim = 3
    p0 = np.zeros(dim * dim)
    rng = linalg.spawn_rng(24)
    g = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))

    def f(p):
        v = linalg.unitary_from_params(p)
        return float(np.real(np.sum(np.conj(g) * v) + np.sum(g * np.conj(v))))

    grad = linalg.unitary_param_gradient(p0, g)
    h = 1e-6
    for i in range(p0.size):
        bump = np.zeros_like(p0)
        bump[i] = h
        fd = (f(p0 + bump) - f(p0 - bump)) / (2.0 * h)
        assert abs(grad[i] - fd) < 5e-6


def test_require_unitary():
    v = linalg.random_unitary(3, linalg.spawn_rng(31))
    linalg.require_unitary(v)
    with pytest.raises(ValueError):
        linalg.require_unitary(v * 1.01)


def test_random_state_deterministic_and_phase_fixed():
    a = linalg.random_state(4, linalg.spawn_rng(7, 1))
    b = linalg.random_state(4, linalg.spawn_rng(7, 1))
    c = linalg.random_state(4, linalg.spawn_rng(7, 2))
    np.testing.assert_array_equal(a, b)
    assert np.abs(a - c).max() > 1e-3
    assert abs(np.linalg.norm(a) - 1.0) < 1e-12
    first = a[np.flatnonzero(np.abs(a) > 1e-12)[0]]
    assert abs(first.imag) < 1e-12 and first.real > 0.0
    np.testing.assert_allclose(
        linalg.random_state(1, linalg.spawn_rng(0)), [1.0], atol=1e-12
    )


def test_random_unitary_deterministic():
    a = linalg.random_unitary(3, linalg.spawn_rng(8, 0))
    b = linalg.random_unitary(3, linalg.spawn_rng(8, 0))
    np.testing.assert_array_equal(a, b)
    assert linalg.unitarity_residual(a) < 1e-12


def test_spawn_rng_tags_give_distinct_streams():
    x = linalg.spawn_rng(1, 2, 3).standard_normal(4)
    y = linalg.spawn_rng(1, 2, 4).standard_normal(4)
    assert np.abs(x - y).max() > 1e-6


def test_eigh_or_error_raises_typed():
    bad = np.full((2, 2), np.nan)
    with pytest.raises(SpectralDecompositionError):
        linalg.eigh_or_error(bad)

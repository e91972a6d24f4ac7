import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from elotope.hodge import check_skew, div, frobenius_norm, grad, hodge_decompose, inner, is_stacm, rot

from .conftest import CYCLIC, random_skew

finite = st.floats(-50, 50, allow_nan=False, allow_infinity=False)
vectors = st.integers(1, 8).flatmap(lambda m: arrays(float, m, elements=finite))


@st.composite
def skews(draw):
    m = draw(st.integers(1, 8))
    x = draw(arrays(float, (m, m), elements=finite))
    return np.triu(x, 1) - np.triu(x, 1).T


def rot_by_summation(a):
    m = len(a)
    out = np.zeros_like(a)
    for i in range(m):
        for j in range(m):
            out[i, j] = sum(a[i, j] + a[j, k] + a[k, i] for k in range(m)) / m
    return out


def test_grad_examples():
    np.testing.assert_array_equal(grad([1, 2, 3]), [[0, -1, -2], [1, 0, -1], [2, 1, 0]])
    np.testing.assert_array_equal(grad([0, 0, 0]), np.zeros((3, 3)))
    np.testing.assert_array_equal(grad([4.5, 4.5, 4.5]), np.zeros((3, 3)))


def test_div_examples():
    np.testing.assert_allclose(div(grad([1, 2, 3])), [-1, 0, 1], atol=1e-15)
    np.testing.assert_array_equal(div(np.zeros((4, 4))), np.zeros(4))
    np.testing.assert_array_equal(div(CYCLIC), np.zeros(3))


def test_rot_examples():
    np.testing.assert_allclose(rot(grad([0.3, -2.0, 5.0])), np.zeros((3, 3)), atol=1e-15)
    np.testing.assert_allclose(rot_by_summation(CYCLIC), CYCLIC, atol=1e-15)
    np.testing.assert_allclose(rot(CYCLIC), CYCLIC, atol=1e-15)
    np.testing.assert_array_equal(rot(np.zeros((3, 3))), np.zeros((3, 3)))


def test_rot_matches_direct_summation(rng):
    for m in range(1, 7):
        a = rng.normal(size=(m, m))  # rot's summation form is defined for any square matrix
        np.testing.assert_allclose(rot(a), rot_by_summation(a), atol=1e-12)


def test_decompose_examples():
    a = grad([1, 2, 3])
    s, c = hodge_decompose(a)
    np.testing.assert_allclose(s, a, atol=1e-15)
    np.testing.assert_allclose(c, 0, atol=1e-15)

    s, c = hodge_decompose(CYCLIC)
    np.testing.assert_allclose(s, 0, atol=1e-15)
    np.testing.assert_allclose(c, CYCLIC, atol=1e-15)

    s, c = hodge_decompose(grad([1, 0, -1]) + CYCLIC)
    np.testing.assert_allclose(s, grad([1, 0, -1]), atol=1e-10)
    np.testing.assert_allclose(c, CYCLIC, atol=1e-10)


def test_is_stacm():
    assert is_stacm(grad([1.0, 2.0, -3.0]), 1e-9)
    assert not is_stacm(CYCLIC, 1e-9)
    assert is_stacm(grad([1.0, 2.0, -3.0]) + 1e-12 * CYCLIC, 1e-9)


def test_frobenius():
    assert frobenius_norm(np.zeros((3, 3))) == 0
    assert frobenius_norm(CYCLIC) == pytest.approx(np.sqrt(6), abs=1e-15)


def test_check_skew_rejects():
    with pytest.raises(ValueError, match="skew"):
        check_skew([[0, 1], [1, 0]])
    with pytest.raises(ValueError, match="non-finite"):
        check_skew([[0, np.inf], [-np.inf, 0]])
    with pytest.raises(ValueError, match="square"):
        check_skew(np.zeros((2, 3)))


@settings(max_examples=200, deadline=None)
@given(vectors)
def test_div_grad_centres(v):
    np.testing.assert_allclose(div(grad(v)), v - v.mean(), atol=1e-12 * max(1, np.abs(v).max()))


@settings(max_examples=200, deadline=None)
@given(skews())
def test_decomposition_properties(a):
    s, c = hodge_decompose(a)
    scale = max(1.0, np.abs(a).max())
    np.testing.assert_allclose(s + c, a, atol=1e-12 * scale)
    norm2 = frobenius_norm(a) ** 2
    assert abs(inner(s, c)) <= 1e-10 * max(norm2, 1.0)
    assert frobenius_norm(a) ** 2 == pytest.approx(frobenius_norm(s) ** 2 + frobenius_norm(c) ** 2,
                                                   rel=1e-10, abs=1e-10)
    np.testing.assert_allclose(rot(a), a - grad(div(a)), atol=1e-12 * scale)
    np.testing.assert_allclose(rot(rot(a)), rot(a), atol=1e-11 * scale)


@settings(max_examples=100, deadline=None)
@given(st.integers(1, 6).flatmap(lambda m: st.tuples(arrays(float, m, elements=finite),
                                                     arrays(float, m, elements=finite))),
       finite, finite)
def test_grad_linear(uv, alpha, beta):
    u, v = uv
    lhs = grad(alpha * u + beta * v)
    rhs = alpha * grad(u) + beta * grad(v)
    np.testing.assert_allclose(lhs, rhs, atol=1e-12 * max(1.0, np.abs(lhs).max(), np.abs(rhs).max()))


@pytest.mark.parametrize("m", [3, 4, 5])
def test_subspace_dimensions(m):
    # STACMs: image of grad, dimension m-1; cyclic: image of rot on skew matrices, (m-1)(m-2)/2
    stacm = np.array([grad(e).ravel() for e in np.eye(m)])
    assert np.linalg.matrix_rank(stacm, tol=1e-10) == m - 1
    basis = []
    for i in range(m):
        for j in range(i + 1, m):
            e = np.zeros((m, m))
            e[i, j], e[j, i] = 1.0, -1.0
            basis.append(e)
    cyclic = np.array([rot(e).ravel() for e in basis])
    assert np.linalg.matrix_rank(cyclic, tol=1e-10) == (m - 1) * (m - 2) // 2
    assert np.linalg.matrix_rank(np.vstack([stacm, cyclic]), tol=1e-10) == m * (m - 1) // 2


def test_random_skews_reconstruct(rng):
    for _ in range(20):
        a = random_skew(rng, rng.integers(2, 9))
        s, c = hodge_decompose(a)
        assert np.max(np.abs(s + c - a)) <= 1e-12

import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from cstarmod import algebra as alg
from cstarmod.algebra import AlgebraDescriptor, AlgElement
from cstarmod.errors import DomainError, GrammarError, ShapeError

M2 = AlgebraDescriptor.parse("M2")


def el(desc, *blocks):
    return AlgElement(desc, [np.array(b, dtype=complex) for b in blocks])


def test_descriptor_grammar_and_dimension():
    d = AlgebraDescriptor.parse("M2+M3")
    assert d.blocks == (2, 3) and d.dim == 13 and len(d.basis()) == 13
    assert str(AlgebraDescriptor.parse("M2 + C")) == "M2+C"
    for bad in ("", "M0", "X2", "M2++C"):
        with pytest.raises((GrammarError, ShapeError)):
            AlgebraDescriptor.parse(bad)


def test_star_of_scalar_block():
    c = AlgebraDescriptor.parse("C")
    assert alg.star(el(c, [[1j]])).blocks[0][0, 0] == -1j


def test_matrix_unit_product():
    e11, e12 = M2.matrix_unit(0, 0, 0), M2.matrix_unit(0, 0, 1)
    assert np.array_equal(alg.mul(e11, e12).flat(), e12.flat())
    assert np.array_equal(alg.mul(e12, e11).flat(), M2.zero().flat())


def test_additive_inverse_and_unit():
    a = alg.random_element(M2, np.random.default_rng(0))
    assert alg.is_zero(alg.add(a, alg.scal(-1, a)))
    assert np.allclose(alg.mul(alg.unit(M2), a).flat(), a.flat())
    u = AlgebraDescriptor.parse("M2+C").unit()
    assert np.array_equal(u.blocks[0], np.eye(2)) and u.blocks[1][0, 0] == 1


def test_descriptor_mismatch():
    with pytest.raises(ShapeError):
        M2.unit() + AlgebraDescriptor.parse("C").unit()


def test_parse_element_tokens():
    d = AlgebraDescriptor.parse("M2+M3")
    a = d.parse_element("e12+block2")
    assert a.blocks[0][0, 1] == 1 and np.array_equal(a.blocks[1], np.eye(3))
    assert d.parse_element("e33@2").blocks[1][2, 2] == 1
    with pytest.raises(GrammarError):
        d.parse_element("e33")


def test_hermitian_eig_examples():
    s = alg.hermitian_eig(el(M2, [[2, 1], [1, 2]]))
    np.testing.assert_allclose(s.eigenvalues[0], [3, 1], atol=1e-12)
    s = alg.hermitian_eig(el(M2, [[3, 0], [0, 4]]))
    np.testing.assert_allclose(s.eigenvalues[0], [4, 3])
    with pytest.raises(DomainError):
        alg.hermitian_eig(M2.matrix_unit(0, 0, 1))


def test_is_positive_examples(rng):
    v = alg.is_positive(el(M2, [[1, 2], [2, 1]]))
    assert not v and v.witness == pytest.approx(-1.0)
    a = alg.random_element(AlgebraDescriptor.parse("M2+M3"), rng)
    assert alg.is_positive(a.star() * a)
    assert alg.is_positive(M2.zero())
    assert alg.is_positive(M2.matrix_unit(0, 0, 1)).witness == "not self-adjoint"


def test_sqrt_positive_examples():
    r = alg.sqrt_positive(el(M2, [[4, 0], [0, 9]]))
    np.testing.assert_allclose(r.blocks[0], np.diag([2, 3]), atol=1e-12)
    r = alg.sqrt_positive(el(M2, [[2, 1], [1, 2]]))
    s3 = math.sqrt(3)
    np.testing.assert_allclose(r.blocks[0], 0.5 * np.array([[s3 + 1, s3 - 1], [s3 - 1, s3 + 1]]), atol=1e-12)
    np.testing.assert_allclose((r * r).blocks[0], [[2, 1], [1, 2]], atol=1e-12)
    assert alg.norm(alg.sqrt_positive(M2.zero())) == 0
    with pytest.raises(DomainError):
        alg.sqrt_positive(el(M2, [[1, 2], [2, 1]]))


def test_norm_examples(rng):
    assert alg.norm(el(M2, [[3, 0], [0, 4]])) == pytest.approx(4)
    assert alg.norm(M2.matrix_unit(0, 0, 1)) == pytest.approx(1)
    a = alg.random_element(M2, rng)
    assert alg.norm(alg.scal(2, a)) == pytest.approx(2 * alg.norm(a))


@settings(max_examples=30, deadline=None)
@given(spec=st.sampled_from(["C", "M2", "M2+C", "M2+M3", "C+C+M3"]), seed=st.integers(0, 2**32 - 1))
def test_cstar_identity_and_norm_oracle(spec, seed):
    d = AlgebraDescriptor.parse(spec)
    rng = np.random.default_rng(seed)
    a = alg.random_element(d, rng)
    n = alg.norm(a)
    assert alg.norm(a.star() * a) == pytest.approx(n * n, rel=1e-10)
    assert n == pytest.approx(max(np.linalg.norm(b, 2) for b in a.blocks), rel=1e-10)


@settings(max_examples=30, deadline=None)
@given(seed=st.integers(0, 2**32 - 1))
def test_sqrt_squares_back(seed):
    d = AlgebraDescriptor.parse("M2+M3+C")
    p = alg.random_positive(d, np.random.default_rng(seed))
    r = alg.sqrt_positive(p)
    assert alg.is_positive(r)
    assert alg.norm(r * r - p) <= 1e-9 * max(1.0, alg.norm(p))


def test_multiplication_matrices_match_products(rng):
    d = AlgebraDescriptor.parse("M2+M3")
    a, b = alg.random_element(d, rng), alg.random_element(d, rng)
    np.testing.assert_allclose(alg.left_mult_matrix(a) @ b.flat(), (a * b).flat(), atol=1e-12)
    np.testing.assert_allclose(alg.right_mult_matrix(a) @ b.flat(), (b * a).flat(), atol=1e-12)
    np.testing.assert_allclose(np.vdot(a.flat(), b.flat()),
                               sum(np.trace(x.conj().T @ y) for x, y in zip(a.blocks, b.blocks)), atol=1e-12)


def test_json_roundtrip(rng):
    d = AlgebraDescriptor.parse("M2+C")
    a = alg.random_element(d, rng)
    b = alg.element_from_json(d, alg.element_to_json(a))
    assert np.array_equal(a.flat(), b.flat())


def test_immutable():
    u = M2.unit()
    with pytest.raises(AttributeError):
        u.blocks = ()
    with pytest.raises(ValueError):
        u.blocks[0][0, 0] = 5


def test_kernel_invariants_on_random_elements():
    rng = np.random.default_rng(7)
    d = AlgebraDescriptor.parse("M2+M3+C")
    worst_rec = 0.0
    for _ in range(1000):
        h = alg.random_hermitian(d, rng)
        s = alg.hermitian_eig(h)
        for b, w, u in zip(h.blocks, s.eigenvalues, s.unitaries):
            worst_rec = max(worst_rec, np.linalg.norm(u @ np.diag(w) @ u.conj().T - b, 2) / max(1.0, alg.norm(h)))
    assert worst_rec <= 1e-10
    for _ in range(200):
        a, b = alg.random_element(d, rng), alg.random_element(d, rng)
        assert alg.norm(a * b) <= alg.norm(a) * alg.norm(b) + 1e-9
        c = alg.random_positive(d, rng)
        assert alg.is_positive((a.star() * a).scale(alg.norm(c)) - a.star() * c * a)
        p = alg.random_positive(d, rng)
        r = alg.sqrt_positive(alg.sqrt_positive(p))
        assert alg.norm(r * r * r * r - p) <= 10 * 1e-10 * max(1.0, alg.norm(p))

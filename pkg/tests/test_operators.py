import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from cstarmod import algebra as alg
from cstarmod.algebra import AlgebraDescriptor
from cstarmod.errors import DomainError, ShapeError
from cstarmod.module import free_module, ideal_module, inner, parse_module, random_module, random_vector
from cstarmod.operators import (
    AdjointableOp,
    a_linearity_residual,
    adjoint_identity_residual,
    adjoint_properties_check,
    adjointable_dimension,
    commutant_dimension,
    compact_ideal,
    cstar_identity_check,
    ideal_check,
    k_equals_l_check,
    k_of_a_isomorphism,
    left_multiplication,
    op_probe_norm,
    operator_norm,
    random_adjointable,
    theta,
    theta_identities_check,
)

M2 = AlgebraDescriptor.parse("M2")


def test_riesz_adjoint_matches_conjugate_transpose(rng):
    for _ in range(20):
        x = random_module(rng)
        f = random_module(rng, x.algebra)
        t = random_adjointable(x, f, rng)
        np.testing.assert_allclose(t.adjoint_matrix, t.matrix.conj().T, atol=1e-10)
        assert adjoint_identity_residual(t) < 1e-10


def test_left_multiplication_adjoint(rng):
    sp = free_module("M2+C", 2)
    a = alg.random_element(sp.algebra, rng)
    t = left_multiplication(sp, a)
    np.testing.assert_allclose(t.adjoint_matrix, left_multiplication(sp, a.star()).matrix, atol=1e-12)


def test_non_linear_map_rejected(rng):
    sp = free_module(M2, 1)
    with pytest.raises(DomainError):
        AdjointableOp(sp, sp, np.diag(np.arange(4.0)))


def test_operator_shape_errors():
    with pytest.raises(ShapeError):
        AdjointableOp(free_module("C"), free_module(M2), np.zeros((4, 1)))
    a = AdjointableOp.identity(free_module(M2, 1))
    b = AdjointableOp.identity(free_module(M2, 2))
    with pytest.raises(ShapeError):
        a @ b


def test_theta_of_matrix_units():
    sp = free_module(M2, 1)
    e11 = sp.vector([M2.matrix_unit(0, 0, 0)])
    c = alg.random_element(M2, np.random.default_rng(5))
    out = theta(e11, e11).op(sp.vector([c]))
    np.testing.assert_allclose(out.coords[0].flat(), (M2.matrix_unit(0, 0, 0) * c).flat(), atol=1e-14)


def test_k_of_a_images_of_matrix_units():
    sp = free_module(M2, 1)
    one = sp.vector([M2.unit()])
    e = {ij: sp.vector([M2.matrix_unit(0, *ij)]) for ij in [(0, 0), (0, 1), (1, 1)]}
    # Theta_{a,b}(1) = a <b, 1> = a b*
    assert np.allclose(theta(e[0, 1], e[0, 0]).op(one).flat(), 0)
    np.testing.assert_allclose(theta(e[0, 1], e[1, 1]).op(one).flat(), e[0, 1].flat(), atol=1e-14)


@pytest.mark.parametrize("spec", ["C", "M2", "M2+C", "M2+M3"])
def test_k_of_a_isomorphism(spec, rng):
    assert k_of_a_isomorphism(spec, rng, trials=10)


@settings(max_examples=20, deadline=None)
@given(seed=st.integers(0, 2**32 - 1))
def test_theta_identities(seed):
    rng = np.random.default_rng(seed)
    x_sp = random_module(rng, max_dim=24)
    f_sp = random_module(rng, x_sp.algebra, max_dim=24)
    x, u = random_vector(x_sp, rng), random_vector(f_sp, rng)
    y, v = random_vector(f_sp, rng), random_vector(f_sp, rng)
    t = random_adjointable(x_sp, x_sp, rng)
    assert theta_identities_check(x, y, u, v, t)


def test_k_equals_l_dimensions(rng):
    for spec in ["free(M2, rank=2)", "ideal(M2+C, gen=e11@1)", "tensor(dim=2, M2+M3)", "free(C+C, rank=3)"]:
        sp = parse_module(spec)
        assert k_equals_l_check(sp)
        assert compact_ideal(sp).dim == adjointable_dimension(sp) == commutant_dimension(sp)
    assert adjointable_dimension(free_module(M2, 2)) == 16
    assert adjointable_dimension(free_module("M2+C", 3)) == 45


def test_compact_ideal_bi_ideal(rng):
    sp = free_module("M2+C", 2)
    ideal = compact_ideal(sp)
    samples = [random_adjointable(sp, sp, rng) for _ in range(3)]
    assert ideal_check(ideal, samples, rng, products=50)
    x, y = random_vector(sp, rng), random_vector(sp, rng)
    assert ideal.contains(theta(x, y).op)


def test_operator_norm_against_probes(rng):
    sp = free_module("M2+M3", 2)
    for _ in range(5):
        t = random_adjointable(sp, sp, rng)
        n = operator_norm(t)
        p = op_probe_norm(t, rng)
        assert p <= n * (1 + 1e-9)
        assert abs(n - p) <= 1e-3 * max(1.0, n)
        assert cstar_identity_check(t)


def test_norm_of_left_multiplication(rng):
    sp = free_module(M2, 1)
    a = alg.random_element(M2, rng)
    assert operator_norm(left_multiplication(sp, a)) == pytest.approx(alg.norm(a), rel=1e-10)


def test_adjoint_properties(rng):
    x = random_module(rng)
    f = random_module(rng, x.algebra)
    g = random_module(rng, x.algebra)
    t = random_adjointable(x, f, rng)
    s = random_adjointable(f, g, rng)
    assert adjoint_properties_check(s, t)
    assert a_linearity_residual(x, f, t.matrix) < 1e-12


def test_adjoint_satisfies_defining_identity(rng):
    x = free_module("M2+C", 2)
    f = ideal_module("M2+C", "e11@1+block2")
    t = random_adjointable(x, f, rng)
    u, v = random_vector(x, rng), random_vector(f, rng)
    lhs = inner(t(u), v)
    rhs = inner(u, t.adjoint()(v))
    assert alg.norm(lhs - rhs) < 1e-10


def test_operator_json():
    sp = free_module("C", 1)
    data = AdjointableOp.identity(sp).to_json()
    assert data == {"domain": sp.spec, "codomain": sp.spec, "matrix": [[[1.0, 0.0]]]}

from fractions import Fraction as Q

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from cstarmod import algebra as alg
from cstarmod.algebra import AlgebraDescriptor
from cstarmod.errors import DomainError, GrammarError, ShapeError
from cstarmod.module import (
    batch_module_norms,
    cauchy_schwarz_residual,
    direct_sum,
    free_module,
    gram_positivity,
    ideal_module,
    inner,
    inner_product_axioms_check,
    norm_duality_check,
    pairwise_inner,
    parse_module,
    random_module,
    random_vector,
    right_action_norm_check,
    scalar_norm,
    tensor_element,
    tensor_module,
    vector_from_json,
)
from cstarmod.polyfun import parse_piecewise

M2 = AlgebraDescriptor.parse("M2")


def test_inner_product_of_matrix_units():
    x2 = free_module(M2, 2)
    e11, e12 = M2.matrix_unit(0, 0, 0), M2.matrix_unit(0, 0, 1)
    x = x2.vector([e11, M2.zero()])
    y = x2.vector([e12, M2.zero()])
    assert np.array_equal(inner(x, y).flat(), e12.flat())
    cs = cauchy_schwarz_residual(x, y)
    assert cs.verdict and alg.norm(cs.residual) == pytest.approx(0, abs=1e-14)


def test_norm_examples():
    x2 = free_module(M2, 2)
    x = x2.vector([M2.unit().scale(2), M2.zero()])
    assert scalar_norm(x) == pytest.approx(2)
    assert norm_duality_check(x, np.random.default_rng(0))
    with pytest.raises(DomainError):
        norm_duality_check(x2.zero(), np.random.default_rng(0))


@pytest.mark.parametrize("spec", ["C", "M2", "M2+C", "M2+M3"])
@pytest.mark.parametrize("rank", [1, 3])
def test_cauchy_schwarz_random(spec, rank, rng):
    space = free_module(spec, rank)
    for _ in range(50):
        x, y = random_vector(space, rng), random_vector(space, rng)
        cs = cauchy_schwarz_residual(x, y)
        assert cs.min_eigenvalue >= -1e-8 * max(1.0, cs.scale)


@settings(max_examples=30, deadline=None)
@given(seed=st.integers(0, 2**32 - 1))
def test_inner_product_axioms(seed):
    rng = np.random.default_rng(seed)
    space = random_module(rng)
    x, y, z = (random_vector(space, rng) for _ in range(3))
    a = alg.random_element(space.algebra, rng)
    lam = complex(rng.standard_normal(), rng.standard_normal())
    assert inner_product_axioms_check(x, y, z, a, lam)
    assert right_action_norm_check(x, a)


def test_pairwise_inner_and_batch_norms_match_scalar_path(rng):
    space = free_module("M2+M3", 2)
    xs = [random_vector(space, rng) for _ in range(4)]
    flats = np.array([x.flat() for x in xs])
    g = pairwise_inner(space, flats, flats)
    for p in range(4):
        for q in range(4):
            np.testing.assert_allclose(g[p, q], inner(xs[p], xs[q]).flat(), atol=1e-12)
    np.testing.assert_allclose(batch_module_norms(space, flats), [scalar_norm(x) for x in xs], rtol=1e-10)


def test_module_spec_grammar_roundtrip(rng):
    for text in ["free(M2+M3, rank=4)", "tensor(dim=3, M2)", "ideal(M2, gen=e11)", "dsum(free(M2, rank=2), ideal(M2, gen=e12))"]:
        sp = parse_module(text)
        assert parse_module(sp.spec) == sp
    for _ in range(30):
        sp = random_module(rng)
        assert parse_module(sp.spec) == sp and sp.dim == parse_module(sp.spec).dim
    for bad in ["free(M2, rank=0)", "blah(M2)", "ideal(M2)", "free(M2"]:
        with pytest.raises(GrammarError):
            parse_module(bad)


def test_dimensions():
    assert free_module("M2+C", 3).dim == 15
    assert ideal_module(M2, "e11").dim == 2
    assert tensor_module(3, M2).dim == 12
    assert direct_sum([free_module(M2, 2), ideal_module(M2, "e12")]).dim == 10


def test_ideal_membership():
    sp = ideal_module(M2, "e11")
    assert sp.contains(sp.vector([M2.matrix_unit(0, 0, 1)]))
    with pytest.raises(DomainError):
        sp.vector([M2.matrix_unit(0, 1, 0)])


def test_tensor_elements_cancel_and_gram_is_positive(rng):
    sp = tensor_module(2, M2)
    e1, e2 = np.array([1, 0]), np.array([0, 1])
    a = alg.random_element(M2, rng)
    x = tensor_element(sp, [e1 + e2, e1 - e2], [a, a])
    y = tensor_element(sp, [e1], [a.scale(2)])
    np.testing.assert_allclose(x.flat(), y.flat(), atol=1e-14)
    zero = tensor_element(sp, [e1, e1], [a, a.scale(-1)])
    assert np.allclose(zero.flat(), 0)
    res = gram_positivity(sp, [e1, e1 + 1j * e2, e2], [alg.random_element(M2, rng) for _ in range(3)])
    assert res.positive and res.formal_residual < 1e-12 and res.zero_forces_zero
    with pytest.raises(ShapeError):
        tensor_element(sp, [np.ones(3)], [a])


def test_vector_json_roundtrip(rng):
    sp = parse_module("dsum(free(M2+C, rank=2), ideal(M2+C, gen=e11@1))")
    x = random_vector(sp, rng)
    y = vector_from_json(x.to_json())
    assert y.space == sp and np.array_equal(x.flat(), y.flat())


def test_polynomial_module_inner_product():
    sp = parse_module("ideal(PP[0,1], vanish=1/2)")
    f = sp.vector([parse_piecewise("PP[0,1]", "t - 1/2")])
    ip = inner(f, f)
    assert ip == parse_piecewise("PP[0,1]", "(t - 1/2)^2")
    assert scalar_norm(f).lo == Q(1, 2)
    with pytest.raises(DomainError):
        sp.vector([parse_piecewise("PP[0,1]", "t")])


def test_axioms_thousand_triples_matrix_backend():
    from cstarmod.suites import SuiteConfig, run_suite

    assert run_suite(SuiteConfig("inner-product-axioms", module="random", trials=1000, seed=9)).ok


def test_axioms_exact_on_polynomial_backend():
    from fractions import Fraction

    from cstarmod.polyfun import is_nonnegative, random_piecewise

    rng = np.random.default_rng(13)
    for spec in ["free(PP[0,1]u[2,3], rank=2)", "ideal(PP[0,1], vanish=1/2)"]:
        sp = parse_module(spec)
        for _ in range(500):
            x, y, z = (random_vector(sp, rng) for _ in range(3))
            a = random_piecewise(sp.algebra, rng, max_degree=2)
            lam = (Fraction(int(rng.integers(-4, 5)), 3), Fraction(int(rng.integers(-4, 5)), 7))
            assert inner(x, y + z.scale(lam)) == inner(x, y) + inner(x, z).scale(lam)
            assert inner(x, y.right(a)) == inner(x, y) * a
            assert inner(x, y).star() == inner(y, x)
            assert is_nonnegative(inner(x, x))

import numpy as np
import pytest

from cstarmod import algebra as alg
from cstarmod.algebra import AlgebraDescriptor
from cstarmod.module import free_module, ideal_module, parse_module, random_module, random_vector
from cstarmod.submodule import (
    complement_checks,
    inner_span_dim,
    is_full,
    orthogonal_complement,
    pythagoras_defect,
    submodule_generate,
    truncated_direct_sum_check,
    xa_span_dim,
)

M2 = AlgebraDescriptor.parse("M2")


def test_generated_submodule_and_complement():
    x2 = free_module(M2, 2)
    f = submodule_generate(x2, [x2.vector([M2.matrix_unit(0, 0, 0), M2.zero()])])
    assert f.dim == 2
    fp = orthogonal_complement(f)
    assert fp.dim == 6
    assert complement_checks(f)
    assert f.invariance_residual() < 1e-12


def test_empty_and_whole():
    x2 = free_module(M2, 2)
    empty = submodule_generate(x2, [])
    assert empty.dim == 0 and orthogonal_complement(empty).dim == 8
    whole = submodule_generate(x2, [x2.vector([M2.unit(), M2.zero()]), x2.vector([M2.zero(), M2.unit()])])
    assert whole.dim == 8 and orthogonal_complement(whole).dim == 0


def test_random_complements(rng):
    for _ in range(30):
        sp = random_module(rng)
        gens = [random_vector(sp, rng).right(sp.algebra.matrix_unit(0, 0, 0))
                for _ in range(int(rng.integers(1, 3)))]
        f = submodule_generate(sp, gens)
        assert complement_checks(f), sp.spec


def test_fullness():
    assert is_full(free_module(M2, 1))
    assert is_full(ideal_module(M2, "e11"))
    assert not is_full(parse_module("ideal(M2+C, gen=e11@1)"))
    assert inner_span_dim(free_module("M2+C", 1)) == 5
    assert xa_span_dim(free_module("M2+C", 2)) == 10


def test_pythagoras_holds_in_commutative_case():
    sp = free_module("C+C", 1)
    d = sp.algebra
    f = sp.vector([d.matrix_unit(0, 0, 0)])
    g = sp.vector([d.matrix_unit(1, 0, 0)])
    out = pythagoras_defect(f, g)
    assert out["inner_norm"] == 0
    assert out["lhs"] == pytest.approx(1) and out["rhs"] == pytest.approx(2)


def test_truncated_direct_sum(rng):
    sp = free_module("M2+C", 1)
    xs = [random_vector(sp, rng) for _ in range(6)]
    ys = [random_vector(sp, rng) for _ in range(6)]
    assert truncated_direct_sum_check(xs, ys)

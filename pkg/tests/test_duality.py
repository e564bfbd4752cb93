import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from cstarmod import algebra as alg
from cstarmod.algebra import AlgebraDescriptor
from cstarmod.duality import (
    DualFunctional,
    bidual_basis,
    dual_basis,
    hat,
    hat_actions_check,
    hat_isometry_check,
    khat_membership,
    omega,
    random_dual,
    reflexivity_check,
    riesz_roundtrip_check,
    riesz_solve,
    self_duality_check,
)
from cstarmod.errors import DomainError
from cstarmod.module import free_module, ideal_module, inner, random_module, random_vector

M2 = AlgebraDescriptor.parse("M2")


def test_dual_dimension_of_m2():
    sp = free_module(M2, 1)
    assert dual_basis(sp).shape[1] == 4
    assert self_duality_check(sp)


def test_riesz_of_identity_functional_is_unit():
    sp = free_module(M2, 1)
    tau = DualFunctional(sp, np.eye(4))
    x = riesz_solve(tau)
    np.testing.assert_allclose(x.coords[0].flat(), M2.unit().flat(), atol=1e-12)


def test_non_linear_functional_rejected():
    sp = free_module(M2, 1)
    with pytest.raises(DomainError):
        DualFunctional(sp, np.diag([1.0, 2.0, 3.0, 4.0]))


def test_hat_evaluates_inner_product(rng):
    sp = free_module("M2+C", 2)
    x, y = random_vector(sp, rng), random_vector(sp, rng)
    np.testing.assert_allclose(hat(x)(y).flat(), inner(x, y).flat(), atol=1e-12)


@settings(max_examples=25, deadline=None)
@given(seed=st.integers(0, 2**32 - 1))
def test_self_duality_on_random_modules(seed):
    rng = np.random.default_rng(seed)
    sp = random_module(rng, max_dim=24)
    assert self_duality_check(sp)
    x = random_vector(sp, rng)
    assert riesz_roundtrip_check(x, random_dual(sp, rng))
    a = alg.random_element(sp.algebra, rng)
    assert hat_actions_check(x, a, complex(rng.standard_normal(), rng.standard_normal()))


def test_dual_actions_are_conjugate(rng):
    sp = free_module(M2, 1)
    x, y = random_vector(sp, rng), random_vector(sp, rng)
    tau = hat(x)
    a = alg.random_element(M2, rng)
    np.testing.assert_allclose(tau.right(a)(y).flat(), (a.star() * tau(y)).flat(), atol=1e-12)
    np.testing.assert_allclose(tau.scale(2j)(y).flat(), (-2j * tau(y).flat()), atol=1e-12)


def test_hat_isometry(rng):
    sp = free_module("M2+M3", 1)
    for _ in range(3):
        assert hat_isometry_check(random_vector(sp, rng), rng)


def test_reflexivity(rng):
    for sp in [free_module(M2, 2), ideal_module("M2+C", "e11@1"), random_module(rng, max_dim=20)]:
        assert bidual_basis(sp).shape[1] == sp.dim
        assert reflexivity_check(sp, rng, pairs=3)


def test_omega_of_hat_is_inner_product(rng):
    sp = free_module("M2+C", 1)
    x, y = random_vector(sp, rng), random_vector(sp, rng)
    np.testing.assert_allclose(omega(x)(hat(y)).flat(), inner(x, y).flat(), atol=1e-12)


def test_hat_lies_in_compact_ideal(rng):
    sp = random_module(rng, max_dim=20)
    assert khat_membership(random_vector(sp, rng))


def test_functional_json_mentions_actions(rng):
    data = hat(random_vector(free_module("C", 1), rng)).to_json()
    assert set(data) == {"space", "matrix", "actions"}

"""The linking algebra as concrete operators on ``F = X (+) A``.

An element ``[[b, x], [y*, a]]`` acts by ``(xi, c) -> (b xi + x c, <y, xi> + a c)``.
In the orthonormal coordinates of ``F`` (module coordinates of ``X`` followed by
flat coordinates of ``A``) the tracial inner product is the standard one, so
the Hilbert-space adjoint of a realized matrix is its conjugate transpose.
"""

from __future__ import annotations

from functools import lru_cache

import numpy as np

from . import algebra as alg
from .algebra import AlgElement
from .errors import ShapeError
from .module import ModuleSpace, ModuleVector, direct_sum, free_module, inner, random_vector, vector_from_json
from .operators import (
    AdjointableOp,
    commutant_basis,
    operator_norm,
    probe_norm,
    random_adjointable,
    theta_matrix,
)
from .reports import CheckReport
from .tolerances import DEFAULT_TOL, Tolerances


def linking_space(space: ModuleSpace) -> ModuleSpace:
    """``F = X (+) A``."""
    return direct_sum([space, free_module(space.algebra, 1)])


def _hat_matrix(y: ModuleVector) -> np.ndarray:
    sp = y.space
    return np.einsum("i,ija->aj", sp.coordinates(y).conj(), sp.gram) if sp.dim else np.zeros((sp.algebra.dim, 0))


class LinkingElement:
    """``[[b, x], [y*, a]]`` with ``b`` in ``L(X)``, ``x, y`` in ``X`` and ``a`` in ``A``."""

    __slots__ = ("space", "b", "x", "y", "a")

    def __init__(self, b: AdjointableOp, x: ModuleVector, y: ModuleVector, a: AlgElement):
        space = x.space
        if b.domain != space or b.codomain != space or y.space != space or a.descriptor != space.algebra:
            raise ShapeError("linking element corners do not share a module")
        self.space, self.b, self.x, self.y, self.a = space, b, x, y, a

    @classmethod
    def zero(cls, space: ModuleSpace) -> "LinkingElement":
        z = AdjointableOp(space, space, np.zeros((space.dim, space.dim)), check=False)
        return cls(z, space.zero(), space.zero(), space.algebra.zero())

    def matrix(self) -> np.ndarray:
        """Realized operator on ``F`` in its orthonormal coordinates."""
        sp = self.space
        n, d = sp.dim, sp.algebra.dim
        out = np.zeros((n + d, n + d), dtype=complex)
        out[:n, :n] = self.b.matrix
        if n:
            out[:n, n:] = np.einsum("ami,i->ma", sp.right_action_basis, sp.coordinates(self.x))
            out[n:, :n] = _hat_matrix(self.y)
        out[n:, n:] = alg.left_mult_matrix(self.a)
        return out

    def operator(self) -> AdjointableOp:
        f = linking_space(self.space)
        return AdjointableOp(f, f, self.matrix(), check=False)

    def __add__(self, other: "LinkingElement") -> "LinkingElement":
        return LinkingElement(self.b + other.b, self.x + other.x, self.y + other.y, self.a + other.a)

    def __sub__(self, other: "LinkingElement") -> "LinkingElement":
        return LinkingElement(self.b - other.b, self.x - other.x, self.y - other.y, self.a - other.a)

    def scale(self, lam: complex) -> "LinkingElement":
        # the lower-left corner is y*, so y scales by conj(lam)
        return LinkingElement(self.b.scale(lam), self.x.scale(lam), self.y.scale(np.conj(lam)), self.a.scale(lam))

    def __mul__(self, other: "LinkingElement") -> "LinkingElement":
        """Corner-wise product of 2x2 arrays."""
        b = self.b @ other.b + AdjointableOp(self.space, self.space, theta_matrix(self.x, other.y), check=False)
        x = self.b(other.x) + self.x.right(other.a)
        # y1* b2 + a1 y2* = (b2* y1 + y2 a1*)*
        y = other.b.adjoint()(self.y) + other.y.right(self.a.star())
        a = inner(self.y, other.x) + self.a * other.a
        return LinkingElement(b, x, y, a)

    def star(self) -> "LinkingElement":
        return LinkingElement(self.b.adjoint(), self.y, self.x, self.a.star())

    def to_json(self) -> dict:
        return {
            "b": self.b.to_json(),
            "x": self.x.to_json(),
            "y": self.y.to_json(),
            "a": alg.element_to_json(self.a),
        }

    @classmethod
    def from_json(cls, data: dict) -> "LinkingElement":
        x = vector_from_json(data["x"])
        y = vector_from_json(data["y"])
        mat = np.array([[complex(re, im) for re, im in row] for row in data["b"]["matrix"]], dtype=complex)
        b = AdjointableOp(x.space, x.space, mat.reshape(x.space.dim, x.space.dim), check=False)
        return cls(b, x, y, alg.element_from_json(x.space.algebra, data["a"]))


def from_matrix(space: ModuleSpace, mat: np.ndarray, tol: Tolerances = DEFAULT_TOL) -> LinkingElement:
    """Read the four corners off a realized matrix (``x = M_01(1)``, ``y`` by a Riesz solve)."""
    from .module import solve_riesz_system

    n, desc = space.dim, space.algebra
    one = desc.unit().flat()
    b = AdjointableOp(space, space, mat[:n, :n], check=False)
    x = space.from_coordinates(mat[:n, n:] @ one)
    y = space.from_coordinates(solve_riesz_system(space, mat[n:, :n].T, tol)) if n else space.zero()
    a = desc.from_flat(mat[n:, n:] @ one)
    return LinkingElement(b, x, y, a)


def embed_module(x: ModuleVector) -> LinkingElement:
    sp = x.space
    z = LinkingElement.zero(sp)
    return LinkingElement(z.b, x, sp.zero(), sp.algebra.zero())


def embed_algebra(space: ModuleSpace, a: AlgElement) -> LinkingElement:
    z = LinkingElement.zero(space)
    return LinkingElement(z.b, space.zero(), space.zero(), a)


def embed_operator(b: AdjointableOp) -> LinkingElement:
    sp = b.domain
    return LinkingElement(b, sp.zero(), sp.zero(), sp.algebra.zero())


def random_linking(space: ModuleSpace, rng: np.random.Generator) -> LinkingElement:
    return LinkingElement(random_adjointable(space, space, rng), random_vector(space, rng),
                          random_vector(space, rng), alg.random_element(space.algebra, rng))


def _rel(diff: np.ndarray, ref: np.ndarray) -> float:
    if diff.size == 0:
        return 0.0
    return float(np.linalg.norm(diff, 2)) / max(1.0, float(np.linalg.norm(ref, 2)))


def corner_residual(space: ModuleSpace, mat: np.ndarray, tol: Tolerances = DEFAULT_TOL) -> float:
    """Distance of ``mat`` from the realization of its own corner data."""
    return _rel(from_matrix(space, mat, tol).matrix() - mat, mat)


def closure_check(samples: list[LinkingElement], tol: Tolerances = DEFAULT_TOL) -> CheckReport:
    """Products and stars stay corner-structured and match the realized operators."""
    rep = CheckReport("linking-closure")
    space = samples[0].space
    f = linking_space(space)
    w_prod = w_corner = w_star = w_adj = w_inv = 0.0
    for s, t in zip(samples, samples[1:] + samples[:1]):
        ms, mt = s.matrix(), t.matrix()
        real = ms @ mt
        w_prod = max(w_prod, _rel((s * t).matrix() - real, real))
        w_corner = max(w_corner, corner_residual(space, real, tol), corner_residual(space, ms.conj().T, tol))
        w_star = max(w_star, _rel(s.star().matrix() - ms.conj().T, ms))
        op = AdjointableOp(f, f, ms, check=False)
        w_adj = max(w_adj, _rel(op.adjoint_matrix - s.star().matrix(), ms))
        w_inv = max(w_inv, _rel(s.star().star().matrix() - ms, ms))
    rep.bound("product-realization", w_prod, tol.op)
    rep.bound("corner-structure", w_corner, tol.op)
    rep.bound("star-realization", w_star, tol.op)
    rep.bound("adjoint-identity", w_adj, tol.op)
    rep.bound("star-involution", w_inv, tol.op)
    return rep


def _spanning_family(space: ModuleSpace) -> list[np.ndarray]:
    z = LinkingElement.zero(space)
    mats = [embed_operator(AdjointableOp(space, space, c, check=False)).matrix() for c in commutant_basis(space)]
    for bv in space.basis_vectors():
        mats.append(embed_module(bv).matrix())
        mats.append(LinkingElement(z.b, space.zero(), bv, space.algebra.zero()).matrix())
    mats.extend(embed_algebra(space, e).matrix() for e in space.algebra.basis())
    return mats


@lru_cache(maxsize=32)
def linking_dimension(space: ModuleSpace) -> int:
    """Complex dimension of the realized algebra, by the rank of a spanning family."""
    from .module import orthonormal_range

    mats = _spanning_family(space)
    return orthonormal_range(np.array([m.reshape(-1) for m in mats]).T).shape[1]


def corner_dimension_sum(space: ModuleSpace) -> int:
    return len(commutant_basis(space)) + 2 * space.dim + space.algebra.dim


def multiplication_table_check(x: ModuleVector, y: ModuleVector, a: AlgElement, b: AdjointableOp,
                               tol: Tolerances = DEFAULT_TOL) -> CheckReport:
    """The corner identifications turn module data into algebra data."""
    rep = CheckReport("linking-table")
    sp = x.space
    ref = embed_algebra(sp, inner(x, y)).matrix()
    rep.bound("inner-product", _rel((embed_module(x).star() * embed_module(y)).matrix() - ref, ref), tol.op)
    real = embed_module(x).star().matrix() @ embed_module(y).matrix()
    rep.bound("inner-product-realized", _rel(real - ref, ref), tol.op)
    ref = embed_module(x.right(a)).matrix()
    real = embed_module(x).matrix() @ embed_algebra(sp, a).matrix()
    rep.bound("right-action", _rel(real - ref, ref), tol.op)
    ref = embed_module(b(x)).matrix()
    real = embed_operator(b).matrix() @ embed_module(x).matrix()
    rep.bound("operator-action", _rel(real - ref, ref), tol.op)
    ref = embed_operator(AdjointableOp(sp, sp, theta_matrix(x, y), check=False)).matrix()
    real = embed_module(x).matrix() @ embed_module(y).star().matrix()
    rep.bound("theta-corner", _rel(real - ref, ref), tol.op)
    return rep


def left_inner_product_check(x: ModuleVector, y: ModuleVector, z: ModuleVector,
                             tol: Tolerances = DEFAULT_TOL) -> CheckReport:
    """``[x, y] z = x <y, z>`` with ``[x, y] = Theta_{x,y}``."""
    rep = CheckReport("left-inner-product")
    lhs = AdjointableOp(y.space, x.space, theta_matrix(x, y), check=False)(z).flat()
    rhs = x.right(inner(y, z)).flat()
    rep.bound("associativity", _rel(lhs - rhs, rhs), tol.op)
    return rep


def representation_check(space: ModuleSpace, rng: np.random.Generator, trials: int = 20,
                         n_probes: int = 500, tol: Tolerances = DEFAULT_TOL) -> CheckReport:
    """``phi(<x,y>) = Phi(x)* Phi(y)``, ``Phi(xa) = Phi(x) phi(a)`` and ``||Phi(x)|| = ||x||``."""
    rep = CheckReport("linking-representation")
    f = linking_space(space)
    w_ip = w_act = w_iso = w_alg = w_op = 0.0
    for _ in range(trials):
        x, y = random_vector(space, rng), random_vector(space, rng)
        a = alg.random_element(space.algebra, rng)
        px, py = embed_module(x).matrix(), embed_module(y).matrix()
        ref = embed_algebra(space, inner(x, y)).matrix()
        w_ip = max(w_ip, _rel(px.conj().T @ py - ref, ref))
        ref = embed_module(x.right(a)).matrix()
        w_act = max(w_act, _rel(px @ embed_algebra(space, a).matrix() - ref, ref))
        nx = alg.norm(inner(x, x)) ** 0.5
        w_iso = max(w_iso, abs(probe_norm(f, f, px, rng, n_probes) - nx) / max(1.0, nx))
        na = alg.norm(a)
        w_alg = max(w_alg, abs(probe_norm(f, f, embed_algebra(space, a).matrix(), rng, n_probes) - na) / max(1.0, na))
        b = random_adjointable(space, space, rng)
        nb = operator_norm(b)
        w_op = max(w_op, abs(probe_norm(f, f, embed_operator(b).matrix(), rng, n_probes) - nb) / max(1.0, nb))
    rep.bound("inner-product", w_ip, tol.op)
    rep.bound("right-action", w_act, tol.op)
    rep.bound("module-isometric", w_iso, tol.probe)
    rep.bound("algebra-isometric", w_alg, tol.probe)
    rep.bound("operator-isometric", w_op, tol.probe)
    return rep


def faithfulness_check(space: ModuleSpace, rng: np.random.Generator, trials: int = 5,
                       tol: Tolerances = DEFAULT_TOL) -> CheckReport:
    """The realization is injective: corners are recovered, and the spanning family is independent."""
    rep = CheckReport("linking-faithful")
    worst = 0.0
    for _ in range(trials):
        e = random_linking(space, rng)
        back = from_matrix(space, e.matrix(), tol)
        worst = max(worst, _rel(back.matrix() - e.matrix(), e.matrix()),
                    float(np.linalg.norm(back.x.flat() - e.x.flat())),
                    float(np.linalg.norm(back.y.flat() - e.y.flat())),
                    alg.norm(back.a - e.a))
    rep.bound("corners-recovered", worst, tol.op)
    dim, expected = linking_dimension(space), corner_dimension_sum(space)
    rep.add("independent-corners", dim == expected, detail={"dim": dim, "corner_sum": expected})
    return rep

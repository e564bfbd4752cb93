"""Adjointable maps, Theta-operators and the compact ideal.

Operators are complex matrices between the orthonormal module bases, so
``matrix[:, j]`` holds the codomain coordinates of ``t(b_j)``. Adjoints are
obtained from the module inner product by Riesz solves, never by conjugate
transposition; the conjugate transpose is only used as an independent
cross-check in the tests.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Sequence

import numpy as np

from . import algebra as alg
from .algebra import AlgebraDescriptor, AlgElement
from .errors import DomainError, ShapeError
from .module import (
    ModuleSpace,
    ModuleVector,
    batch_module_norms,
    free_module,
    inner,
    orthonormal_range,
    null_space,
    pairwise_inner,
    solve_riesz_system,
)
from .reports import CheckReport
from .tolerances import DEFAULT_TOL, Tolerances


def a_linearity_residual(domain: ModuleSpace, codomain: ModuleSpace, matrix: np.ndarray) -> float:
    """``max_e ||T R_X(e) - R_F(e) T||_F / max(1, ||T||_F)`` over matrix units ``e``."""
    if matrix.size == 0:
        return 0.0
    rx, rf = domain.right_action_basis, codomain.right_action_basis
    diff = np.einsum("ij,ajk->aik", matrix, rx) - np.einsum("aij,jk->aik", rf, matrix)
    per = np.sqrt(np.sum(np.abs(diff) ** 2, axis=(1, 2)))
    return float(np.max(per)) / max(1.0, float(np.linalg.norm(matrix)))


class AdjointableOp:
    """A right-A-linear map ``domain -> codomain`` with its adjoint computed on demand."""

    def __init__(self, domain: ModuleSpace, codomain: ModuleSpace, matrix, *, check: bool = True,
                 tol: Tolerances = DEFAULT_TOL):
        if domain.algebra != codomain.algebra:
            raise ShapeError("operator between modules over different algebras")
        matrix = np.array(matrix, dtype=complex).reshape(codomain.dim, domain.dim)
        matrix.flags.writeable = False
        self.domain = domain
        self.codomain = codomain
        self.matrix = matrix
        self.tol = tol
        self._adjoint: np.ndarray | None = None
        if check:
            r = a_linearity_residual(domain, codomain, matrix)
            if r > tol.op:
                raise DomainError(f"map is not A-linear: residual {r:.3e}")

    @classmethod
    def from_function(cls, domain: ModuleSpace, codomain: ModuleSpace,
                      f: Callable[[ModuleVector], ModuleVector], **kw) -> "AdjointableOp":
        cols = [codomain.coordinates(f(b)) for b in domain.basis_vectors()]
        mat = np.array(cols).T if cols else np.zeros((codomain.dim, 0), dtype=complex)
        return cls(domain, codomain, mat, **kw)

    @classmethod
    def identity(cls, space: ModuleSpace) -> "AdjointableOp":
        return cls(space, space, np.eye(space.dim, dtype=complex), check=False)

    @property
    def adjoint_matrix(self) -> np.ndarray:
        if self._adjoint is None:
            self._adjoint = _riesz_adjoint(self)
            self._adjoint.flags.writeable = False
        return self._adjoint

    def adjoint(self) -> "AdjointableOp":
        out = AdjointableOp(self.codomain, self.domain, self.adjoint_matrix, check=False, tol=self.tol)
        out._adjoint = self.matrix
        return out

    @property
    def star(self) -> "AdjointableOp":
        return self.adjoint()

    def __call__(self, x: ModuleVector) -> ModuleVector:
        if x.space != self.domain:
            raise ShapeError("vector is not in the operator's domain")
        return self.codomain.from_coordinates(self.matrix @ self.domain.coordinates(x))

    def __matmul__(self, other: "AdjointableOp") -> "AdjointableOp":
        if other.codomain != self.domain:
            raise ShapeError("composition of incompatible operators")
        return AdjointableOp(other.domain, self.codomain, self.matrix @ other.matrix, check=False, tol=self.tol)

    def __add__(self, other: "AdjointableOp") -> "AdjointableOp":
        self._same(other)
        return AdjointableOp(self.domain, self.codomain, self.matrix + other.matrix, check=False, tol=self.tol)

    def __sub__(self, other: "AdjointableOp") -> "AdjointableOp":
        self._same(other)
        return AdjointableOp(self.domain, self.codomain, self.matrix - other.matrix, check=False, tol=self.tol)

    def scale(self, lam: complex) -> "AdjointableOp":
        return AdjointableOp(self.domain, self.codomain, lam * self.matrix, check=False, tol=self.tol)

    def _same(self, other: "AdjointableOp"):
        if other.domain != self.domain or other.codomain != self.codomain:
            raise ShapeError("operators between different modules")

    def norm(self) -> float:
        return operator_norm(self)

    def to_json(self) -> dict:
        return {
            "domain": self.domain.spec,
            "codomain": self.codomain.spec,
            "matrix": [[[float(z.real), float(z.imag)] for z in row] for row in self.matrix],
        }

    def __repr__(self) -> str:
        return f"AdjointableOp({self.domain.spec} -> {self.codomain.spec})"


def _riesz_adjoint(t: AdjointableOp) -> np.ndarray:
    """For each codomain basis vector ``f_l`` solve ``<z, x> = <f_l, t x>``; then ``t* f_l = z``."""
    x_sp, f_sp = t.domain, t.codomain
    if x_sp.dim == 0 or f_sp.dim == 0:
        return np.zeros((x_sp.dim, f_sp.dim), dtype=complex)
    # <f_l, t b_j> = sum_i T[i, j] <f_l, f_i>
    values = np.einsum("ij,lia->jal", t.matrix, f_sp.gram)
    return solve_riesz_system(x_sp, values, t.tol)


def adjoint(t: AdjointableOp) -> AdjointableOp:
    return t.adjoint()


def random_adjointable(domain: ModuleSpace, codomain: ModuleSpace, rng: np.random.Generator) -> AdjointableOp:
    """``P_F o M o incl_X`` for a random matrix ``M`` over the algebra acting by left multiplication."""
    desc = domain.algebra
    entries = [[alg.random_element(desc, rng) for _ in range(domain.rank)] for _ in range(codomain.rank)]
    return algebra_matrix_op(domain, codomain, entries)


def algebra_matrix_op(domain: ModuleSpace, codomain: ModuleSpace,
                      entries: Sequence[Sequence[AlgElement]]) -> AdjointableOp:
    """The map ``x -> P_F (sum_j m_ij x_j)_i`` for an algebra-valued matrix ``m``."""
    d = domain.algebra.dim
    big = np.zeros((codomain.rank * d, domain.rank * d), dtype=complex)
    for i, row in enumerate(entries):
        for j, a in enumerate(row):
            big[i * d:(i + 1) * d, j * d:(j + 1) * d] = alg.left_mult_matrix(a)
    mat = codomain.basis.conj().T @ big @ domain.basis
    return AdjointableOp(domain, codomain, mat, check=False)


def left_multiplication(space: ModuleSpace, a: AlgElement) -> AdjointableOp:
    """``x -> a x`` slotwise; A-linear because left and right multiplication commute."""
    return algebra_matrix_op(space, space, [[a if i == j else space.algebra.zero()
                                             for j in range(space.rank)] for i in range(space.rank)])


def operator_norm(t: AdjointableOp) -> float:
    """``sqrt(spectral radius of t* t)`` in the tracially orthonormal basis."""
    if t.matrix.size == 0:
        return 0.0
    tt = t.adjoint_matrix @ t.matrix
    w = np.linalg.eigvalsh(0.5 * (tt + tt.conj().T))
    return math.sqrt(max(0.0, float(w[-1])))


def _random_unit_coords(n: int, count: int, rng: np.random.Generator) -> np.ndarray:
    c = rng.standard_normal((count, n)) + 1j * rng.standard_normal((count, n))
    return c / np.linalg.norm(c, axis=1, keepdims=True)


def probe_norm(domain: ModuleSpace, codomain: ModuleSpace, matrix: np.ndarray, rng: np.random.Generator,
               n_probes: int = 2000) -> float:
    """Estimate ``sup ||t x|| / ||x||`` with module norms on both sides.

    Probes are random unit vectors plus, for each block, the top singular
    vector of ``t`` restricted to ``X e_11``; on that subspace the module norm
    is a Hilbert norm, so the seed attains the sup when ``t`` is A-linear.
    """
    if domain.dim == 0 or codomain.dim == 0:
        return 0.0
    probes = [_random_unit_coords(domain.dim, n_probes, rng)] if n_probes else []
    desc = domain.algebra
    for k in range(len(desc.blocks)):
        q = orthonormal_range(domain.right_action_matrix(desc.matrix_unit(k, 0, 0)))
        if q.shape[1] == 0:
            continue
        _, _, vh = np.linalg.svd(matrix @ q)
        probes.append((q @ vh[0].conj())[None, :])
    coords = np.concatenate(probes, axis=0)
    src = batch_module_norms(domain, coords @ domain.basis.T)
    dst = batch_module_norms(codomain, (coords @ matrix.T) @ codomain.basis.T)
    ok = src > 1e-300
    return float(np.max(dst[ok] / src[ok])) if np.any(ok) else 0.0


def op_probe_norm(t: AdjointableOp, rng: np.random.Generator, n_probes: int = 2000) -> float:
    return probe_norm(t.domain, t.codomain, t.matrix, rng, n_probes)


def _rel(diff: np.ndarray, ref: np.ndarray) -> float:
    if diff.size == 0:
        return 0.0
    return float(np.linalg.norm(diff, 2)) / max(1.0, float(np.linalg.norm(ref, 2)))


def adjoint_identity_residual(t: AdjointableOp) -> float:
    """``max |<t b_j, f_l> - <b_j, t* f_l>|`` over basis pairs, relative to ``max(1, ||T||)``."""
    x_sp, f_sp = t.domain, t.codomain
    if t.matrix.size == 0:
        return 0.0
    lhs = np.einsum("ij,ila->jla", t.matrix.conj(), f_sp.gram)
    rhs = np.einsum("kl,jka->jla", t.adjoint_matrix, x_sp.gram)
    return float(np.max(np.abs(lhs - rhs))) / max(1.0, float(np.linalg.norm(t.matrix, 2)))


# Theta operators.

@dataclass(frozen=True)
class ThetaOp:
    x: ModuleVector
    y: ModuleVector
    op: AdjointableOp

    @property
    def matrix(self) -> np.ndarray:
        return self.op.matrix


def theta_matrix(x: ModuleVector, y: ModuleVector) -> np.ndarray:
    """Matrix of ``z -> x <y, z>`` from ``y.space`` to ``x.space``."""
    x_sp, f_sp = x.space, y.space
    if f_sp.dim == 0 or x_sp.dim == 0:
        return np.zeros((x_sp.dim, f_sp.dim), dtype=complex)
    yl = pairwise_inner(f_sp, y.flat()[None, :], f_sp.basis.T)[0]       # (dimF, dimA)
    rxc = np.einsum("ami,i->am", x_sp.right_action_basis, x_sp.coordinates(x))  # (dimA, dimX)
    return (yl @ rxc).T


def theta(x: ModuleVector, y: ModuleVector) -> ThetaOp:
    if x.space.algebra != y.space.algebra:
        raise ShapeError("theta of vectors over different algebras")
    return ThetaOp(x, y, AdjointableOp(y.space, x.space, theta_matrix(x, y), check=False))


def theta_identities_check(x: ModuleVector, y: ModuleVector, u: ModuleVector, v: ModuleVector,
                           t: AdjointableOp, tol: Tolerances = DEFAULT_TOL) -> CheckReport:
    """Adjoint, composition and left-absorption identities of Theta-operators.

    ``Theta_{x,y}* = Theta_{y,x}``, ``Theta_{x,y} Theta_{u,v} = Theta_{x<y,u>, v}``
    and ``t Theta_{x,y} = Theta_{tx, y}``.
    """
    if u.space != y.space or t.domain != x.space:
        raise ShapeError("incompatible spaces for the Theta identities")
    rep = CheckReport("theta-identities")
    txy = theta(x, y).op
    rep.bound("adjoint", _rel(txy.adjoint_matrix - theta_matrix(y, x), txy.matrix), tol.op)
    lhs = txy.matrix @ theta_matrix(u, v)
    rhs = theta_matrix(x.right(inner(y, u)), v)
    rep.bound("composition", _rel(lhs - rhs, rhs), tol.op)
    lhs = t.matrix @ txy.matrix
    rhs = theta_matrix(t(x), y)
    rep.bound("left-absorption", _rel(lhs - rhs, rhs), tol.op)
    # right absorption follows from the adjoint of left absorption: Theta_{x,y} s = Theta_{x, s* y}
    return rep


# The compact ideal.

class OperatorIdealBasis:
    """Orthonormal basis of ``span {Theta_{x,y}}`` inside the matrices ``F -> X``."""

    def __init__(self, domain: ModuleSpace, codomain: ModuleSpace, basis: np.ndarray):
        self.domain = domain
        self.codomain = codomain
        self.basis = basis

    @property
    def dim(self) -> int:
        return self.basis.shape[1]

    def element(self, k: int) -> np.ndarray:
        return self.basis[:, k].reshape(self.codomain.dim, self.domain.dim)

    def elements(self) -> list[np.ndarray]:
        return [self.element(k) for k in range(self.dim)]

    def residual(self, matrix: np.ndarray) -> float:
        v = np.asarray(matrix, dtype=complex).reshape(-1)
        if v.size == 0:
            return 0.0
        proj = self.basis @ (self.basis.conj().T @ v)
        return float(np.linalg.norm(v - proj)) / max(1.0, float(np.linalg.norm(v)))

    def contains(self, op: AdjointableOp, tol: Tolerances = DEFAULT_TOL) -> bool:
        return self.residual(op.matrix) <= tol.op


def compact_ideal(space: ModuleSpace, source: ModuleSpace | None = None) -> OperatorIdealBasis:
    """``K(F, X)`` (``K(X)`` when ``source`` is omitted) as a span of basis Theta-operators."""
    x_sp = space
    f_sp = source if source is not None else space
    if x_sp.dim == 0 or f_sp.dim == 0:
        return OperatorIdealBasis(f_sp, x_sp, np.zeros((x_sp.dim * f_sp.dim, 0), dtype=complex))
    # Theta_{b_i, f_j}[m, l] = sum_a <f_j, f_l>_a R_X[a][m, i]
    thetas = np.einsum("jla,ami->ijml", f_sp.gram, x_sp.right_action_basis)
    mats = thetas.reshape(x_sp.dim * f_sp.dim, x_sp.dim * f_sp.dim).T
    return OperatorIdealBasis(f_sp, x_sp, orthonormal_range(mats))


def ideal_check(ideal: OperatorIdealBasis, samples: Sequence[AdjointableOp],
                rng: np.random.Generator | None = None, products: int | None = None,
                tol: Tolerances = DEFAULT_TOL) -> CheckReport:
    """``t k`` and ``k t`` stay in ``K(X)`` for adjointable ``t`` and ideal elements ``k``."""
    rep = CheckReport("compact-ideal")
    worst = 0.0
    count = 0
    pairs = [(t, k) for t in samples for k in range(ideal.dim)]
    if rng is not None and products is not None and pairs:
        idx = rng.choice(len(pairs), size=min(products, len(pairs)), replace=False)
        pairs = [pairs[i] for i in sorted(idx)]
    for t, k in pairs:
        km = ideal.element(k)
        worst = max(worst, ideal.residual(t.matrix @ km), ideal.residual(km @ t.matrix))
        count += 2
    rep.bound("bi-ideal", worst, tol.op, {"products": count})
    return rep


def adjointable_dimension(space: ModuleSpace) -> int:
    """``dim L(X) = sum_k dim(X e^(k)_11)^2`` (multiplicity of each block's irreducible)."""
    desc = space.algebra
    total = 0
    for k in range(len(desc.blocks)):
        p = space.right_action_matrix(desc.matrix_unit(k, 0, 0))
        mult = orthonormal_range(p).shape[1] if p.size else 0
        total += mult * mult
    return total


def commutant_basis(space: ModuleSpace) -> list[np.ndarray]:
    return list(_commutant_basis(space))


@lru_cache(maxsize=32)
def _commutant_basis(space: ModuleSpace) -> tuple[np.ndarray, ...]:
    """Orthonormal basis of ``{T : T R(e) = R(e) T}``, i.e. of ``L(X)``, by a null-space computation."""
    n = space.dim
    if n == 0:
        return ()
    eye = np.eye(n)
    # row-major vec: vec(T R) = (I kron R^T) vec T ; vec(R T) = (R kron I) vec T
    rows = [np.kron(eye, r.T) - np.kron(r, eye) for r in space.right_action_basis]
    ker = null_space(np.vstack(rows))
    out = tuple(ker[:, k].reshape(n, n).copy() for k in range(ker.shape[1]))
    for m in out:
        m.flags.writeable = False
    return out


def commutant_dimension(space: ModuleSpace) -> int:
    return len(commutant_basis(space))


def k_equals_l_check(space: ModuleSpace, tol: Tolerances = DEFAULT_TOL) -> CheckReport:
    rep = CheckReport("k-equals-l")
    k = compact_ideal(space)
    dim_l = adjointable_dimension(space)
    rep.add("dimension", k.dim == dim_l, detail={"dim_K": k.dim, "dim_L": dim_l})
    return rep


def k_of_a_isomorphism(descriptor: AlgebraDescriptor | str, rng: np.random.Generator, trials: int = 20,
                       tol: Tolerances = DEFAULT_TOL) -> CheckReport:
    """``K(A) -> A``, ``Theta_{a,b} -> a b*`` is a *-isomorphism and ``t = Theta_{t(1), 1}``."""
    if isinstance(descriptor, str):
        descriptor = AlgebraDescriptor.parse(descriptor)
    space = free_module(descriptor, 1)
    one = space.vector([descriptor.unit()], check=False)
    ideal = compact_ideal(space)
    rep = CheckReport("k-of-a-iso")

    def psi(mat: np.ndarray) -> AlgElement:
        return descriptor.from_flat(mat @ space.coordinates(one))

    worst_def = 0.0
    for _ in range(trials):
        a = alg.random_element(descriptor, rng)
        b = alg.random_element(descriptor, rng)
        m = theta_matrix(space.vector([a], False), space.vector([b], False))
        worst_def = max(worst_def, alg.norm(psi(m) - a * b.star()) / max(1.0, alg.norm(a * b.star())))
    rep.bound("theta-maps-to-ab*", worst_def, tol.op)

    worst_wd = 0.0
    for k in ideal.elements():
        worst_wd = max(worst_wd, _rel(k - alg.left_mult_matrix(psi(k)), k))
    rep.bound("well-defined-on-span", worst_wd, tol.op)

    images = np.array([psi(k).flat() for k in ideal.elements()]).T
    rank = orthonormal_range(images).shape[1] if images.size else 0
    rep.add("bijective", ideal.dim == descriptor.dim == rank,
            detail={"dim_K": ideal.dim, "dim_A": descriptor.dim, "rank": rank})

    worst_star = worst_mul = 0.0
    for _ in range(trials):
        c1 = rng.standard_normal(ideal.dim) + 1j * rng.standard_normal(ideal.dim)
        c2 = rng.standard_normal(ideal.dim) + 1j * rng.standard_normal(ideal.dim)
        k1 = (ideal.basis @ c1).reshape(space.dim, space.dim)
        k2 = (ideal.basis @ c2).reshape(space.dim, space.dim)
        op1 = AdjointableOp(space, space, k1, check=False)
        worst_star = max(worst_star, alg.norm(psi(op1.adjoint_matrix) - psi(k1).star())
                         / max(1.0, alg.norm(psi(k1))))
        worst_mul = max(worst_mul, alg.norm(psi(k1 @ k2) - psi(k1) * psi(k2))
                        / max(1.0, alg.norm(psi(k1)) * alg.norm(psi(k2))))
    rep.bound("star-preserving", worst_star, tol.op)
    rep.bound("multiplicative", worst_mul, tol.op)

    worst_t = 0.0
    for _ in range(trials):
        t = random_adjointable(space, space, rng)
        t1 = t(one)
        diff = t - AdjointableOp(space, space, theta_matrix(t1, one), check=False)
        worst_t = max(worst_t, operator_norm(diff) / max(1.0, operator_norm(t)))
    rep.bound("t-equals-theta-t1-1", worst_t, tol.op)
    return rep


def cstar_identity_check(t: AdjointableOp, tol: Tolerances = DEFAULT_TOL) -> CheckReport:
    """``||t||^2 = ||t* t||``."""
    rep = CheckReport("cstar-identity")
    n = operator_norm(t)
    n2 = operator_norm(t.adjoint() @ t)
    rep.bound("cstar", abs(n * n - n2), tol.opnorm * max(1.0, n * n), {"norm_sq": n * n, "norm_tstar_t": n2})
    return rep


def adjoint_properties_check(s: AdjointableOp, t: AdjointableOp, tol: Tolerances = DEFAULT_TOL) -> CheckReport:
    """Involution ``t** = t``, ``(s t)* = t* s*`` and the adjoint identity for ``s t``."""
    rep = CheckReport("adjoint-roundtrip")
    tt = t.adjoint()
    fresh = AdjointableOp(tt.domain, tt.codomain, tt.matrix, check=False)
    rep.bound("involution", _rel(fresh.adjoint_matrix - t.matrix, t.matrix), tol.op)
    st = s @ t
    rep.bound("product", _rel(st.adjoint_matrix - t.adjoint_matrix @ s.adjoint_matrix, st.matrix), tol.op)
    rep.bound("adjoint-identity", adjoint_identity_residual(st), tol.op)
    rep.bound("composition-a-linear", a_linearity_residual(st.domain, st.codomain, st.matrix), tol.op)
    return rep

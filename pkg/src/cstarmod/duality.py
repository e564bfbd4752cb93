"""The dual module, the map x -> x^, self-duality, Riesz and reflexivity.

A functional ``tau: X -> A`` is stored as a ``(dimA, dim X)`` complex matrix
whose column ``j`` is ``flat(tau(b_j))``. Module actions on the dual are
``(alpha . a)(x) = a* alpha(x)`` and ``(lam alpha)(x) = conj(lam) alpha(x)``,
which makes ``x -> x^`` complex-linear and A-linear.
"""

from __future__ import annotations

from functools import lru_cache
from typing import NamedTuple

import numpy as np

from . import algebra as alg
from .algebra import AlgElement
from .errors import DomainError, ShapeError
from .module import (
    ModuleSpace,
    ModuleVector,
    free_module,
    inner,
    null_space,
    orthonormal_range,
    random_vector,
    solve_riesz_system,
)
from .operators import compact_ideal, theta_matrix
from .reports import CheckReport
from .tolerances import DEFAULT_TOL, Tolerances

ACTIONS = {"right": "(alpha.a)(x) = a* alpha(x)", "scalar": "(lam alpha)(x) = conj(lam) alpha(x)"}


def _frozen(a: np.ndarray) -> np.ndarray:
    a.flags.writeable = False
    return a


def _right_mult_stack(desc) -> np.ndarray:
    return np.array([alg.right_mult_matrix(e) for e in desc.basis()])


def linearity_residual(space: ModuleSpace, matrix: np.ndarray) -> float:
    """``max_e ||M R_X(e) - R_A(e) M||_F / max(1, ||M||_F)``."""
    if matrix.size == 0:
        return 0.0
    ra = _right_mult_stack(space.algebra)
    diff = np.einsum("ij,ajk->aik", matrix, space.right_action_basis) - np.einsum("aij,jk->aik", ra, matrix)
    return float(np.max(np.sqrt(np.sum(np.abs(diff) ** 2, axis=(1, 2))))) / max(1.0, float(np.linalg.norm(matrix)))


class DualFunctional:
    """A right-A-linear map ``X -> A``."""

    def __init__(self, space: ModuleSpace, matrix, *, check: bool = True, tol: Tolerances = DEFAULT_TOL):
        space._need_matrix()
        m = np.array(matrix, dtype=complex).reshape(space.algebra.dim, space.dim)
        m.flags.writeable = False
        self.space = space
        self.matrix = m
        if check:
            r = linearity_residual(space, m)
            if r > tol.op:
                raise DomainError(f"functional is not right-A-linear: residual {r:.3e}")

    def __call__(self, x: ModuleVector) -> AlgElement:
        if x.space != self.space:
            raise ShapeError("vector is not in the functional's domain")
        return self.space.algebra.from_flat(self.matrix @ self.space.coordinates(x))

    def __add__(self, other: "DualFunctional") -> "DualFunctional":
        self._same(other)
        return DualFunctional(self.space, self.matrix + other.matrix, check=False)

    def __sub__(self, other: "DualFunctional") -> "DualFunctional":
        self._same(other)
        return DualFunctional(self.space, self.matrix - other.matrix, check=False)

    def _same(self, other):
        if other.space != self.space:
            raise ShapeError("functionals on different modules")

    def scale(self, lam: complex) -> "DualFunctional":
        """Dual scalar action: ``(lam alpha)(x) = conj(lam) alpha(x)``."""
        return DualFunctional(self.space, np.conj(lam) * self.matrix, check=False)

    def right(self, a: AlgElement) -> "DualFunctional":
        """Dual module action: ``(alpha . a)(x) = a* alpha(x)``."""
        return DualFunctional(self.space, alg.left_mult_matrix(a.star()) @ self.matrix, check=False)

    def norm(self, rng: np.random.Generator | None = None, n_probes: int = 2000) -> float:
        """Probe-set operator norm with ``A`` carrying its C*-norm."""
        from .operators import probe_norm

        rng = rng if rng is not None else np.random.default_rng(0)
        return probe_norm(self.space, free_module(self.space.algebra, 1), self.matrix, rng, n_probes)

    def to_json(self) -> dict:
        return {
            "space": self.space.spec,
            "matrix": [[[float(z.real), float(z.imag)] for z in row] for row in self.matrix],
            "actions": ACTIONS,
        }


def hat(x: ModuleVector) -> DualFunctional:
    """``x^ = <x, .>``."""
    space = x.space
    space._need_matrix()
    c = space.coordinates(x)
    m = np.einsum("i,ija->aj", c.conj(), space.gram) if space.dim else np.zeros((space.algebra.dim, 0))
    return DualFunctional(space, m, check=False)


def riesz_solve(tau: DualFunctional, tol: Tolerances = DEFAULT_TOL) -> ModuleVector:
    """The unique ``x`` with ``x^ = tau``; raises ``InvariantError`` if none exists."""
    c = solve_riesz_system(tau.space, tau.matrix.T, tol)
    return tau.space.from_coordinates(c)


@lru_cache(maxsize=32)
def dual_basis(space: ModuleSpace) -> np.ndarray:
    """Orthonormal basis (columns, row-major ``vec`` of the matrices) of the right-A-linear maps ``X -> A``."""
    space._need_matrix()
    d, n = space.algebra.dim, space.dim
    if n == 0:
        return np.zeros((0, 0), dtype=complex)
    ra = _right_mult_stack(space.algebra)
    rx = space.right_action_basis
    # vec(M R) = (I_d kron R^T) vec M ; vec(R_A M) = (R_A kron I_n) vec M
    rows = [np.kron(np.eye(d), r.T) - np.kron(q, np.eye(n)) for r, q in zip(rx, ra)]
    return _frozen(null_space(np.vstack(rows)))


def random_dual(space: ModuleSpace, rng: np.random.Generator) -> DualFunctional:
    """Random element of the dual: a random matrix projected onto the linearity-constraint kernel."""
    d, n = space.algebra.dim, space.dim
    basis = dual_basis(space)
    raw = rng.standard_normal(d * n) + 1j * rng.standard_normal(d * n)
    vec = basis @ (basis.conj().T @ raw) if basis.size else raw
    return DualFunctional(space, vec.reshape(d, n))


def hat_actions_check(x: ModuleVector, a: AlgElement, lam: complex, tol: Tolerances = DEFAULT_TOL) -> CheckReport:
    """``(xa)^ = x^ . a`` and ``(lam x)^ = lam . x^`` under the dual's actions."""
    rep = CheckReport("hat-actions")
    hx = hat(x)
    ref = hat(x.right(a)).matrix
    rep.bound("right-action", _rel(ref - hx.right(a).matrix, ref), tol.op)
    ref = hat(x.scale(lam)).matrix
    rep.bound("scalar-action", _rel(ref - hx.scale(lam).matrix, ref), tol.op)
    return rep


def hat_isometry_check(x: ModuleVector, rng: np.random.Generator, tol: Tolerances = DEFAULT_TOL,
                       n_probes: int = 2000) -> CheckReport:
    rep = CheckReport("hat-isometry")
    nx = alg.norm(inner(x, x)) ** 0.5
    nh = hat(x).norm(rng, n_probes)
    rep.bound("isometry", abs(nh - nx), tol.probe * max(1.0, nx), {"norm_x": nx, "norm_hat": nh})
    return rep


def _rel(diff: np.ndarray, ref: np.ndarray) -> float:
    if diff.size == 0:
        return 0.0
    return float(np.linalg.norm(diff)) / max(1.0, float(np.linalg.norm(ref)))


def riesz_roundtrip_check(x: ModuleVector, tau: DualFunctional | None = None,
                          tol: Tolerances = DEFAULT_TOL) -> CheckReport:
    """``riesz_solve(x^) = x`` and, for a given ``tau``, ``riesz_solve(tau)^ = tau``."""
    rep = CheckReport("riesz-roundtrip")
    back = riesz_solve(hat(x), tol)
    rep.bound("solve-after-hat", _rel(back.flat() - x.flat(), x.flat()), tol.op)
    if tau is not None:
        rep.bound("hat-after-solve", _rel(hat(riesz_solve(tau, tol)).matrix - tau.matrix, tau.matrix), tol.op)
    return rep


def self_duality_check(space: ModuleSpace, tol: Tolerances = DEFAULT_TOL) -> CheckReport:
    """The dual has complex dimension ``dim X`` and every basis functional is some ``x^``."""
    rep = CheckReport("self-duality")
    basis = dual_basis(space)
    dim_dual = basis.shape[1] if basis.size else 0
    rep.add("dual-dimension", dim_dual == space.dim, detail={"dim_dual": dim_dual, "dim_X": space.dim})
    worst = 0.0
    hats = []
    for k in range(dim_dual):
        tau = DualFunctional(space, basis[:, k], check=False)
        x = riesz_solve(tau, tol)
        worst = max(worst, _rel(hat(x).matrix - tau.matrix, tau.matrix))
    for b in space.basis_vectors():
        hats.append(hat(b).matrix.reshape(-1))
    rep.bound("surjective", worst, tol.op)
    rank = orthonormal_range(np.array(hats).T).shape[1] if hats else 0
    rep.add("hat-injective", rank == space.dim, detail={"rank": rank})
    return rep


# Bidual and the reflexivity map.

class BidualFunctional(NamedTuple):
    """Right-A-linear map ``X^# -> A`` given by its values on the orthonormal dual basis.

    With dual coordinates ``lam`` (for the conjugate scalar action) of ``tau``,
    ``Phi(tau) = matrix @ lam``.
    """

    space: ModuleSpace
    matrix: np.ndarray

    def __call__(self, tau: DualFunctional) -> AlgElement:
        lam = dual_coordinates(tau)
        return self.space.algebra.from_flat(self.matrix @ lam)


def dual_coordinates(tau: DualFunctional) -> np.ndarray:
    """Coordinates ``lam`` with ``tau = sum_k lam_k . D_k`` for the dual's scalar action."""
    basis = dual_basis(tau.space)
    return (basis.conj().T @ tau.matrix.reshape(-1)).conj()


def omega(x: ModuleVector) -> BidualFunctional:
    """``Omega(x)(tau) = tau(x)*``."""
    space = x.space
    basis = dual_basis(space)
    c = space.coordinates(x)
    cols = []
    for k in range(basis.shape[1]):
        val = space.algebra.from_flat(basis[:, k].reshape(space.algebra.dim, space.dim) @ c)
        cols.append(val.star().flat())
    m = np.array(cols).T if cols else np.zeros((space.algebra.dim, 0), dtype=complex)
    return BidualFunctional(space, m)


@lru_cache(maxsize=32)
def bidual_action_matrices(space: ModuleSpace) -> np.ndarray:
    """``Q[e]`` with ``lam(tau . e) = Q[e] lam(tau)`` in dual coordinates."""
    basis = dual_basis(space)
    d, n = space.algebra.dim, space.dim
    out = []
    for e in space.algebra.basis():
        left = alg.left_mult_matrix(e.star())
        moved = np.array([(left @ basis[:, k].reshape(d, n)).reshape(-1) for k in range(basis.shape[1])]).T
        coeffs = basis.conj().T @ moved if moved.size else np.zeros((basis.shape[1],) * 2)
        out.append(coeffs.conj())
    return _frozen(np.array(out))


@lru_cache(maxsize=32)
def bidual_basis(space: ModuleSpace) -> np.ndarray:
    """Orthonormal basis of ``X^##`` as row-major ``vec`` of ``(dimA, dim X^#)`` matrices."""
    d = space.algebra.dim
    q = bidual_action_matrices(space)
    m = q.shape[1] if q.ndim == 3 else 0
    if m == 0:
        return np.zeros((0, 0), dtype=complex)
    ra = _right_mult_stack(space.algebra)
    rows = [np.kron(np.eye(d), qe.T) - np.kron(r, np.eye(m)) for qe, r in zip(q, ra)]
    return _frozen(null_space(np.vstack(rows)))


def bidual_linearity_residual(phi: BidualFunctional) -> float:
    q = bidual_action_matrices(phi.space)
    ra = _right_mult_stack(phi.space.algebra)
    if phi.matrix.size == 0:
        return 0.0
    worst = max(float(np.linalg.norm(phi.matrix @ qe - r @ phi.matrix)) for qe, r in zip(q, ra))
    return worst / max(1.0, float(np.linalg.norm(phi.matrix)))


def reflexivity_check(space: ModuleSpace, rng: np.random.Generator | None = None, pairs: int = 5,
                      tol: Tolerances = DEFAULT_TOL) -> CheckReport:
    """``Omega: X -> X^##`` is a well-defined injective module map with matching dimensions."""
    rep = CheckReport("reflexivity")
    dd = bidual_basis(space)
    dim_bidual = dd.shape[1] if dd.size else 0
    rep.add("bidual-dimension", dim_bidual == space.dim, detail={"dim_bidual": dim_bidual, "dim_X": space.dim})
    images = [omega(b) for b in space.basis_vectors()]
    rep.bound("omega-lands-in-bidual", max((bidual_linearity_residual(p) for p in images), default=0.0), tol.op)
    # Omega is conjugate-linear on matrices, so complex independence of the images is injectivity.
    vecs = np.array([p.matrix.reshape(-1) for p in images]).T if images else np.zeros((0, 0))
    rank = orthonormal_range(vecs).shape[1] if vecs.size else 0
    rep.add("omega-injective", rank == space.dim, detail={"rank": rank})
    rep.add("omega-isomorphism", rank == space.dim == dim_bidual)
    if rng is not None and space.dim:
        worst = 0.0
        for _ in range(pairs):
            x, y = random_vector(space, rng), random_vector(space, rng)
            ref = inner(x, y)
            worst = max(worst, alg.norm(omega(x)(hat(y)) - ref) / max(1.0, alg.norm(ref)))
        rep.bound("omega-of-hat", worst, tol.op)
    return rep


def khat_membership(x: ModuleVector, tol: Tolerances = DEFAULT_TOL) -> CheckReport:
    """``x^ = sum_i Theta_{e_ii, x e_ii}`` lies in ``K(X, A)``, using ``x = sum_i (x e_ii) e_ii*``."""
    space = x.space
    desc = space.algebra
    target = free_module(desc, 1)
    rep = CheckReport("khat-membership")
    units = [desc.matrix_unit(k, i, i) for k, n in enumerate(desc.blocks) for i in range(n)]
    recomposed = space.zero()
    for e in units:
        recomposed = recomposed + x.right(e).right(e.star())
    rep.bound("decomposition", _rel(recomposed.flat() - x.flat(), x.flat()), tol.op)
    hx = hat(x).matrix
    total = np.zeros_like(hx)
    for e in units:
        total = total + theta_matrix(target.vector([e], check=False), x.right(e))
    rep.bound("theta-form", _rel(total - hx, hx), tol.op)
    rep.bound("in-span", compact_ideal(target, space).residual(hx), tol.op)
    return rep

"""Closed submodules, orthogonal complements and fullness (matrix backend)."""

from __future__ import annotations

from functools import cached_property
from typing import Sequence

import numpy as np

from . import algebra as alg
from .module import (
    ModuleSpace,
    ModuleVector,
    direct_sum,
    inner,
    null_space,
    orthonormal_range,
    scalar_norm,
)
from .reports import CheckReport
from .tolerances import DEFAULT_TOL, Tolerances


class Submodule:
    """Right-A-invariant subspace of ``space``; ``basis`` is orthonormal in module coordinates."""

    def __init__(self, space: ModuleSpace, basis: np.ndarray):
        space._need_matrix()
        self.space = space
        self.basis = np.asarray(basis, dtype=complex).reshape(space.dim, -1)

    @property
    def dim(self) -> int:
        return self.basis.shape[1]

    @cached_property
    def projector(self) -> np.ndarray:
        return self.basis @ self.basis.conj().T

    def vectors(self) -> list[ModuleVector]:
        return [self.space.from_coordinates(self.basis[:, j]) for j in range(self.dim)]

    def contains(self, x: ModuleVector, tol: Tolerances = DEFAULT_TOL) -> bool:
        c = self.space.coordinates(x)
        return float(np.linalg.norm(c - self.projector @ c)) <= tol.sub * max(1.0, float(np.linalg.norm(c)))

    def invariance_residual(self) -> float:
        """Largest ``||(1 - P) R(e) P||`` over algebra matrix units ``e``."""
        if self.dim == 0:
            return 0.0
        comp = np.eye(self.space.dim) - self.projector
        return max(
            float(np.linalg.norm(comp @ (r @ self.basis), 2)) for r in self.space.right_action_basis
        )

    def __repr__(self) -> str:
        return f"Submodule(dim={self.dim} in {self.space.spec})"


def submodule_generate(space: ModuleSpace, generators: Sequence[ModuleVector]) -> Submodule:
    """Complex span of ``{g . e}`` over generators ``g`` and matrix units ``e``, orthonormalized."""
    if not generators:
        return Submodule(space, np.zeros((space.dim, 0), dtype=complex))
    cols = []
    for g in generators:
        c = space.coordinates(g)
        cols.extend(r @ c for r in space.right_action_basis)
    return Submodule(space, orthonormal_range(np.array(cols).T))


def orthogonal_complement(f: Submodule) -> Submodule:
    """``F^perp`` by solving ``<b, y> = 0`` for every basis vector ``b`` of ``F``."""
    space = f.space
    if f.dim == 0:
        return Submodule(space, np.eye(space.dim, dtype=complex))
    # <b, x_k> = sum_i conj(q_i) G[i, k] for b = sum_i q_i x_i
    m = np.einsum("ib,ika->bak", f.basis.conj(), space.gram).reshape(-1, space.dim)
    return Submodule(space, null_space(m))


def complement_checks(f: Submodule, tol: Tolerances = DEFAULT_TOL) -> CheckReport:
    """``F + F^perp = X``, ``F cap F^perp = 0`` and ``F^perp^perp = F``."""
    space = f.space
    fp = orthogonal_complement(f)
    fpp = orthogonal_complement(fp)
    rep = CheckReport("complement")
    joint = np.hstack([f.basis, fp.basis])
    rank = orthonormal_range(joint).shape[1] if joint.shape[1] else 0
    rep.add("sum-is-whole", rank == space.dim, detail={"rank": rank, "dim": space.dim})
    rep.add("trivial-intersection", rank == f.dim + fp.dim,
            detail={"rank": rank, "dim_F": f.dim, "dim_Fperp": fp.dim})
    cross = np.einsum("ib,ika,kc->bca", f.basis.conj(), space.gram, fp.basis) if f.dim and fp.dim else np.zeros(1)
    rep.bound("orthogonal", float(np.max(np.abs(cross), initial=0.0)), tol.sub)
    rep.add("dimension-count", f.dim + fp.dim == space.dim,
            detail={"dim_F": f.dim, "dim_Fperp": fp.dim, "dim_X": space.dim})
    diff = float(np.linalg.norm(f.projector - fpp.projector, 2)) if space.dim else 0.0
    rep.bound("double-complement", diff, tol.sub)
    rep.bound("complement-invariant", fp.invariance_residual(), tol.sub)
    return rep


def is_full(space: ModuleSpace) -> bool:
    """``span <X, X> = A`` (density is equality in finite dimension)."""
    return inner_span_dim(space) == space.algebra.dim


def inner_span_dim(space: ModuleSpace) -> int:
    if space.dim == 0:
        return 0
    gram = space.gram.reshape(-1, space.algebra.dim)
    return orthonormal_range(gram.T).shape[1]


def xa_span_dim(space: ModuleSpace) -> int:
    """Complex dimension of ``span {b . e}`` over module basis ``b`` and matrix units ``e``."""
    if space.dim == 0:
        return 0
    cols = np.concatenate(list(space.right_action_basis), axis=1)
    return orthonormal_range(cols).shape[1]


def pythagoras_defect(f: ModuleVector, g: ModuleVector) -> dict:
    """Norms entering Pythagoras' equality for a pair with ``<f, g> = 0``."""
    nf, ng, nfg = scalar_norm(f), scalar_norm(g), scalar_norm(f + g)
    return {
        "inner_norm": alg.norm(inner(f, g)),
        "norm_f": nf,
        "norm_g": ng,
        "norm_f_plus_g": nfg,
        "lhs": nfg**2,
        "rhs": nf**2 + ng**2,
    }


def truncated_direct_sum_check(xs: Sequence[ModuleVector], ys: Sequence[ModuleVector],
                               tol: Tolerances = DEFAULT_TOL) -> CheckReport:
    """Finite truncation of a countable direct sum.

    The direct-sum inner product must equal the partial sum of slot inner
    products, partial sums of ``<x_n, x_n>`` must increase, and every block
    ``p..q`` must satisfy the square-root Cauchy bound
    ``||sum <x_n,y_n>|| <= ||sum <x_n,x_n>||^(1/2) ||sum <y_n,y_n>||^(1/2)``.
    """
    rep = CheckReport("truncated-direct-sum")
    space = direct_sum([x.space for x in xs])
    big_x = space.vector([c for x in xs for c in x.coords], check=False)
    big_y = space.vector([c for y in ys for c in y.coords], check=False)
    partial = xs[0].space.algebra.zero()
    for x, y in zip(xs, ys):
        partial = partial + inner(x, y)
    rep.bound("sum-agrees", alg.norm(inner(big_x, big_y) - partial), tol.norm)
    running = xs[0].space.algebra.zero()
    worst_mono = True
    for x in xs:
        step = inner(x, x)
        worst_mono &= bool(alg.is_positive(step, tol))
        running = running + step
    rep.add("partial-sums-increase", worst_mono)
    worst = 0.0
    n = len(xs)
    for p in range(n):
        sxy = xs[0].space.algebra.zero()
        sxx = xs[0].space.algebra.zero()
        syy = xs[0].space.algebra.zero()
        for q in range(p, n):
            sxy = sxy + inner(xs[q], ys[q])
            sxx = sxx + inner(xs[q], xs[q])
            syy = syy + inner(ys[q], ys[q])
            bound = (alg.norm(sxx) * alg.norm(syy)) ** 0.5
            worst = max(worst, alg.norm(sxy) - bound)
    rep.bound("block-cauchy", max(worst, 0.0), tol.norm)
    return rep

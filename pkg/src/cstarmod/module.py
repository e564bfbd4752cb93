"""Hilbert A-modules over either backend.

Over a finite-dimensional algebra every module is realized as a
right-A-invariant complex subspace ``V`` of the ambient free module
``A^m``; ``space.basis`` holds an orthonormal basis of ``V`` for the tracial
inner product ``Tr <x, y>``, which on flat coordinates is the Euclidean one.
Over the piecewise-polynomial backend modules are described intensionally
by vanishing conditions per slot.
"""

from __future__ import annotations

import math
import re
from functools import cached_property
from fractions import Fraction
from typing import NamedTuple, Sequence

import numpy as np

from . import algebra as alg
from .algebra import AlgebraDescriptor, AlgElement
from .errors import DomainError, GrammarError, InvariantError, ShapeError
from .polyfun import IntervalUnion, PiecewisePoly, is_nonnegative, sup_norm
from .reports import CheckReport
from .tolerances import DEFAULT_TOL, Tolerances, scaled

Algebra = AlgebraDescriptor | IntervalUnion


def is_matrix_backend(algebra) -> bool:
    return isinstance(algebra, AlgebraDescriptor)


def orthonormal_range(mat: np.ndarray, rel_tol: float = 1e-10) -> np.ndarray:
    """Orthonormal basis (columns) of the column space, rank-revealing by SVD."""
    if mat.size == 0 or mat.shape[1] == 0:
        return np.zeros((mat.shape[0], 0), dtype=complex)
    u, s, _ = np.linalg.svd(mat, full_matrices=False)
    if s.size == 0 or s[0] == 0:
        return np.zeros((mat.shape[0], 0), dtype=complex)
    r = int(np.sum(s > rel_tol * max(1.0, s[0])))
    return u[:, :r]


def null_space(mat: np.ndarray, rel_tol: float = 1e-10) -> np.ndarray:
    """Orthonormal basis (columns) of the kernel."""
    n = mat.shape[1]
    if mat.shape[0] == 0:
        return np.eye(n, dtype=complex)
    # a tall matrix already yields the full n x n Vh without the m x m U
    _, s, vh = np.linalg.svd(mat, full_matrices=mat.shape[0] < n)
    top = s[0] if s.size else 0.0
    r = int(np.sum(s > rel_tol * max(1.0, top)))
    return vh[r:].conj().T


class ModuleSpace:
    """A Hilbert module: free ``A^m``, an ideal, a finite direct sum, or ``H (x) A``."""

    def __init__(self, algebra: Algebra, kind: str, rank: int, *, parts: Sequence["ModuleSpace"] = (),
                 generator: AlgElement | None = None, gen_text: str | None = None,
                 dim_h: int | None = None, vanish: Sequence[Fraction] = ()):
        if rank < 0:
            raise ShapeError("module rank must be nonnegative")
        self.algebra = algebra
        self.kind = kind
        self.rank = rank
        self.parts = tuple(parts)
        self.generator = generator
        self.gen_text = gen_text
        self.dim_h = dim_h
        self.vanish = tuple(Fraction(p) for p in vanish)

    @cached_property
    def _key(self):
        if self.kind == "dsum":
            return ("dsum", tuple(p._key for p in self.parts))
        if self.kind == "ideal" and self.generator is not None and self.gen_text is None:
            return (self.spec, self.generator.flat().tobytes())
        return (self.spec,)

    def __eq__(self, other) -> bool:
        return self is other or (isinstance(other, ModuleSpace) and self._key == other._key)

    def __hash__(self) -> int:
        return hash(self._key)

    def __repr__(self) -> str:
        return f"ModuleSpace({self.spec!r})"

    @cached_property
    def spec(self) -> str:
        a = str(self.algebra)
        if self.kind == "free":
            return f"free({a}, rank={self.rank})"
        if self.kind == "tensor":
            return f"tensor(dim={self.dim_h}, {a})"
        if self.kind == "ideal":
            if self.vanish:
                pts = ";".join(_fmt_q(p) for p in self.vanish)
                return f"ideal({a}, vanish={pts})"
            return f"ideal({a}, gen={self.gen_text or 'custom'})"
        return "dsum(" + ", ".join(p.spec for p in self.parts) + ")"

    @property
    def is_matrix(self) -> bool:
        return is_matrix_backend(self.algebra)

    def _need_matrix(self):
        if not self.is_matrix:
            raise DomainError("operation requires the finite-dimensional backend")

    @cached_property
    def ambient_dim(self) -> int:
        self._need_matrix()
        return self.rank * self.algebra.dim

    @cached_property
    def basis(self) -> np.ndarray:
        """Orthonormal columns spanning the module inside ``A^rank`` (flat coordinates)."""
        self._need_matrix()
        if self.kind in ("free", "tensor"):
            return np.eye(self.ambient_dim, dtype=complex)
        if self.kind == "ideal":
            return orthonormal_range(alg.left_mult_matrix(self.generator))
        out = np.zeros((self.ambient_dim, sum(p.dim for p in self.parts)), dtype=complex)
        r = c = 0
        for p in self.parts:
            b = p.basis
            out[r:r + b.shape[0], c:c + b.shape[1]] = b
            r += b.shape[0]
            c += b.shape[1]
        return out

    @cached_property
    def dim(self) -> int:
        """Complex dimension."""
        return self.basis.shape[1]

    def zero(self) -> "ModuleVector":
        return ModuleVector(self, [self.algebra.zero()] * self.rank, check=False)

    def vector(self, coords: Sequence, check: bool = True) -> "ModuleVector":
        return ModuleVector(self, coords, check=check)

    def from_flat(self, flat) -> "ModuleVector":
        flat = np.asarray(flat, dtype=complex)
        d = self.algebra.dim
        return ModuleVector(
            self, [self.algebra.from_flat(flat[i * d:(i + 1) * d]) for i in range(self.rank)], check=False
        )

    def from_coordinates(self, c) -> "ModuleVector":
        return self.from_flat(self.basis @ np.asarray(c, dtype=complex))

    def coordinates(self, x: "ModuleVector") -> np.ndarray:
        return self.basis.conj().T @ x.flat()

    def basis_vectors(self) -> list["ModuleVector"]:
        return [self.from_flat(self.basis[:, j]) for j in range(self.dim)]

    def membership_residual(self, flat: np.ndarray) -> float:
        proj = self.basis @ (self.basis.conj().T @ flat)
        return float(np.linalg.norm(flat - proj))

    def contains(self, x: "ModuleVector", tol: Tolerances = DEFAULT_TOL) -> bool:
        if not self.is_matrix:
            return self._poly_contains(x.coords)
        flat = x.flat()
        return self.membership_residual(flat) <= scaled(tol.sub, float(np.linalg.norm(flat)))

    @cached_property
    def slot_vanish(self) -> tuple[tuple[Fraction, ...], ...]:
        """Vanishing conditions per slot (piecewise-polynomial backend)."""
        if self.kind == "dsum":
            return tuple(v for p in self.parts for v in p.slot_vanish)
        if self.kind == "ideal":
            return (self.vanish,)
        return ((),) * self.rank

    def _poly_contains(self, coords) -> bool:
        return all(
            all(c.vanishes_at(p) for p in pts) for c, pts in zip(coords, self.slot_vanish)
        )

    @cached_property
    def right_action_basis(self) -> np.ndarray:
        """Stack ``R[alpha]`` of right-action matrices for the algebra's matrix units, in module coordinates."""
        self._need_matrix()
        b = self.basis
        mats = []
        for e in self.algebra.basis():
            r = np.kron(np.eye(self.rank), alg.right_mult_matrix(e))
            mats.append(b.conj().T @ (r @ b))
        if not mats:
            return np.zeros((0, self.dim, self.dim), dtype=complex)
        return np.array(mats)

    def right_action_matrix(self, a: AlgElement) -> np.ndarray:
        return np.tensordot(a.flat(), self.right_action_basis, axes=(0, 0))

    @cached_property
    def gram(self) -> np.ndarray:
        """``gram[k, j] = flat(<b_k, b_j>)`` over the module basis."""
        return pairwise_inner(self, self.basis.T, self.basis.T)


def _fmt_q(x: Fraction) -> str:
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


class ModuleVector:
    """Immutable module element given by its ambient coordinates (one algebra element per slot)."""

    __slots__ = ("space", "coords", "_flat")

    def __init__(self, space: ModuleSpace, coords: Sequence, check: bool = True):
        coords = tuple(coords)
        if len(coords) != space.rank:
            raise ShapeError(f"{len(coords)} coordinates for a module of rank {space.rank}")
        object.__setattr__(self, "space", space)
        object.__setattr__(self, "coords", coords)
        object.__setattr__(self, "_flat", None)
        if check and not space.contains(self):
            raise DomainError(f"vector does not lie in {space.spec}")

    def __setattr__(self, name, value):
        raise AttributeError("ModuleVector is immutable")

    def _same(self, other: "ModuleVector"):
        if not isinstance(other, ModuleVector) or other.space != self.space:
            raise ShapeError("module vectors from different spaces")

    def flat(self) -> np.ndarray:
        if self._flat is None:
            if self.coords:
                f = np.concatenate([c.flat() for c in self.coords])
            else:
                f = np.zeros(0, dtype=complex)
            f.flags.writeable = False
            object.__setattr__(self, "_flat", f)
        return self._flat

    def __add__(self, other: "ModuleVector") -> "ModuleVector":
        self._same(other)
        return ModuleVector(self.space, [a + b for a, b in zip(self.coords, other.coords)], check=False)

    def __sub__(self, other: "ModuleVector") -> "ModuleVector":
        self._same(other)
        return ModuleVector(self.space, [a - b for a, b in zip(self.coords, other.coords)], check=False)

    def __neg__(self) -> "ModuleVector":
        return ModuleVector(self.space, [-a for a in self.coords], check=False)

    def scale(self, lam) -> "ModuleVector":
        return ModuleVector(self.space, [a.scale(lam) for a in self.coords], check=False)

    def right(self, a) -> "ModuleVector":
        """Right module action ``x . a``."""
        return ModuleVector(self.space, [c * a for c in self.coords], check=False)

    def __mul__(self, other):
        if isinstance(other, (AlgElement, PiecewisePoly)):
            return self.right(other)
        return self.scale(other)

    def __rmul__(self, other):
        return self.scale(other)

    def to_json(self) -> dict:
        return {"space": self.space.spec, "coords": [c.to_json() for c in self.coords]}

    def __repr__(self) -> str:
        return f"ModuleVector({self.space.spec})"


# Constructors.

def free_module(algebra: Algebra | str, rank: int = 1) -> ModuleSpace:
    return ModuleSpace(_algebra(algebra), "free", rank)


def tensor_module(dim_h: int, algebra: Algebra | str) -> ModuleSpace:
    """``H (x)_alg A`` for ``H = C^dim_h``, realized on its standard orthonormal basis."""
    if dim_h < 1:
        raise ShapeError("tensor module needs dim_H >= 1")
    return ModuleSpace(_algebra(algebra), "tensor", dim_h, dim_h=dim_h)


def ideal_module(algebra: Algebra | str, generator=None, *, vanish: Sequence = ()) -> ModuleSpace:
    """Right ideal ``g A`` (matrix backend) or ``{p : p(v) = 0}`` (polynomial backend)."""
    a = _algebra(algebra)
    if is_matrix_backend(a):
        if generator is None:
            raise ShapeError("ideal over a matrix algebra needs a generator")
        if isinstance(generator, str):
            return ModuleSpace(a, "ideal", 1, generator=a.parse_element(generator), gen_text=generator)
        return ModuleSpace(a, "ideal", 1, generator=generator)
    if not vanish:
        raise ShapeError("ideal over a polynomial algebra needs vanishing points")
    return ModuleSpace(a, "ideal", 1, vanish=vanish)


def direct_sum(parts: Sequence[ModuleSpace]) -> ModuleSpace:
    parts = list(parts)
    if not parts:
        raise ShapeError("direct sum of no modules")
    if any(p.algebra != parts[0].algebra for p in parts):
        raise ShapeError("direct sum over different algebras")
    return ModuleSpace(parts[0].algebra, "dsum", sum(p.rank for p in parts), parts=parts)


def _algebra(a) -> Algebra:
    if isinstance(a, str):
        return parse_algebra(a)
    return a


def parse_algebra(text: str) -> Algebra:
    text = text.strip()
    if text.startswith("PP"):
        return IntervalUnion.parse(text)
    return AlgebraDescriptor.parse(text)


def _split_args(body: str) -> list[str]:
    out, depth, cur = [], 0, ""
    for ch in body:
        if ch in "([":
            depth += 1
        elif ch in ")]":
            depth -= 1
        if ch == "," and depth == 0:
            out.append(cur.strip())
            cur = ""
        else:
            cur += ch
    if cur.strip():
        out.append(cur.strip())
    return out


def parse_module(text: str) -> ModuleSpace:
    """Parse ``free(M2+M3, rank=4)``, ``tensor(dim=3, M2)``, ``ideal(M2, gen=e11)``,
    ``ideal(PP[0,1], vanish=0)`` or ``dsum(...)``; a bare algebra means rank one."""
    text = text.strip()
    head, sep, rest = text.partition("(")
    head = head.strip()
    if not sep:
        return free_module(parse_algebra(text), 1)
    if head.startswith("PP") or not rest.endswith(")"):
        if head.startswith("PP"):
            return free_module(parse_algebra(text), 1)
        raise GrammarError(f"unbalanced module spec {text!r}")
    args = _split_args(rest[:-1])
    pos, kw = [], {}
    for a in args:
        m = re.match(r"^(\w+)\s*=(.*)$", a)
        if m:
            kw[m.group(1)] = m.group(2).strip()
        else:
            pos.append(a)
    try:
        if head == "free":
            if not pos:
                raise GrammarError("free() needs an algebra")
            rank = int(kw.get("rank", pos[1] if len(pos) > 1 else 1))
            if rank < 1:
                raise GrammarError("rank must be >= 1")
            return free_module(parse_algebra(pos[0]), rank)
        if head == "tensor":
            dim = int(kw.get("dim", pos[1] if len(pos) > 1 else 0))
            if dim < 1:
                raise GrammarError("tensor dim must be >= 1")
            return tensor_module(dim, parse_algebra(pos[0]))
        if head == "ideal":
            a = parse_algebra(pos[0])
            if "vanish" in kw:
                return ideal_module(a, vanish=[Fraction(v) for v in kw["vanish"].split(";")])
            if "gen" not in kw:
                raise GrammarError("ideal() needs gen= or vanish=")
            return ideal_module(a, kw["gen"])
        if head == "dsum":
            return direct_sum([parse_module(p) for p in pos])
    except (ValueError, IndexError, ZeroDivisionError) as exc:
        if isinstance(exc, GrammarError):
            raise
        raise GrammarError(f"bad module spec {text!r}: {exc}") from exc
    raise GrammarError(f"unknown module constructor {head!r}")


# Inner products and norms.

def inner(x: ModuleVector, y: ModuleVector):
    """``<x, y> = sum_i x_i* y_i``: conjugate-linear in ``x``, A-linear on the right in ``y``."""
    x._same(y)
    if not x.coords:
        return x.space.algebra.zero()
    total = x.coords[0].star() * y.coords[0]
    for a, b in zip(x.coords[1:], y.coords[1:]):
        total = total + a.star() * b
    return total


def _slot_blocks(space: ModuleSpace, flats: np.ndarray) -> list[np.ndarray]:
    desc = space.algebra
    n_vec = flats.shape[0]
    arr = flats.reshape(n_vec, space.rank, desc.dim)
    return [
        arr[:, :, o:o + n * n].reshape(n_vec, space.rank, n, n)
        for o, n in zip(desc.offsets, desc.blocks)
    ]


def pairwise_inner(space: ModuleSpace, xs: np.ndarray, ys: np.ndarray) -> np.ndarray:
    """``out[p, q] = flat(<x_p, y_q>)`` for rows of ambient flat coordinates."""
    xs = np.atleast_2d(np.asarray(xs, dtype=complex))
    ys = np.atleast_2d(np.asarray(ys, dtype=complex))
    parts = []
    for xk, yk in zip(_slot_blocks(space, xs), _slot_blocks(space, ys)):
        g = np.einsum("piay,qiaz->pqyz", xk.conj(), yk)
        parts.append(g.reshape(xs.shape[0], ys.shape[0], -1))
    return np.concatenate(parts, axis=2)


def batch_module_norms(space: ModuleSpace, flats: np.ndarray) -> np.ndarray:
    """Module norms ``||<x,x>||^(1/2)`` of many vectors at once."""
    flats = np.atleast_2d(flats)
    best = np.zeros(flats.shape[0])
    for xk in _slot_blocks(space, flats):
        g = np.einsum("piay,piaz->pyz", xk.conj(), xk)
        w = np.linalg.eigvalsh(0.5 * (g + np.conj(np.swapaxes(g, 1, 2))))
        best = np.maximum(best, w[:, -1])
    return np.sqrt(np.clip(best, 0.0, None))


def scalar_norm(x: ModuleVector):
    """``||x|| = ||<x,x>||^(1/2)``; an exact ``Enclosure`` on the polynomial backend."""
    ip = inner(x, x)
    if isinstance(ip, PiecewisePoly):
        return sup_norm(ip).sqrt()
    return math.sqrt(alg.norm(ip))


def avalued_modulus(x: ModuleVector, tol: Tolerances = DEFAULT_TOL) -> AlgElement:
    """``|x| = <x,x>^(1/2)``."""
    ip = inner(x, x)
    if isinstance(ip, PiecewisePoly):
        raise DomainError("square roots are not available in the polynomial backend")
    return alg.sqrt_positive(ip, tol)


def is_positive_element(a, tol: Tolerances = DEFAULT_TOL) -> bool:
    if isinstance(a, PiecewisePoly):
        return is_nonnegative(a)
    return bool(alg.is_positive(a, tol))


class CauchySchwarz(NamedTuple):
    residual: AlgElement
    verdict: bool
    min_eigenvalue: float
    scale: float


def cauchy_schwarz_residual(x: ModuleVector, y: ModuleVector, tol: Tolerances = DEFAULT_TOL) -> CauchySchwarz:
    """``r = ||<x,x>|| <y,y> - <y,x><x,y>``, which must be positive."""
    xx = inner(x, x)
    yy = inner(y, y)
    xy = inner(x, y)
    nxx = alg.norm(xx)
    r = yy.scale(nxx) - xy.star() * xy
    verdict = alg.is_positive(r, tol)
    scale = max(nxx * alg.norm(yy), alg.norm(xy) ** 2)
    lo = verdict.min_eigenvalue
    if lo is None:
        lo = float("-inf")
    return CauchySchwarz(r, verdict.positive, lo, scale)


def norm_duality_check(x: ModuleVector, rng: np.random.Generator, trials: int = 50,
                       tol: Tolerances = DEFAULT_TOL) -> CheckReport:
    """``||<x,y>|| <= ||x|| ||y||`` on random unit ``y`` and the sup is attained at ``x/||x||``."""
    nx = scalar_norm(x)
    if nx <= tol.zero:
        raise DomainError("norm_duality_check needs a nonzero vector")
    rep = CheckReport("norm-duality")
    worst = -math.inf
    for _ in range(trials):
        y = random_vector(x.space, rng)
        ny = scalar_norm(y)
        if ny <= tol.zero:
            continue
        y = y.scale(1.0 / ny)
        worst = max(worst, alg.norm(inner(x, y)) - nx)
    rep.bound("cauchy-schwarz-scalar", max(worst, 0.0), scaled(tol.norm, nx))
    attained = alg.norm(inner(x, x.scale(1.0 / nx)))
    rep.bound("sup-attained", abs(attained - nx), scaled(tol.norm, nx), {"norm": nx, "attained": attained})
    return rep


def right_action_norm_check(x: ModuleVector, a: AlgElement, tol: Tolerances = DEFAULT_TOL) -> CheckReport:
    """``||x a|| <= ||x|| ||a||``."""
    rep = CheckReport("right-action-norm")
    lhs = scalar_norm(x.right(a))
    rhs = scalar_norm(x) * alg.norm(a)
    rep.bound("xa-bound", max(lhs - rhs, 0.0), scaled(tol.norm, rhs), {"lhs": lhs, "rhs": rhs})
    return rep


# Tensor modules.

def tensor_element(space: ModuleSpace, xis: Sequence, elems: Sequence[AlgElement]) -> ModuleVector:
    """``sum_i xi_i (x) a_i`` with ``xi_i`` given in the orthonormal basis of ``H``."""
    if space.kind != "tensor":
        raise ShapeError("tensor_element needs a tensor module")
    xis = [np.asarray(v, dtype=complex) for v in xis]
    if len(xis) != len(elems) or any(v.shape != (space.dim_h,) for v in xis):
        raise ShapeError("dimension mismatch between H vectors and the tensor module")
    coords = []
    for k in range(space.dim_h):
        acc = space.algebra.zero()
        for v, a in zip(xis, elems):
            acc = acc + a.scale(v[k])
        coords.append(acc)
    return ModuleVector(space, coords, check=False)


class GramPositivity(NamedTuple):
    t: AlgElement
    positive: bool
    formal_residual: float
    zero_forces_zero: bool


def gram_positivity(space: ModuleSpace, xis: Sequence, elems: Sequence[AlgElement],
                    tol: Tolerances = DEFAULT_TOL) -> GramPositivity:
    """``t = <sum xi_i (x) a_i, sum xi_i (x) a_i>`` evaluated two ways.

    The formal double sum ``sum_ij <xi_i, xi_j> a_i* a_j`` is compared with
    the sum of squares ``sum_k (sum_i lambda_ik a_i)* (sum_i lambda_ik a_i)``
    over an orthonormal basis; ``t`` must be positive and vanish only when the
    element itself is zero.
    """
    xis = [np.asarray(v, dtype=complex) for v in xis]
    formal = space.algebra.zero()
    for v, a in zip(xis, elems):
        for w, b in zip(xis, elems):
            formal = formal + (a.star() * b).scale(np.vdot(v, w))
    x = tensor_element(space, xis, elems)
    t = inner(x, x)
    resid = alg.norm(t - formal)
    positive = bool(alg.is_positive(t, tol))
    nt = alg.norm(t)
    if nt <= tol.zero:
        zero_ok = float(np.max(np.abs(x.flat()), initial=0.0)) <= math.sqrt(tol.zero)
    else:
        zero_ok = True
    return GramPositivity(t, positive, resid, zero_ok)


# Random data.

def random_vector(space: ModuleSpace, rng: np.random.Generator) -> ModuleVector:
    if not space.is_matrix:
        from .polyfun import random_piecewise

        coords = []
        for pts in space.slot_vanish:
            p = random_piecewise(space.algebra, rng)
            for v in pts:
                p = p * (space.algebra.t() - space.algebra.constant(v))
            coords.append(p)
        return ModuleVector(space, coords, check=False)
    c = (rng.standard_normal(space.dim) + 1j * rng.standard_normal(space.dim)) / math.sqrt(2.0)
    return space.from_coordinates(c)


# Riesz systems.

def solve_riesz_system(space: ModuleSpace, values: np.ndarray, tol: Tolerances = DEFAULT_TOL) -> np.ndarray:
    """Coordinates ``c`` of the ``z`` with ``<z, b_j> = values[j]`` for every basis vector.

    ``values`` has shape ``(dim, dimA)`` or ``(dim, dimA, n_rhs)``. Since
    ``<z, b_j> = sum_k conj(c_k) <b_k, b_j>``, the system is linear in
    ``conj(c)``; it is overdetermined, so it is solved in the least-squares
    sense and its consistency asserted.
    """
    n = space.dim
    g = space.gram
    dim_a = space.algebra.dim
    values = np.asarray(values, dtype=complex)
    single = values.ndim == 2
    rhs = values.reshape(n * dim_a, -1)
    if n == 0:
        return np.zeros((0,) if single else (0, rhs.shape[1]), dtype=complex)
    m = g.transpose(1, 2, 0).reshape(n * dim_a, n)
    w, *_ = np.linalg.lstsq(m, rhs, rcond=None)
    resid = np.linalg.norm(m @ w - rhs, axis=0)
    scale = np.maximum(1.0, np.linalg.norm(rhs, axis=0))
    if np.any(resid > tol.op * scale):
        raise InvariantError(
            f"Riesz system inconsistent (residual {float(np.max(resid / scale)):.3e}); "
            "the functional is not right-A-linear"
        )
    c = w.conj()
    return c[:, 0] if single else c



def vector_from_json(data: dict) -> ModuleVector:
    """Inverse of ``ModuleVector.to_json`` for the finite-dimensional backend."""
    space = parse_module(data["space"])
    space._need_matrix()
    return ModuleVector(space, [alg.element_from_json(space.algebra, c) for c in data["coords"]], check=False)


def inner_product_axioms_check(x: ModuleVector, y: ModuleVector, z: ModuleVector, a: AlgElement, lam: complex,
                               tol: Tolerances = DEFAULT_TOL) -> CheckReport:
    """Sesquilinearity, ``<x, ya> = <x, y> a``, ``<x, y>* = <y, x>`` and definiteness."""
    rep = CheckReport("inner-product-axioms")
    xy = inner(x, y)
    scale = max(1.0, alg.norm(xy))
    lhs = inner(x, y + z.scale(lam))
    rhs = xy + inner(x, z).scale(lam)
    rep.bound("linear-second", alg.norm(lhs - rhs), tol.op * max(scale, alg.norm(rhs)))
    lhs = inner(x.scale(lam), y)
    rep.bound("conjugate-linear-first", alg.norm(lhs - xy.scale(np.conj(lam))), tol.op * max(scale, alg.norm(lhs)))
    rep.bound("a-linear", alg.norm(inner(x, y.right(a)) - xy * a), tol.op * max(scale, alg.norm(xy * a)))
    rep.bound("hermitian", alg.norm(xy.star() - inner(y, x)), tol.op * scale)
    xx = inner(x, x)
    rep.add("positive", bool(alg.is_positive(xx, tol)))
    nonzero = float(np.linalg.norm(x.flat())) > tol.zero
    rep.add("definite", (alg.norm(xx) > tol.zero) == nonzero)
    return rep


RANDOM_DESCRIPTORS = ("C", "M2", "C+C", "M2+C", "M3", "M2+M3", "C+M2+C")


def random_descriptor(rng: np.random.Generator) -> AlgebraDescriptor:
    return AlgebraDescriptor.parse(RANDOM_DESCRIPTORS[int(rng.integers(len(RANDOM_DESCRIPTORS)))])


def _random_generator_text(desc: AlgebraDescriptor, rng: np.random.Generator) -> str:
    tokens = []
    for k, n in enumerate(desc.blocks):
        for i in range(n):
            for j in range(n):
                if rng.random() < 0.3:
                    tokens.append(f"e{i + 1}{j + 1}@{k + 1}")
    if not tokens:
        k = int(rng.integers(len(desc.blocks)))
        tokens.append(f"block{k + 1}")
    return "+".join(tokens)


def random_module(rng: np.random.Generator, algebra: AlgebraDescriptor | str | None = None,
                  max_dim: int = 40, depth: int = 0) -> ModuleSpace:
    """A random free, ideal, tensor or direct-sum module; every kind has a parseable spec."""
    desc = _algebra(algebra) if algebra is not None else random_descriptor(rng)
    for _ in range(20):
        kind = ("free", "ideal", "tensor", "dsum")[int(rng.integers(4 if depth == 0 else 3))]
        if kind == "free":
            sp = free_module(desc, int(rng.integers(1, 4)))
        elif kind == "ideal":
            sp = ideal_module(desc, _random_generator_text(desc, rng))
        elif kind == "tensor":
            sp = tensor_module(int(rng.integers(1, 4)), desc)
        else:
            sp = direct_sum([random_module(rng, desc, max_dim, depth + 1) for _ in range(2)])
        if 0 < sp.dim <= max_dim:
            return sp
    return free_module(desc, 1)

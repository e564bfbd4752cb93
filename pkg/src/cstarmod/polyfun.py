"""Exact commutative C*-algebra surrogate: piecewise polynomials on a union of intervals.

Elements of ``PP[0,1]u[2,3]`` are one complex-rational polynomial per closed
piece. Addition, multiplication and conjugation are pointwise and exact.
This algebra is a dense unital *-subalgebra of ``C(X)``, not a complete one;
the counterexamples reproduced on it only use algebraic identities and sup
norms of specific elements, which are valid there verbatim.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from fractions import Fraction
from typing import NamedTuple, Sequence

from .errors import DegreeError, DomainError, GrammarError, ShapeError
from .ratpoly import RatPoly, format_fraction, format_poly
from .sturm import isolate_roots

DEGREE_CAP = 64
ROOT_WIDTH = Fraction(1, 10**14)
ENCLOSURE_WIDTH = Fraction(1, 10**12)
_SQRT_DIGITS = 16


@dataclass(frozen=True)
class IntervalUnion:
    pieces: tuple[tuple[Fraction, Fraction], ...]

    def __post_init__(self):
        pieces = tuple((Fraction(l), Fraction(r)) for l, r in self.pieces)
        if not pieces:
            raise ShapeError("empty interval union")
        for l, r in pieces:
            if l > r:
                raise ShapeError(f"interval [{l}, {r}] has l > r")
        for (_, r0), (l1, _) in zip(pieces, pieces[1:]):
            if not r0 < l1:
                raise ShapeError("interval pieces must be sorted and pairwise disjoint")
        object.__setattr__(self, "pieces", pieces)

    @classmethod
    def parse(cls, text: str) -> "IntervalUnion":
        """Parse ``"PP[0,1]u[2,3]"``."""
        text = text.strip()
        if not text.startswith("PP"):
            raise GrammarError(f"domain must start with 'PP': {text!r}")
        body = text[2:]
        pieces = []
        for chunk in body.split("u"):
            m = re.fullmatch(r"\[\s*([-\d/]+)\s*,\s*([-\d/]+)\s*\]", chunk.strip())
            if not m:
                raise GrammarError(f"bad interval {chunk!r} in {text!r}")
            try:
                pieces.append((Fraction(m.group(1)), Fraction(m.group(2))))
            except (ValueError, ZeroDivisionError) as exc:
                raise GrammarError(f"bad endpoint in {chunk!r}") from exc
        return cls(tuple(pieces))

    def __str__(self) -> str:
        return "PP" + "u".join(f"[{_fmt_plain(l)},{_fmt_plain(r)}]" for l, r in self.pieces)

    def piece_of(self, point) -> int:
        point = Fraction(point)
        for k, (l, r) in enumerate(self.pieces):
            if l <= point <= r:
                return k
        raise DomainError(f"point {point} is outside {self}")

    def zero(self) -> "PiecewisePoly":
        return PiecewisePoly(self, [(RatPoly(), RatPoly())] * len(self.pieces))

    def unit(self) -> "PiecewisePoly":
        return self.constant(1)

    def constant(self, c) -> "PiecewisePoly":
        re_, im_ = _split_scalar(c)
        return PiecewisePoly(self, [(RatPoly([re_]), RatPoly([im_]))] * len(self.pieces))

    def t(self) -> "PiecewisePoly":
        return self.from_poly(RatPoly.t())

    def from_poly(self, p: RatPoly, imag: RatPoly | None = None) -> "PiecewisePoly":
        """The same polynomial on every piece."""
        return PiecewisePoly(self, [(p, imag or RatPoly())] * len(self.pieces))

    def indicator(self, k: int) -> "PiecewisePoly":
        return PiecewisePoly(
            self,
            [(RatPoly([1]) if j == k else RatPoly(), RatPoly()) for j in range(len(self.pieces))],
        )


def _fmt_plain(x: Fraction) -> str:
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def _split_scalar(c) -> tuple[Fraction, Fraction]:
    if isinstance(c, QComplex):
        return c.re, c.im
    if isinstance(c, tuple):
        return Fraction(c[0]), Fraction(c[1])
    if isinstance(c, complex):
        raise TypeError("use exact scalars (Fraction or QComplex), not float complex")
    if isinstance(c, float):
        raise TypeError("use exact scalars (Fraction or QComplex), not float")
    return Fraction(c), Fraction(0)


class QComplex(NamedTuple):
    """Exact complex rational ``re + i*im``."""

    re: Fraction
    im: Fraction

    @classmethod
    def of(cls, c) -> "QComplex":
        return cls(*_split_scalar(c))

    def __str__(self) -> str:
        if self.im == 0:
            return format_fraction(self.re)
        return f"{format_fraction(self.re)}+{format_fraction(self.im)}i"

    def is_zero(self) -> bool:
        return self.re == 0 and self.im == 0


class Enclosure(NamedTuple):
    """Certified rational bounds ``lo <= value <= hi``."""

    lo: Fraction
    hi: Fraction

    @property
    def exact(self) -> bool:
        return self.lo == self.hi

    @property
    def width(self) -> Fraction:
        return self.hi - self.lo

    def __float__(self) -> float:
        return float((self.lo + self.hi) / 2)

    def contains(self, x) -> bool:
        return self.lo <= Fraction(x) <= self.hi

    def square(self) -> "Enclosure":
        """Enclosure of the square of a nonnegative value."""
        return Enclosure(self.lo * self.lo, self.hi * self.hi)

    def sqrt(self) -> "Enclosure":
        return Enclosure(_sqrt_floor(self.lo), _sqrt_ceil(self.hi))

    def to_json(self) -> dict:
        return {"lo": format_fraction(self.lo), "hi": format_fraction(self.hi), "exact": self.exact}


def _exact_sqrt(x: Fraction) -> Fraction | None:
    if x < 0:
        return None
    n, d = x.numerator, x.denominator
    rn, rd = math.isqrt(n), math.isqrt(d)
    if rn * rn == n and rd * rd == d:
        return Fraction(rn, rd)
    return None


def _sqrt_floor(x: Fraction) -> Fraction:
    x = max(x, Fraction(0))
    exact = _exact_sqrt(x)
    if exact is not None:
        return exact
    scale = 10**_SQRT_DIGITS
    return Fraction(math.isqrt(math.floor(x * scale * scale)), scale)


def _sqrt_ceil(x: Fraction) -> Fraction:
    x = max(x, Fraction(0))
    exact = _exact_sqrt(x)
    if exact is not None:
        return exact
    scale = 10**_SQRT_DIGITS
    return Fraction(math.isqrt(math.ceil(x * scale * scale)) + 1, scale)


class PointEvaluation(NamedTuple):
    point: Fraction
    value: QComplex


Piece = tuple[RatPoly, RatPoly]


class PiecewisePoly:
    """Immutable element of the piecewise-polynomial algebra over ``domain``.

    Each piece is a pair ``(re, im)`` of rational polynomials.
    """

    __slots__ = ("domain", "pieces")

    def __init__(self, domain: IntervalUnion, pieces: Sequence[Piece]):
        pieces = tuple((re_, im_) for re_, im_ in pieces)
        if len(pieces) != len(domain.pieces):
            raise ShapeError(f"{len(pieces)} polynomials for {len(domain.pieces)} pieces")
        for re_, im_ in pieces:
            if max(re_.degree, im_.degree) > DEGREE_CAP:
                raise DegreeError(f"degree exceeds cap {DEGREE_CAP}")
        object.__setattr__(self, "domain", domain)
        object.__setattr__(self, "pieces", pieces)

    def __setattr__(self, name, value):
        raise AttributeError("PiecewisePoly is immutable")

    def _check(self, other: "PiecewisePoly"):
        if not isinstance(other, PiecewisePoly) or other.domain != self.domain:
            raise ShapeError("piecewise polynomials over different domains")

    def __eq__(self, other) -> bool:
        if isinstance(other, PiecewisePoly):
            return self.domain == other.domain and self.pieces == other.pieces
        return NotImplemented

    def __hash__(self) -> int:
        return hash((self.domain, self.pieces))

    def __add__(self, other: "PiecewisePoly") -> "PiecewisePoly":
        self._check(other)
        return PiecewisePoly(
            self.domain,
            [(a + c, b + d) for (a, b), (c, d) in zip(self.pieces, other.pieces)],
        )

    def __neg__(self) -> "PiecewisePoly":
        return PiecewisePoly(self.domain, [(-a, -b) for a, b in self.pieces])

    def __sub__(self, other: "PiecewisePoly") -> "PiecewisePoly":
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, PiecewisePoly):
            self._check(other)
            return PiecewisePoly(
                self.domain,
                [(a * c - b * d, a * d + b * c) for (a, b), (c, d) in zip(self.pieces, other.pieces)],
            )
        return self.scale(other)

    def __rmul__(self, other):
        return self.scale(other)

    def scale(self, lam) -> "PiecewisePoly":
        x, y = _split_scalar(lam)
        return PiecewisePoly(
            self.domain,
            [(a.scale(x) - b.scale(y), a.scale(y) + b.scale(x)) for a, b in self.pieces],
        )

    def star(self) -> "PiecewisePoly":
        return PiecewisePoly(self.domain, [(a, -b) for a, b in self.pieces])

    def is_real(self) -> bool:
        return all(b.is_zero() for _, b in self.pieces)

    def is_zero(self) -> bool:
        return all(a.is_zero() and b.is_zero() for a, b in self.pieces)

    def degree(self) -> int:
        return max(max(a.degree, b.degree) for a, b in self.pieces)

    def piece_degrees(self) -> tuple[int, ...]:
        return tuple(max(a.degree, b.degree) for a, b in self.pieces)

    def __call__(self, point) -> QComplex:
        k = self.domain.piece_of(point)
        a, b = self.pieces[k]
        return QComplex(a(point), b(point))

    def evaluate(self, point) -> PointEvaluation:
        return PointEvaluation(Fraction(point), self(point))

    def vanishes_at(self, point) -> bool:
        return self(point).is_zero()

    def abs_squared(self) -> "PiecewisePoly":
        return self.star() * self

    def to_json(self) -> dict:
        return {
            "domain": str(self.domain),
            "pieces": [
                {"re": [format_fraction(c) for c in a.coeffs], "im": [format_fraction(c) for c in b.coeffs]}
                for a, b in self.pieces
            ],
        }

    @classmethod
    def from_json(cls, data: dict) -> "PiecewisePoly":
        domain = IntervalUnion.parse(data["domain"])
        return cls(
            domain,
            [(RatPoly(Fraction(c) for c in p["re"]), RatPoly(Fraction(c) for c in p["im"]))
             for p in data["pieces"]],
        )

    def literal(self) -> str:
        return " | ".join(_piece_literal(a, b) for a, b in self.pieces)

    def __repr__(self) -> str:
        return f"PiecewisePoly({self.domain}, {self.literal()!r})"


def _piece_literal(a: RatPoly, b: RatPoly) -> str:
    if b.is_zero():
        return format_poly(a)
    return f"({format_poly(a)}) + i*({format_poly(b)})"


# Pointwise operations as free functions.

def add(p: PiecewisePoly, q: PiecewisePoly) -> PiecewisePoly:
    return p + q


def mul(p: PiecewisePoly, q: PiecewisePoly) -> PiecewisePoly:
    return p * q


def scal(lam, p: PiecewisePoly) -> PiecewisePoly:
    return p.scale(lam)


def star(p: PiecewisePoly) -> PiecewisePoly:
    return p.star()


def is_zero(p: PiecewisePoly) -> bool:
    return p.is_zero()


def vanishes_at(p: PiecewisePoly, point) -> bool:
    return p.vanishes_at(point)


# Sup norm.

def _value_enclosure(p: RatPoly, a: Fraction, b: Fraction) -> tuple[Fraction, Fraction]:
    """Bounds for ``p`` on ``[a, b]`` from the Taylor expansion at ``a``."""
    shifted = p.taylor_shift(a)
    w = b - a
    base = shifted.coeffs[0] if shifted.coeffs else Fraction(0)
    slack = sum((abs(c) * w**k for k, c in enumerate(shifted.coeffs) if k), Fraction(0))
    return base - slack, base + slack


def _abs_enclosure(lo: Fraction, hi: Fraction) -> tuple[Fraction, Fraction]:
    if lo >= 0:
        return lo, hi
    if hi <= 0:
        return -hi, -lo
    return Fraction(0), max(-lo, hi)


def _real_piece_sup(p: RatPoly, l: Fraction, r: Fraction) -> Enclosure:
    best = max(abs(p(l)), abs(p(r)))
    lo_best, hi_best = best, best
    dp = p.derivative()
    for a, b in isolate_roots(dp, l, r, ROOT_WIDTH):
        while True:
            if a == b:
                v = abs(p(a))
                lo, hi = v, v
            else:
                lo, hi = _abs_enclosure(*_value_enclosure(p, a, b))
            if hi - lo <= ENCLOSURE_WIDTH:
                break
            # refine the isolating interval of the critical point
            m = (a + b) / 2
            dm = dp(m)
            if dm == 0:
                a = b = m
            elif (dp(a) < 0) != (dm < 0):
                b = m
            else:
                a = m
        lo_best = max(lo_best, lo)
        hi_best = max(hi_best, hi)
    return Enclosure(lo_best, hi_best)


def sup_norm(p: PiecewisePoly) -> Enclosure:
    """Certified enclosure of ``max |p(t)|`` over the domain.

    Real pieces are maximized over the piece endpoints and the real roots of
    the derivative, isolated by Sturm sequences. Complex pieces go through
    ``|p|^2 = p * star(p)`` and a rational square root of the enclosure.
    """
    lo_best, hi_best = Fraction(0), Fraction(0)
    for (l, r), (a, b) in zip(p.domain.pieces, p.pieces):
        if b.is_zero():
            enc = _real_piece_sup(a, l, r)
        else:
            enc = _real_piece_sup(a * a + b * b, l, r).sqrt()
        lo_best = max(lo_best, enc.lo)
        hi_best = max(hi_best, enc.hi)
    return Enclosure(lo_best, hi_best)


def is_nonnegative(p: PiecewisePoly) -> bool:
    """Exact test that ``p`` is real and ``p(t) >= 0`` on the whole domain."""
    if not p.is_real():
        return False
    for (l, r), (a, _) in zip(p.domain.pieces, p.pieces):
        if a.degree <= 0:
            if a(l) < 0:
                return False
            continue
        samples = {l, r}
        for x, y in isolate_roots(a, l, r, Fraction(1, 2**20)):
            samples.update((x, y))
        ordered = sorted(samples)
        samples.update((u + v) / 2 for u, v in zip(ordered, ordered[1:]))
        if any(a(s) < 0 for s in samples):
            return False
    return True


# Annihilators.

class AnnihilatorResult(NamedTuple):
    trivial: bool
    certificate: dict


def annihilator_is_trivial(generator: PiecewisePoly) -> AnnihilatorResult:
    """Decide whether ``{g : g * generator = 0}`` is ``{0}``.

    On one interval the algebra is an integral domain, so a nonzero
    generator has trivial annihilator: ``deg(g * generator) = deg g +
    deg generator`` for nonzero ``g``. On several pieces each piece is an
    integral domain; the annihilator is trivial iff the generator is nonzero
    on every piece, and otherwise the indicator of a piece where it vanishes
    is a zero-divisor witness.
    """
    degrees = generator.piece_degrees()
    for k, d in enumerate(degrees):
        if d < 0:
            witness = generator.domain.indicator(k)
            product = witness * generator
            return AnnihilatorResult(
                False,
                {
                    "argument": "zero divisor",
                    "witness": witness.to_json(),
                    "witness_literal": witness.literal(),
                    "product_is_zero": product.is_zero(),
                    "witness_is_zero": witness.is_zero(),
                },
            )
    return AnnihilatorResult(
        True,
        {
            "argument": "degree additivity in an integral domain",
            "generator_degrees": list(degrees),
            "pieces": len(degrees),
        },
    )


def degree_additivity_holds(g: PiecewisePoly, generator: PiecewisePoly) -> bool:
    """Check ``deg(g h) = deg g + deg h`` piecewise for nonzero pieces."""
    prod = g * generator
    for dg, dh, dp in zip(g.piece_degrees(), generator.piece_degrees(), prod.piece_degrees()):
        if dg >= 0 and dh >= 0 and dp != dg + dh:
            return False
    return True


# Literals.

_TOKEN = re.compile(r"\s*(?:(\d+(?:/\d+)?)|(t)|(i)|(\*\*|[-+*/^()]))")


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.tokens = []
        pos = 0
        while pos < len(text):
            if text[pos:].strip() == "":
                break
            m = _TOKEN.match(text, pos)
            if not m:
                raise GrammarError(f"unexpected character at {pos} in {text!r}")
            num, var, imag, op = m.groups()
            if num is not None:
                self.tokens.append(("num", Fraction(num)))
            elif var:
                self.tokens.append(("t", None))
            elif imag:
                self.tokens.append(("i", None))
            else:
                self.tokens.append(("op", "^" if op == "**" else op))
            pos = m.end()
        self.i = 0

    def peek(self):
        return self.tokens[self.i] if self.i < len(self.tokens) else (None, None)

    def take(self, kind=None, value=None):
        tok = self.peek()
        if tok[0] is None or (kind and tok[0] != kind) or (value and tok[1] != value):
            raise GrammarError(f"unexpected token {tok!r} in {self.text!r}")
        self.i += 1
        return tok

    def parse(self) -> Piece:
        out = self.expr()
        if self.i != len(self.tokens):
            raise GrammarError(f"trailing input in {self.text!r}")
        return out

    def expr(self) -> Piece:
        sign = 1
        if self.peek() == ("op", "-"):
            self.take()
            sign = -1
        elif self.peek() == ("op", "+"):
            self.take()
        acc = self.term()
        if sign < 0:
            acc = (-acc[0], -acc[1])
        while self.peek() in (("op", "+"), ("op", "-")):
            op = self.take()[1]
            rhs = self.term()
            acc = (acc[0] + rhs[0], acc[1] + rhs[1]) if op == "+" else (acc[0] - rhs[0], acc[1] - rhs[1])
        return acc

    def term(self) -> Piece:
        acc = self.power()
        while True:
            tok = self.peek()
            if tok == ("op", "/"):
                self.take()
                num, den_im = self.power()
                if num.degree > 0 or not den_im.is_zero() or num.is_zero():
                    raise GrammarError(f"division only by nonzero rational constants in {self.text!r}")
                c = 1 / num.coeffs[0]
                acc = (acc[0].scale(c), acc[1].scale(c))
                continue
            if tok == ("op", "*"):
                self.take()
            elif tok[0] in ("num", "t", "i") or tok == ("op", "("):
                pass  # implicit multiplication
            else:
                return acc
            rhs = self.power()
            acc = _cmul(acc, rhs)

    def power(self) -> Piece:
        base = self.atom()
        if self.peek() == ("op", "^"):
            self.take()
            kind, k = self.take("num")
            if k.denominator != 1 or k < 0:
                raise GrammarError("exponents must be nonnegative integers")
            out: Piece = (RatPoly([1]), RatPoly())
            for _ in range(int(k)):
                out = _cmul(out, base)
            return out
        return base

    def atom(self) -> Piece:
        kind, value = self.peek()
        if kind == "num":
            self.take()
            return RatPoly([value]), RatPoly()
        if kind == "t":
            self.take()
            return RatPoly.t(), RatPoly()
        if kind == "i":
            self.take()
            return RatPoly(), RatPoly([1])
        if (kind, value) == ("op", "("):
            self.take()
            inner = self.expr()
            self.take("op", ")")
            return inner
        if (kind, value) == ("op", "-"):
            self.take()
            a, b = self.atom()
            return -a, -b
        raise GrammarError(f"unexpected token {(kind, value)!r} in {self.text!r}")


def _cmul(x: Piece, y: Piece) -> Piece:
    return x[0] * y[0] - x[1] * y[1], x[0] * y[1] + x[1] * y[0]


def parse_poly(text: str) -> Piece:
    """Parse a literal such as ``"(t - 1/2)^2"`` into ``(re, im)`` polynomials."""
    return _Parser(text).parse()


def parse_piecewise(domain: IntervalUnion | str, text: str) -> PiecewisePoly:
    """Parse ``"p"`` (same on every piece) or ``"p0 | p1 | ..."`` (one per piece)."""
    if isinstance(domain, str):
        domain = IntervalUnion.parse(domain)
    parts = [s for s in text.split("|")]
    if len(parts) == 1:
        parts = parts * len(domain.pieces)
    if len(parts) != len(domain.pieces):
        raise GrammarError(f"{len(parts)} literals for {len(domain.pieces)} pieces")
    return PiecewisePoly(domain, [parse_poly(s) for s in parts])


def coefficient_lists(p: PiecewisePoly) -> list[dict]:
    return p.to_json()["pieces"]


def random_piecewise(
    domain: IntervalUnion, rng, max_degree: int = 3, complex_coeffs: bool = True
) -> PiecewisePoly:
    """Small random rational coefficients, suitable for exact property tests."""

    def coeffs(deg: int) -> list[Fraction]:
        return [Fraction(int(rng.integers(-5, 6)), int(rng.integers(1, 5))) for _ in range(deg + 1)]

    pieces = []
    for _ in domain.pieces:
        deg = int(rng.integers(0, max_degree + 1))
        re_ = RatPoly(coeffs(deg))
        im_ = RatPoly(coeffs(deg)) if complex_coeffs and rng.random() < 0.5 else RatPoly()
        pieces.append((re_, im_))
    return PiecewisePoly(domain, pieces)


def random_rational_points(domain: IntervalUnion, rng, count: int) -> list[Fraction]:
    points = []
    for _ in range(count):
        l, r = domain.pieces[int(rng.integers(0, len(domain.pieces)))]
        u = Fraction(int(rng.integers(0, 1001)), 1000)
        points.append(l + (r - l) * u)
    return points


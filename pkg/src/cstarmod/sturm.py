"""Certified real root isolation over the rationals with Sturm sequences."""

from __future__ import annotations

from fractions import Fraction

from .ratpoly import RatPoly, gcd


def squarefree_part(p: RatPoly) -> RatPoly:
    if p.degree <= 0:
        return p
    g = gcd(p, p.derivative())
    return p.divmod(g)[0].monic()


def sturm_chain(p: RatPoly) -> list[RatPoly]:
    """Sturm sequence of the square-free part of ``p``."""
    f = squarefree_part(p)
    chain = [f, f.derivative()]
    while not chain[-1].is_zero():
        chain.append(-(chain[-2] % chain[-1]))
    return chain[:-1]


def sign_changes(chain: list[RatPoly], x: Fraction) -> int:
    signs = [v for v in (q(x) for q in chain) if v != 0]
    return sum(1 for u, w in zip(signs, signs[1:]) if (u < 0) != (w < 0))


def count_roots(chain: list[RatPoly], a: Fraction, b: Fraction) -> int:
    """Number of distinct roots in the half-open interval ``(a, b]``."""
    return sign_changes(chain, a) - sign_changes(chain, b)


def isolate_roots(p: RatPoly, lo, hi, width) -> list[tuple[Fraction, Fraction]]:
    """Isolating intervals for the distinct real roots of ``p`` in ``(lo, hi)``.

    Each returned ``(a, b)`` contains exactly one root and has ``b - a <= width``;
    ``a == b`` means the root is the rational ``a`` itself. Roots at ``lo`` or
    ``hi`` are excluded.
    """
    lo, hi, width = Fraction(lo), Fraction(hi), Fraction(width)
    if p.degree <= 0 or lo >= hi:
        return []
    chain = sturm_chain(p)
    f = chain[0]
    # roots in the open interval (lo, hi)
    n_total = count_roots(chain, lo, hi) - (1 if f(hi) == 0 else 0)
    out: list[tuple[Fraction, Fraction]] = []
    stack = [(lo, hi, n_total)]
    while stack:
        a, b, n = stack.pop()
        if n == 0:
            continue
        if n == 1 and b - a <= width:
            out.append((a, b))
            continue
        m = (a + b) / 2
        if f(m) == 0:
            out.append((m, m))
            left = count_roots(chain, a, m) - 1
            right = n - left - 1
        else:
            left = count_roots(chain, a, m)
            right = n - left
        stack.append((m, b, right))
        stack.append((a, m, left))
    out.sort()
    return out

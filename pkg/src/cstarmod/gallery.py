"""Self-verifying counterexamples with machine-checked certificates.

Each demo builds its claims from explicit finite generator families; the
universal step is carried by point evaluation (a homomorphism) or by degree
additivity in the integral domain of polynomials on an interval.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Callable

from . import algebra as alg
from .algebra import AlgebraDescriptor
from .module import direct_sum, free_module, ideal_module, inner, scalar_norm
from .operators import AdjointableOp, adjoint_identity_residual
from .polyfun import (
    IntervalUnion,
    PiecewisePoly,
    annihilator_is_trivial,
    degree_additivity_holds,
    format_fraction,
    parse_piecewise,
)
from .reports import CheckReport
from .tolerances import DEFAULT_TOL

HALF = Fraction(1, 2)

CERTIFICATE_SCHEMA = {
    "type": "object",
    "required": ["demo_id", "backend", "claims", "exact"],
    "additionalProperties": False,
    "properties": {
        "demo_id": {"type": "string"},
        "backend": {"type": "string"},
        "exact": {"type": "boolean"},
        "claims": {
            "type": "array",
            "minItems": 1,
            "items": {
                "type": "object",
                "required": ["statement", "verdict", "evidence"],
                "additionalProperties": False,
                "properties": {
                    "statement": {"type": "string"},
                    "verdict": {"type": "boolean"},
                    "evidence": {"type": "object"},
                },
            },
        },
    },
}


@dataclass
class Claim:
    statement: str
    verdict: bool
    evidence: dict

    def to_json(self) -> dict:
        return {"statement": self.statement, "verdict": bool(self.verdict), "evidence": self.evidence}


@dataclass
class DemoCertificate:
    demo_id: str
    backend: str
    claims: list[Claim] = field(default_factory=list)
    exact: bool = True

    def claim(self, statement: str, verdict: bool, **evidence: Any) -> bool:
        self.claims.append(Claim(statement, bool(verdict), evidence))
        return bool(verdict)

    @property
    def passed(self) -> bool:
        return all(c.verdict for c in self.claims)

    def to_json(self) -> dict:
        return {
            "demo_id": self.demo_id,
            "backend": self.backend,
            "claims": [c.to_json() for c in self.claims],
            "exact": self.exact,
        }

    def dumps(self) -> str:
        return json.dumps(self.to_json(), sort_keys=True, indent=2)

    @classmethod
    def from_json(cls, data: dict) -> "DemoCertificate":
        claims = [Claim(c["statement"], bool(c["verdict"]), c["evidence"]) for c in data["claims"]]
        return cls(data["demo_id"], data["backend"], claims, bool(data["exact"]))


def _q(x: Fraction) -> str:
    return format_fraction(Fraction(x))


def _value(p: PiecewisePoly, point: Fraction) -> str:
    return str(p(point))


def _pp(domain: IntervalUnion, text: str) -> PiecewisePoly:
    return parse_piecewise(domain, text)


# Orthogonal complement of the maximal ideal at 1/2.

def demo_orthocomplement_trivial() -> DemoCertificate:
    cert = DemoCertificate("orthocomplement-trivial", "polyfun")
    dom = IntervalUnion.parse("PP[0,1]")
    f_space = ideal_module(dom, vanish=[HALF])
    gens = [_pp(dom, s) for s in ("t - 1/2", "(t - 1/2)*t", "(t - 1/2)*t^2")]
    cert.claim(
        "the generators (t-1/2), (t-1/2)t, (t-1/2)t^2 of F vanish at 1/2",
        all(g.vanishes_at(HALF) for g in gens) and all(f_space.contains(f_space.vector([g], False)) for g in gens),
        generators=[g.literal() for g in gens],
        values_at_half=[_value(g, HALF) for g in gens],
    )
    # y in F^perp forces <t - 1/2, y> = (t - 1/2) y = 0
    ann = annihilator_is_trivial(gens[0])
    samples = [_pp(dom, s) for s in ("1", "t", "t^2 + i", "3*t^3 - t/2")]
    additivity = [degree_additivity_holds(y, gens[0]) for y in samples]
    products_nonzero = [not (gens[0].star() * y).is_zero() for y in samples]
    cert.claim(
        "F^perp = {0}: the annihilator of t-1/2 is trivial, so <t-1/2, y> = 0 forces y = 0",
        ann.trivial and all(additivity) and all(products_nonzero),
        annihilator=ann.certificate,
        degree_additivity_samples=[y.literal() for y in samples],
        degree_additivity=additivity,
        pairing_nonzero=products_nonzero,
    )
    zero = dom.zero()
    cert.claim(
        "0 lies in F^perp",
        all((g.star() * zero).is_zero() for g in gens),
        pairings=[(g.star() * zero).literal() for g in gens],
    )
    one = dom.unit()
    cert.claim(
        "1 does not lie in F",
        not one.vanishes_at(HALF) and not f_space.contains(f_space.vector([one], False)),
        value_at_half=_value(one, HALF),
    )
    cert.claim(
        "F^perp^perp = A differs from F, witnessed by 1",
        ann.trivial and (zero.star() * one).is_zero() and not one.vanishes_at(HALF),
        reason="F^perp = {0} and <0, 1> = 0, so 1 lies in F^perp^perp but not in F",
        pairing_zero_one=(zero.star() * one).literal(),
    )
    return cert


# Pythagoras' equality fails.

def demo_pythagoras_failure() -> DemoCertificate:
    cert = DemoCertificate("pythagoras-failure", "polyfun+matrix")
    dom = IntervalUnion.parse("PP[0,1]u[2,3]")
    x_sp = free_module(dom, 1)
    f = x_sp.vector([dom.indicator(0)])
    g = x_sp.vector([dom.indicator(1)])
    fg = inner(f, g)
    cert.claim("<f, g> = fg = 0 exactly", fg.is_zero() and (f.coords[0] * g.coords[0]).is_zero(),
               f=f.coords[0].literal(), g=g.coords[0].literal(), inner=fg.literal())
    nf, ng, nfg = scalar_norm(f), scalar_norm(g), scalar_norm(f + g)
    cert.claim("||f + g|| = 1 exactly", nfg.exact and nfg.lo == 1, norm=nfg.to_json())
    cert.claim("||f|| = ||g|| = 1 exactly", nf.exact and ng.exact and nf.lo == 1 and ng.lo == 1,
               norm_f=nf.to_json(), norm_g=ng.to_json())
    lhs = nfg.square()
    rhs_lo, rhs_hi = nf.square().lo + ng.square().lo, nf.square().hi + ng.square().hi
    cert.claim("||f + g||^2 = 1 differs from ||f||^2 + ||g||^2 = 2",
               lhs.exact and rhs_lo == rhs_hi and lhs.lo == 1 and rhs_lo == 2 and lhs.lo != rhs_lo,
               lhs=_q(lhs.lo), rhs=_q(rhs_lo))
    # replica with A = C + C, f = (1, 0), g = (0, 1)
    desc = AlgebraDescriptor.parse("C+C")
    m_sp = free_module(desc, 1)
    mf = m_sp.vector([desc.block_unit(0)])
    mg = m_sp.vector([desc.block_unit(1)])
    tol = DEFAULT_TOL.norm
    vals = {
        "inner": alg.norm(inner(mf, mg)),
        "norm_f_plus_g": scalar_norm(mf + mg),
        "norm_f": scalar_norm(mf),
        "norm_g": scalar_norm(mg),
    }
    ok = (vals["inner"] <= tol and abs(vals["norm_f_plus_g"] - 1) <= tol
          and abs(vals["norm_f"] - 1) <= tol and abs(vals["norm_g"] - 1) <= tol
          and abs(vals["norm_f_plus_g"] ** 2 - (vals["norm_f"] ** 2 + vals["norm_g"] ** 2)) > 0.5)
    cert.claim("the matrix replica over C+C agrees within tolerance", ok,
               backend="matrix", algebra="C+C", tolerance=tol, values=vals)
    return cert


# A topological complement that is not orthogonal.

def _rank_q(rows: list[list[Fraction]]) -> int:
    """Rank over the rationals by fraction-exact Gaussian elimination."""
    m = [list(r) for r in rows]
    rank, cols = 0, len(m[0]) if m else 0
    for c in range(cols):
        piv = next((r for r in range(rank, len(m)) if m[r][c] != 0), None)
        if piv is None:
            continue
        m[rank], m[piv] = m[piv], m[rank]
        for r in range(len(m)):
            if r != rank and m[r][c] != 0:
                k = m[r][c] / m[rank][c]
                m[r] = [a - k * b for a, b in zip(m[r], m[rank])]
        rank += 1
    return rank


def demo_topological_not_orthogonal(max_degree: int = 4) -> DemoCertificate:
    cert = DemoCertificate("topological-not-orthogonal", "polyfun")
    dom = IntervalUnion.parse("PP[0,1]")
    zero_pt = Fraction(0)
    j_sp = ideal_module(dom, vanish=[zero_pt])
    x_sp = direct_sum([free_module(dom, 1), j_sp])
    f_family = [_pp(dom, s) for s in ("t", "t^2", "i*t", "t^3 - t/2")]
    g_family = [_pp(dom, s) for s in ("t", "t^2 + 2*t", "i*t^3")]
    in_j = all(p.vanishes_at(zero_pt) for p in f_family + g_family)
    pairings = []
    for f in f_family:
        for g in g_family:
            u, v = x_sp.vector([f, f]), x_sp.vector([g, -g])
            pairings.append(inner(u, v).is_zero())
    cert.claim(
        "(g, -g) is orthogonal to F = {(f, f) : f in J} for every pair of the generator families",
        in_j and all(pairings),
        f_family=[p.literal() for p in f_family],
        g_family=[p.literal() for p in g_family],
        pairings_zero=pairings,
        identity="<(f,f),(g,-g)> = f*g - f*g",
    )
    sums = [(f + g)(zero_pt) for f in f_family for g in g_family]
    one = dom.unit()
    witness = x_sp.vector([one, dom.zero()])
    cert.claim(
        "(1, 0) lies in X but not in F + F^perp = J + J, so F + F^perp differs from X",
        all(s.is_zero() for s in sums) and x_sp.contains(witness) and not one.vanishes_at(zero_pt),
        reason="first components f + g of F + F^perp vanish at 0 since evaluation is linear; 1(0) = 1",
        first_components_at_0=sorted({str(s) for s in sums}),
        witness_first_at_0=_value(one, zero_pt),
    )
    pairs = [("t", "t^2"), ("1 + i*t", "t - t^3"), ("2", "t/3")]
    decomp = []
    for a_txt, j_txt in pairs:
        a, j = _pp(dom, a_txt), _pp(dom, j_txt)
        x = x_sp.vector([a, j])
        in_f = x_sp.vector([j, j])
        in_g = x_sp.vector([a - j, dom.zero()])
        same = all(p == q for p, q in zip((in_f + in_g).coords, x.coords))
        decomp.append(same and j.vanishes_at(zero_pt))
    cert.claim(
        "G = {(f, 0) : f in A} complements F: (a, j) = (j, j) + (a - j, 0)",
        all(decomp),
        pairs=[list(p) for p in pairs],
        exact_decompositions=decomp,
    )
    # (f, f) = (g, 0) with f in J, g in A of degree <= D: unknowns f_1..f_D, g_0..g_D
    d = max_degree
    rows = []
    for k in range(d + 1):  # first component: f_k - g_k = 0
        row = [Fraction(0)] * (2 * d + 1)
        if k >= 1:
            row[k - 1] = Fraction(1)
        row[d + k] = Fraction(-1)
        rows.append(row)
    for k in range(1, d + 1):  # second component: f_k = 0
        row = [Fraction(0)] * (2 * d + 1)
        row[k - 1] = Fraction(1)
        rows.append(row)
    rank = _rank_q(rows)
    cert.claim(
        "F and G intersect trivially: (f, f) = (g, 0) forces f = g = 0",
        rank == 2 * d + 1,
        degree_bound=d,
        unknowns=2 * d + 1,
        rational_rank=rank,
        reason="second component gives f = 0, then the first gives g = 0; the rank is exact over Q",
    )
    return cert


# A bounded A-linear map without adjoint.

def demo_nonadjointable_inclusion() -> DemoCertificate:
    cert = DemoCertificate("nonadjointable-inclusion", "polyfun+matrix")
    dom = IntervalUnion.parse("PP[0,1]")
    x_sp = ideal_module(dom, vanish=[HALF])
    family = [_pp(dom, s) for s in ("t - 1/2", "(t - 1/2)*t", "(t - 1/2)*(1 + i*t)")]
    cert.claim(
        "the family (t-1/2), (t-1/2)t, (t-1/2)(1+it) lies in X = {p : p(1/2) = 0}",
        all(x_sp.contains(x_sp.vector([p], False)) for p in family),
        family=[p.literal() for p in family],
    )
    # <x, c> = <x, 1> for all x in X means x*(c - 1) = 0; x = t - 1/2 is self-adjoint
    ann = annihilator_is_trivial(family[0].star())
    one = dom.unit()
    consistent = all((p.star() * one - p.star() * one).is_zero() for p in family)
    cert.claim(
        "any candidate c = i*(1) satisfies (t-1/2)(c-1) = 0, hence c = 1",
        ann.trivial and consistent,
        annihilator=ann.certificate,
        forced_value=one.literal(),
    )
    cert.claim("1 does not lie in X", not one.vanishes_at(HALF), value_at_half=_value(one, HALF))
    cert.claim(
        "the inclusion of X into A is not adjointable",
        ann.trivial and not one.vanishes_at(HALF),
        reason="i*(1) would have to be 1, which is not in X",
    )
    # contrast: the inclusion of the ideal e11 M2 into M2 has an adjoint
    desc = AlgebraDescriptor.parse("M2")
    src = ideal_module(desc, "e11")
    dst = free_module(desc, 1)
    incl = AdjointableOp.from_function(src, dst, lambda v: dst.vector(v.coords, check=False))
    adj = incl.adjoint()
    image = adj(dst.vector([desc.unit()], check=False))
    resid = adjoint_identity_residual(incl)
    cert.claim(
        "finite-dimensional contrast: the inclusion of e11 M2 into M2 has an adjoint",
        resid <= DEFAULT_TOL.op,
        backend="matrix",
        algebra="M2",
        adjoint_identity_residual=resid,
        tolerance=DEFAULT_TOL.op,
        adjoint_of_unit=alg.element_to_json(image.coords[0]),
    )
    return cert


DEMOS: dict[str, Callable[[], DemoCertificate]] = {
    "orthocomplement-trivial": demo_orthocomplement_trivial,
    "pythagoras-failure": demo_pythagoras_failure,
    "topological-not-orthogonal": demo_topological_not_orthogonal,
    "nonadjointable-inclusion": demo_nonadjointable_inclusion,
}


def run_demo(demo_id: str) -> DemoCertificate:
    try:
        return DEMOS[demo_id]()
    except KeyError:
        raise KeyError(f"unknown demo {demo_id!r}; choose from {sorted(DEMOS)}") from None


def replay(data: dict | str) -> CheckReport:
    """Recompute the demo named in a serialized certificate and compare byte for byte."""
    if isinstance(data, str):
        data = json.loads(data)
    fresh = run_demo(data["demo_id"])
    rep = CheckReport(f"replay:{data['demo_id']}")
    stored = json.dumps(data, sort_keys=True, indent=2)
    rep.add("bit-identical", stored == fresh.dumps())
    rep.add("all-claims-true", fresh.passed and all(c["verdict"] for c in data["claims"]))
    return rep

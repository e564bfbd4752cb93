"""Property suites: a registry of randomized checks and a deterministic runner."""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Any, Callable, Iterable

import numpy as np

from . import algebra as alg
from .algebra import AlgebraDescriptor
from .duality import (
    hat_actions_check,
    hat_isometry_check,
    khat_membership,
    random_dual,
    reflexivity_check,
    riesz_roundtrip_check,
    self_duality_check,
)
from .errors import DomainError
from .linking import (
    closure_check,
    faithfulness_check,
    left_inner_product_check,
    multiplication_table_check,
    random_linking,
    representation_check,
)
from .module import (
    ModuleSpace,
    cauchy_schwarz_residual,
    free_module,
    gram_positivity,
    inner_product_axioms_check,
    norm_duality_check,
    parse_algebra,
    parse_module,
    random_descriptor,
    random_module,
    random_vector,
    right_action_norm_check,
    tensor_module,
)
from .operators import (
    adjoint_properties_check,
    adjointable_dimension,
    compact_ideal,
    cstar_identity_check,
    ideal_check,
    k_of_a_isomorphism,
    random_adjointable,
    theta_identities_check,
)
from .reports import CheckReport
from .submodule import complement_checks, inner_span_dim, is_full, submodule_generate
from .tolerances import DEFAULT_TOL, Tolerances

DEFAULT_TRIALS = 500
DEFAULT_SEED = 42
DEFAULT_ALGEBRA = "M2+C"
MAX_EXEMPLARS = 5


@dataclass(frozen=True)
class SuiteConfig:
    suite: str
    algebra: str | None = None
    module: str | None = None
    trials: int = DEFAULT_TRIALS
    seed: int = DEFAULT_SEED
    tol: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.suite not in SUITES:
            raise KeyError(f"unknown suite {self.suite!r}")
        if not isinstance(self.trials, int) or self.trials < 1:
            raise ValueError("trials must be a positive integer")
        if not 0 <= int(self.seed) < 2**64:
            raise ValueError("seed must be a 64-bit unsigned integer")

    @property
    def tolerances(self) -> Tolerances:
        return DEFAULT_TOL.with_overrides(self.tol)

    def to_json(self) -> dict:
        return {
            "suite": self.suite,
            "algebra": self.algebra if self.algebra is not None else DEFAULT_ALGEBRA,
            "module": self.module if self.module is not None else "free(A, rank=2)",
            "trials": self.trials,
            "seed": int(self.seed),
            "tolerances": self.tolerances.as_dict(),
        }


@dataclass
class TrialContext:
    index: int
    rng: np.random.Generator
    algebra: AlgebraDescriptor
    module: ModuleSpace
    tol: Tolerances


@dataclass(frozen=True)
class Suite:
    name: str
    citation: str
    run: Callable[[TrialContext], tuple[CheckReport, Callable[[], dict]]]


@dataclass
class VerificationReport:
    """Aggregate over a contiguous range of trials; ``merge`` joins disjoint ranges."""

    suite: str
    config: dict
    ranges: tuple
    passed: int = 0
    failed: int = 0
    worst: dict = field(default_factory=dict)
    exemplars: list = field(default_factory=list)
    wall_time: float | None = None

    @property
    def trials(self) -> int:
        return sum(b - a for a, b in self.ranges)

    def record(self, index: int, rep: CheckReport, inputs: Callable[[], dict]):
        for c in rep.checks:
            if c.residual is None:
                continue
            cur = self.worst.get(c.name)
            if cur is None or c.residual > cur["residual"]:
                self.worst[c.name] = {"residual": c.residual, "tolerance": c.tolerance}
        if rep.passed:
            self.passed += 1
            return
        self.failed += 1
        if len(self.exemplars) < MAX_EXEMPLARS:
            self.exemplars.append({"trial": index, "failures": [c.to_json() for c in rep.failures()],
                                   "inputs": inputs()})

    def merge(self, other: "VerificationReport") -> "VerificationReport":
        if self.suite != other.suite:
            raise ValueError("cannot merge reports of different suites")
        spans = sorted(self.ranges + other.ranges)
        merged: list[tuple[int, int]] = []
        for a, b in spans:
            if merged and a < merged[-1][1]:
                raise ValueError("trial ranges overlap")
            if merged and a == merged[-1][1]:
                merged[-1] = (merged[-1][0], b)
            else:
                merged.append((a, b))
        worst = dict(self.worst)
        for k, v in other.worst.items():
            if k not in worst or v["residual"] > worst[k]["residual"]:
                worst[k] = v
        exemplars = sorted(self.exemplars + other.exemplars, key=lambda e: e["trial"])[:MAX_EXEMPLARS]
        wall = None if self.wall_time is None or other.wall_time is None else self.wall_time + other.wall_time
        return VerificationReport(self.suite, self.config, tuple(merged), self.passed + other.passed,
                                  self.failed + other.failed, worst, exemplars, wall)

    @property
    def ok(self) -> bool:
        return self.failed == 0

    def to_json(self) -> dict:
        out: dict[str, Any] = {
            "event": "summary",
            "suite": self.suite,
            "config": self.config,
            "trials": self.trials,
            "passed": self.passed,
            "failed": self.failed,
            "worst_residuals": {k: self.worst[k] for k in sorted(self.worst)},
            "exemplars": self.exemplars,
            "verdict": "pass" if self.ok else "fail",
        }
        if self.wall_time is not None:
            out["wall_time_s"] = self.wall_time
        return out


# Context resolution.

def _resolve(config: SuiteConfig, rng: np.random.Generator) -> tuple[AlgebraDescriptor, ModuleSpace]:
    if config.algebra == "random":
        desc = random_descriptor(rng)
    elif config.algebra is not None:
        desc = parse_algebra(config.algebra)
    else:
        desc = None
    if config.module == "random":
        desc = desc if desc is not None else parse_algebra(DEFAULT_ALGEBRA)
        return desc, random_module(rng, desc)
    if config.module is not None:
        space = _parse_module_cached(config.module)
        if desc is not None and space.algebra != desc:
            raise DomainError(f"module {space.spec} is not over {desc}")
        return space.algebra, space
    desc = desc if desc is not None else parse_algebra(DEFAULT_ALGEBRA)
    return desc, free_module(desc, 2)


@lru_cache(maxsize=64)
def _parse_module_cached(text: str) -> ModuleSpace:
    return parse_module(text)


@lru_cache(maxsize=64)
def _compact_ideal(space: ModuleSpace):
    return compact_ideal(space)


def _vecs(ctx: TrialContext, n: int, space: ModuleSpace | None = None):
    sp = space if space is not None else ctx.module
    return [random_vector(sp, ctx.rng) for _ in range(n)]


def _complex(rng: np.random.Generator) -> complex:
    return complex(rng.standard_normal(), rng.standard_normal())


def _inputs(**items) -> Callable[[], dict]:
    def build() -> dict:
        out = {}
        for k, v in items.items():
            out[k] = v.to_json() if hasattr(v, "to_json") else v
        return out

    return build


# Suites.

def _suite_axioms(ctx):
    x, y, z = _vecs(ctx, 3)
    a, lam = alg.random_element(ctx.algebra, ctx.rng), _complex(ctx.rng)
    return inner_product_axioms_check(x, y, z, a, lam, ctx.tol), _inputs(x=x, y=y, z=z, a=alg.element_to_json(a))


def _suite_cauchy_schwarz(ctx):
    x, y = _vecs(ctx, 2)
    cs = cauchy_schwarz_residual(x, y, ctx.tol)
    rep = CheckReport("cauchy-schwarz")
    rep.add("positive-residual", cs.verdict, detail={"min_eigenvalue": cs.min_eigenvalue})
    rep.bound("min-eigenvalue", -cs.min_eigenvalue, ctx.tol.sub * max(1.0, cs.scale))
    return rep, _inputs(x=x, y=y)


def _suite_norm_duality(ctx):
    (x,) = _vecs(ctx, 1)
    return norm_duality_check(x, ctx.rng, trials=5, tol=ctx.tol), _inputs(x=x)


def _suite_right_action_norm(ctx):
    (x,) = _vecs(ctx, 1)
    a = alg.random_element(ctx.algebra, ctx.rng)
    return right_action_norm_check(x, a, ctx.tol), _inputs(x=x, a=alg.element_to_json(a))


def _suite_tensor_positivity(ctx):
    space = ctx.module if ctx.module.kind == "tensor" else tensor_module(3, ctx.algebra)
    k = int(ctx.rng.integers(1, 4))
    xis = [ctx.rng.standard_normal(space.dim_h) + 1j * ctx.rng.standard_normal(space.dim_h) for _ in range(k)]
    elems = [alg.random_element(ctx.algebra, ctx.rng) for _ in range(k)]
    g = gram_positivity(space, xis, elems, ctx.tol)
    rep = CheckReport("tensor-positivity")
    rep.add("positive", g.positive)
    rep.bound("formal-sum", g.formal_residual, ctx.tol.op * max(1.0, alg.norm(g.t)))
    rep.add("zero-forces-zero", g.zero_forces_zero)
    return rep, _inputs(space=space.spec, xis=[[[float(z.real), float(z.imag)] for z in v] for v in xis],
                        elems=[alg.element_to_json(e) for e in elems])


def _random_generators(ctx, space):
    gens = []
    for _ in range(int(ctx.rng.integers(1, 3))):
        k = int(ctx.rng.integers(len(ctx.algebra.blocks)))
        e = ctx.algebra.matrix_unit(k, 0, 0)
        gens.append(random_vector(space, ctx.rng).right(alg.random_element(ctx.algebra, ctx.rng) * e))
    return gens


def _suite_complement(ctx):
    gens = _random_generators(ctx, ctx.module)
    f = submodule_generate(ctx.module, gens)
    return complement_checks(f, ctx.tol), _inputs(module=ctx.module.spec, generators=[g.to_json() for g in gens])


def _suite_fullness(ctx):
    space = ctx.module
    rep = CheckReport("fullness")
    # oracle: full iff every block occurs, i.e. X e11^(k) is nonzero for each k
    occurs = all(
        np.linalg.norm(space.right_action_matrix(ctx.algebra.matrix_unit(k, 0, 0))) > ctx.tol.sub
        for k in range(len(ctx.algebra.blocks))
    )
    rep.add("verdict-matches-oracle", is_full(space) == occurs, detail={"full": occurs, "span": inner_span_dim(space)})
    return rep, _inputs(module=space.spec)


def _suite_adjoint(ctx):
    other = free_module(ctx.algebra, 1)
    t = random_adjointable(ctx.module, other, ctx.rng)
    s = random_adjointable(other, ctx.module, ctx.rng)
    return adjoint_properties_check(s, t, ctx.tol), _inputs(s=s, t=t)


def _suite_theta(ctx):
    other = free_module(ctx.algebra, 1)
    x = random_vector(ctx.module, ctx.rng)
    y, u = _vecs(ctx, 2, other)
    v = random_vector(ctx.module, ctx.rng)
    t = random_adjointable(ctx.module, ctx.module, ctx.rng)
    return theta_identities_check(x, y, u, v, t, ctx.tol), _inputs(x=x, y=y, u=u, v=v, t=t)


def _suite_compact_ideal(ctx):
    k = _compact_ideal(ctx.module)
    t = random_adjointable(ctx.module, ctx.module, ctx.rng)
    rep = ideal_check(k, [t], ctx.rng, products=4, tol=ctx.tol)
    dim_l = adjointable_dimension(ctx.module)
    rep.add("k-equals-l", k.dim == dim_l, detail={"dim_K": k.dim, "dim_L": dim_l})
    return rep, _inputs(module=ctx.module.spec, t=t)


def _suite_k_of_a(ctx):
    return k_of_a_isomorphism(ctx.algebra, ctx.rng, trials=2, tol=ctx.tol), _inputs(algebra=str(ctx.algebra))


def _suite_cstar(ctx):
    t = random_adjointable(ctx.module, ctx.module, ctx.rng)
    return cstar_identity_check(t, ctx.tol), _inputs(t=t)


def _suite_hat_isometry(ctx):
    (x,) = _vecs(ctx, 1)
    rep = hat_isometry_check(x, ctx.rng, ctx.tol)
    rep.extend(hat_actions_check(x, alg.random_element(ctx.algebra, ctx.rng), _complex(ctx.rng), ctx.tol))
    return rep, _inputs(x=x)


def _suite_riesz(ctx):
    (x,) = _vecs(ctx, 1)
    tau = random_dual(ctx.module, ctx.rng)
    return riesz_roundtrip_check(x, tau, ctx.tol), _inputs(x=x, tau=tau)


def _suite_self_duality(ctx):
    return self_duality_check(ctx.module, ctx.tol), _inputs(module=ctx.module.spec)


def _suite_reflexivity(ctx):
    return reflexivity_check(ctx.module, ctx.rng, pairs=2, tol=ctx.tol), _inputs(module=ctx.module.spec)


def _suite_khat(ctx):
    (x,) = _vecs(ctx, 1)
    return khat_membership(x, ctx.tol), _inputs(x=x)


def _suite_linking_closure(ctx):
    samples = [random_linking(ctx.module, ctx.rng) for _ in range(3)]
    rep = closure_check(samples, ctx.tol)
    x, y, z = _vecs(ctx, 3)
    a = alg.random_element(ctx.algebra, ctx.rng)
    rep.extend(multiplication_table_check(x, y, a, samples[0].b, ctx.tol), "table:")
    rep.extend(left_inner_product_check(x, y, z, ctx.tol), "left:")
    return rep, _inputs(samples=[s.to_json() for s in samples])


def _suite_linking_representation(ctx):
    rep = representation_check(ctx.module, ctx.rng, trials=1, n_probes=200, tol=ctx.tol)
    rep.extend(faithfulness_check(ctx.module, ctx.rng, trials=1, tol=ctx.tol), "faithful:")
    return rep, _inputs(module=ctx.module.spec)


_REGISTRY = [
    ("inner-product-axioms", "A-valued inner product axioms: sesquilinear, A-linear, hermitian, definite", _suite_axioms),
    ("cauchy-schwarz", "Cauchy-Schwarz: <x,y>*<x,y> <= ||<x,x>|| <y,y>", _suite_cauchy_schwarz),
    ("norm-duality", "||x|| = sup{||<x,y>|| : ||y|| <= 1}, attained at x/||x||", _suite_norm_duality),
    ("right-action-norm", "||xa|| <= ||x|| ||a||", _suite_right_action_norm),
    ("tensor-positivity", "inner product on H (x) A is positive and definite", _suite_tensor_positivity),
    ("complement", "finite-dimensional submodules: F + F^perp = X, F^perp^perp = F", _suite_complement),
    ("fullness", "a module is full iff its inner products span A", _suite_fullness),
    ("adjoint-roundtrip", "adjointable maps: t** = t, (st)* = t*s*, <tx,y> = <x,t*y>", _suite_adjoint),
    ("theta-identities", "Theta*_{x,y} = Theta_{y,x}, products and left absorption", _suite_theta),
    ("compact-ideal", "K(X) is a two-sided ideal in L(X), equal to L(X) here", _suite_compact_ideal),
    ("k-of-a-iso", "K(A) is isomorphic to A via Theta_{a,b} -> ab*", _suite_k_of_a),
    ("cstar-identity", "C*-identity ||t*t|| = ||t||^2 in L(X)", _suite_cstar),
    ("hat-isometry", "x -> <x,.> is an isometric A-linear map into the dual", _suite_hat_isometry),
    ("riesz-roundtrip", "every right-A-linear functional is <x,.> for a unique x", _suite_riesz),
    ("self-duality", "the dual of X has dimension dim X and equals the image of x -> <x,.>", _suite_self_duality),
    ("reflexivity", "Omega(x)(tau) = tau(x)* is an isomorphism onto the bidual", _suite_reflexivity),
    ("khat-membership", "<x,.> lies in K(X,A) as a sum of Theta-operators", _suite_khat),
    ("linking-closure", "the linking algebra is a *-subalgebra of L(X + A)", _suite_linking_closure),
    ("linking-representation", "phi(<x,y>) = Phi(x)*Phi(y), Phi(xa) = Phi(x)phi(a), Phi isometric",
     _suite_linking_representation),
]

SUITES: dict[str, Suite] = {name: Suite(name, cite, fn) for name, cite, fn in _REGISTRY}


def list_suites() -> str:
    width = max(len(n) for n in SUITES)
    return "\n".join(f"{s.name.ljust(width)}  {s.citation}" for s in SUITES.values())


def trial_rng(seed: int, index: int) -> np.random.Generator:
    return np.random.default_rng([int(seed), int(index)])


def run_range(config: SuiteConfig, start: int, stop: int,
              emit: Callable[[dict], None] | None = None, timing: bool = False) -> VerificationReport:
    """Run trials ``start..stop-1``; each trial's generator depends only on ``(seed, index)``."""
    suite = SUITES[config.suite]
    tol = config.tolerances
    report = VerificationReport(config.suite, config.to_json(), ((start, stop),))
    every = max(1, (stop - start) // 10)
    t0 = time.perf_counter()
    for i in range(start, stop):
        rng = trial_rng(config.seed, i)
        desc, space = _resolve(config, rng)
        rep, inputs = suite.run(TrialContext(i, rng, desc, space, tol))
        before = report.failed
        report.record(i, rep, inputs)
        if emit is not None:
            if report.failed > before:
                emit({"event": "failure", "suite": config.suite, "trial": i,
                      "failures": [c.name for c in rep.failures()]})
            done = i - start + 1
            if done % every == 0 and i + 1 < stop:
                emit({"event": "progress", "suite": config.suite, "completed": done, "failed": report.failed})
    if timing:
        report.wall_time = time.perf_counter() - t0
    return report


def run_suite(config: SuiteConfig, emit: Callable[[dict], None] | None = None,
              timing: bool = False) -> VerificationReport:
    return run_range(config, 0, config.trials, emit, timing)


def merge_all(reports: Iterable[VerificationReport]) -> VerificationReport:
    reports = list(reports)
    out = reports[0]
    for r in reports[1:]:
        out = out.merge(r)
    return out

"""Acceptance suite: one test per criterion, each printing a single PASS/FAIL line.

Run with ``pytest tests/test_acceptance.py -v``; the lines are printed even
without ``-s``.
"""

import time

import numpy as np
import pytest

from cstarmod import algebra as alg
from cstarmod.cli import main
from cstarmod.duality import hat, random_dual, reflexivity_check, riesz_solve, self_duality_check
from cstarmod.gallery import DEMOS, replay, run_demo
from cstarmod.linking import (
    corner_dimension_sum,
    embed_algebra,
    embed_module,
    linking_dimension,
    representation_check,
)
from cstarmod.module import (
    RANDOM_DESCRIPTORS,
    cauchy_schwarz_residual,
    free_module,
    inner,
    random_module,
    random_vector,
    scalar_norm,
)
from cstarmod.operators import (
    compact_ideal,
    k_of_a_isomorphism,
    operator_norm,
    random_adjointable,
    theta_identities_check,
)
from cstarmod.submodule import complement_checks, orthogonal_complement, submodule_generate
from cstarmod.suites import SUITES

CS_TOL = 1e-8
CS_SECONDS = 30.0
NORM_TOL = 1e-8
CSTAR_TOL = 1e-6
THETA_TOL = 1e-8
KA_TOL = 1e-8
RIESZ_TOL = 1e-8
LINK_TOL = 1e-8
ISO_TOL = 1e-3


@pytest.fixture
def report(capsys):
    def emit(number: int, title: str, ok: bool, detail: str):
        with capsys.disabled():
            print(f"\ncriterion {number} {title}: {'PASS' if ok else 'FAIL'} ({detail})")
        assert ok, detail

    return emit


def _rel(diff, ref) -> float:
    return float(np.linalg.norm(diff, 2)) / max(1.0, float(np.linalg.norm(ref, 2)))


def test_criterion_01_cauchy_schwarz(report):
    rng = np.random.default_rng(101)
    t0 = time.perf_counter()
    worst, bad = 0.0, 0
    for spec in ("C", "M2", "M2+C", "M2+M3"):
        for rank in (1, 3):
            space = free_module(spec, rank)
            for _ in range(1000):
                x, y = random_vector(space, rng), random_vector(space, rng)
                cs = cauchy_schwarz_residual(x, y)
                ratio = -cs.min_eigenvalue / max(cs.scale, np.finfo(float).tiny)
                worst = max(worst, ratio)
                bad += cs.min_eigenvalue < -CS_TOL * cs.scale
    elapsed = time.perf_counter() - t0
    ok = bad == 0 and elapsed < CS_SECONDS
    report(1, "cauchy-schwarz", ok,
           f"8000 pairs, {bad} violations, worst -min_eig/scale {worst:.2e}, {elapsed:.1f} s")


def test_criterion_02_norm_corollaries(report):
    rng = np.random.default_rng(102)
    w_ip = w_act = w_sup = -np.inf
    for _ in range(1000):
        space = random_module(rng)
        x, y = random_vector(space, rng), random_vector(space, rng)
        a = alg.random_element(space.algebra, rng)
        nx = scalar_norm(x)
        w_ip = max(w_ip, alg.norm(inner(x, y)) - nx * scalar_norm(y))
        w_act = max(w_act, scalar_norm(x.right(a)) - nx * alg.norm(a))
        w_sup = max(w_sup, abs(alg.norm(inner(x, x.scale(1.0 / nx))) - nx))
    ok = w_ip <= NORM_TOL and w_act <= NORM_TOL and w_sup <= NORM_TOL
    report(2, "norm-corollaries", ok,
           f"1000 trials each; worst excess <x,y> {w_ip:.2e}, xa {w_act:.2e}; sup gap {w_sup:.2e}")


def test_criterion_03_cstar_identity(report):
    rng = np.random.default_rng(103)
    worst, max_dim = 0.0, 0
    for _ in range(500):
        spec = RANDOM_DESCRIPTORS[int(rng.integers(len(RANDOM_DESCRIPTORS)))]
        d = alg.AlgebraDescriptor.parse(spec).dim
        space = free_module(spec, int(rng.integers(1, 36 // d + 1)))
        max_dim = max(max_dim, space.dim)
        t = random_adjointable(space, space, rng).scale(float(np.exp(rng.uniform(-3, 3))))
        n = operator_norm(t)
        n2 = operator_norm(t.adjoint() @ t)
        # the spectral norm of the orthonormal-coordinate matrix is an independent oracle for ||t||
        oracle = float(np.linalg.norm(t.matrix, 2))
        worst = max(worst, abs(n * n - n2) / max(1.0, n * n), abs(n - oracle) / max(1.0, oracle))
    report(3, "cstar-identity", worst <= CSTAR_TOL and max_dim <= 36,
           f"500 operators, dim <= {max_dim}, worst relative residual {worst:.2e}")


def test_criterion_04_theta_identities(report):
    rng = np.random.default_rng(104)
    worst = {"adjoint": 0.0, "composition": 0.0, "left-absorption": 0.0}
    for _ in range(500):
        x_sp = random_module(rng, max_dim=24)
        f_sp = random_module(rng, x_sp.algebra, max_dim=24)
        x, u = random_vector(x_sp, rng), random_vector(f_sp, rng)
        y, v = random_vector(f_sp, rng), random_vector(f_sp, rng)
        rep = theta_identities_check(x, y, u, v, random_adjointable(x_sp, x_sp, rng))
        for c in rep.checks:
            worst[c.name] = max(worst[c.name], c.residual)
    w_ideal, products = 0.0, 0
    while products < 200:
        space = random_module(rng, max_dim=16)
        ideal = compact_ideal(space)
        t = random_adjointable(space, space, rng)
        k = (ideal.basis @ (rng.standard_normal(ideal.dim) + 1j * rng.standard_normal(ideal.dim)))
        k = k.reshape(space.dim, space.dim)
        w_ideal = max(w_ideal, ideal.residual(t.matrix @ k), ideal.residual(k @ t.matrix))
        products += 2
    ok = max(worst.values()) <= THETA_TOL and w_ideal <= THETA_TOL
    detail = ", ".join(f"{k} {v:.2e}" for k, v in worst.items())
    report(4, "theta-identities", ok, f"500 tuples: {detail}; {products} ideal products, worst {w_ideal:.2e}")


def test_criterion_05_k_of_a(report):
    rng = np.random.default_rng(105)
    ok, parts = True, []
    for spec in ("M2", "M2+C"):
        rep = k_of_a_isomorphism(spec, rng, trials=200)
        bij = rep["bijective"].passed
        res = max(c.residual for c in rep.checks if c.residual is not None)
        ok &= bij and res <= KA_TOL
        parts.append(f"{spec}: bijective {bij}, worst residual {res:.2e}")
    report(5, "k-of-a-isomorphism", ok, "; ".join(parts))


def test_criterion_06_self_duality(report):
    rng = np.random.default_rng(106)
    dim_ok = iso_ok = True
    w_riesz = 0.0
    for _ in range(100):
        space = random_module(rng)
        dim_ok &= self_duality_check(space)["dual-dimension"].passed
        iso_ok &= reflexivity_check(space)["omega-isomorphism"].passed
        x = random_vector(space, rng)
        w_riesz = max(w_riesz, float(np.linalg.norm(riesz_solve(hat(x)).flat() - x.flat()))
                      / max(1.0, float(np.linalg.norm(x.flat()))))
        tau = random_dual(space, rng)
        w_riesz = max(w_riesz, float(np.linalg.norm(hat(riesz_solve(tau)).matrix - tau.matrix))
                      / max(1.0, float(np.linalg.norm(tau.matrix))))
    ok = dim_ok and iso_ok and w_riesz <= RIESZ_TOL
    report(6, "self-duality-riesz-reflexivity", ok,
           f"100 modules; dual dimension {dim_ok}, Omega isomorphism {iso_ok}, worst Riesz residual {w_riesz:.2e}")


def test_criterion_07_complement(report):
    rng = np.random.default_rng(107)
    failures, proper = 0, 0
    for _ in range(300):
        space = random_module(rng)
        gens = [random_vector(space, rng).right(alg.random_element(space.algebra, rng) * space.algebra.matrix_unit(
            int(rng.integers(len(space.algebra.blocks))), 0, 0)) for _ in range(int(rng.integers(1, 3)))]
        f = submodule_generate(space, gens)
        fp = orthogonal_complement(f)
        proper += 0 < f.dim < space.dim
        failures += not (complement_checks(f) and f.dim + fp.dim == space.dim)
    report(7, "orthogonal-complement", failures == 0,
           f"300 submodules ({proper} proper), {failures} failures")


def test_criterion_08_gallery(report):
    certs = {name: run_demo(name) for name in DEMOS}

    def has(demo, fragment):
        return any(fragment in c.statement and c.verdict for c in certs[demo].claims)

    ortho = certs["orthocomplement-trivial"].claims[1].evidence["annihilator"]["argument"]
    pyth = certs["pythagoras-failure"].claims
    exact_norms = all(v["exact"] and v["lo"] == v["hi"] == "1/1"
                      for c in pyth[1:3] for v in c.evidence.values())
    checks = {
        "<f,g> = fg = 0": has("pythagoras-failure", "<f, g> = fg = 0 exactly"),
        "||f+g|| = 1, ||f|| = ||g|| = 1 exact": exact_norms and has("pythagoras-failure", "||f + g|| = 1 exactly"),
        "F^perp = {0} by integral domain": has("orthocomplement-trivial", "F^perp = {0}")
        and ortho == "degree additivity in an integral domain",
        "(1,0) witness": has("topological-not-orthogonal", "(1, 0) lies in X but not in F + F^perp"),
        "i*(1) = 1, 1 not in X": has("nonadjointable-inclusion", "hence c = 1")
        and has("nonadjointable-inclusion", "1 does not lie in X"),
        "all claims true": all(c.passed for c in certs.values()),
        "exact flags": all(c.exact for c in certs.values()),
        "bit-identical replay": all(replay(c.dumps()) for c in certs.values()),
    }
    bad = [k for k, v in checks.items() if not v]
    report(8, "gallery-exactness", not bad, f"{len(checks) - len(bad)}/{len(checks)} sub-checks" +
           (f"; failed: {', '.join(bad)}" if bad else ""))


def test_criterion_09_linking(report):
    rng = np.random.default_rng(109)
    w_embed = 0.0
    for _ in range(300):
        space = random_module(rng, max_dim=20)
        x, y = random_vector(space, rng), random_vector(space, rng)
        ref = embed_algebra(space, inner(x, y)).matrix()
        w_embed = max(w_embed, _rel((embed_module(x).star() * embed_module(y)).matrix() - ref, ref),
                      _rel(embed_module(x).matrix().conj().T @ embed_module(y).matrix() - ref, ref))
    dims = {}
    for n in (1, 2, 3):
        space = free_module("C" if n == 1 else f"M{n}", 1)
        dims[n] = (linking_dimension(space), corner_dimension_sum(space))
    dims_ok = all(d == c == 4 * n * n for n, (d, c) in dims.items())
    w_ident = w_iso = 0.0
    for _ in range(10):
        rep = representation_check(random_module(rng, max_dim=20), rng, trials=5, n_probes=2000)
        w_ident = max(w_ident, rep["inner-product"].residual, rep["right-action"].residual)
        w_iso = max(w_iso, *(rep[k].residual for k in ("module-isometric", "algebra-isometric", "operator-isometric")))
    ok = w_embed <= LINK_TOL and dims_ok and w_ident <= LINK_TOL and w_iso <= ISO_TOL
    report(9, "linking-algebra", ok,
           f"embed residual {w_embed:.2e}; dims {[d for d, _ in dims.values()]}; "
           f"representation {w_ident:.2e}; isometry {w_iso:.2e}")


def test_criterion_10_determinism(report, tmp_path):
    mismatched, failed = [], []
    for name in sorted(SUITES):
        for module in (None, "random"):
            outs = []
            for rep in range(2):
                path = tmp_path / f"{name}-{module}-{rep}.jsonl"
                argv = ["verify", "--suite", name, "--trials", "8", "--seed", "2024", "--out", str(path)]
                if module:
                    argv += ["--module", module]
                if main(argv) != 0:
                    failed.append(name)
                outs.append(path.read_bytes())
            if outs[0] != outs[1]:
                mismatched.append(f"{name}/{module or 'default'}")
    ok = not mismatched and not failed
    report(10, "determinism", ok,
           f"{2 * len(SUITES)} configurations, {len(mismatched)} mismatches, {len(failed)} failing runs")

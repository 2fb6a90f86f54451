"""Acceptance suite.

One test per shipped guarantee, each printing a single PASS/FAIL line (visible
with ``pytest -s``, and mirrored by the per-test verdicts of ``pytest -v``):

1. round trip: relative residual <= 1e-8 across magnitudes 1e-3..1e3
2. inverse homogeneity of order 1/kappa: deviation <= 1e-7
3. planar counterexample: two preimages, degree 2, injectivity probe fails
4. uniqueness for n >= 3: one preimage everywhere, degree +-1
5. coercivity bracket containment and radial extrema
6. continuity of the inverse at the origin
7. hypothesis gate catches the axis cube and a shifted black box
8. parser round-trip, symbolic-vs-FD Jacobians, fuzz robustness
9. deterministic CLI reports modulo timing
"""

import json
import random
import string
import time

import numpy as np
import pytest

from hominv import (
    acceptance_maps,
    axis_cube_map,
    blackbox_of,
    check_hypotheses,
    complex_square_map,
    count_preimages,
    eval_jacobian_batch,
    eval_map,
    format_map,
    homogeneity_residual,
    identity_map,
    injectivity_probe,
    inverse_homogeneity_check,
    invert,
    mapping_degree,
    parse_map,
    perturbed_radial_blackbox,
    radial_cube_map,
    random_polymap_spec,
    reflection_map,
    MapDefinitionError,
)
from hominv.cli import main as cli_main

SAMPLE_COUNT = 10_000


class _criterion:
    """Prints one `criterion N: PASS|FAIL` line when the block exits."""

    def __init__(self, num, label):
        self.num, self.label = num, label

    def __enter__(self):
        return self

    def __exit__(self, exc_type, exc, tb):
        verdict = "PASS" if exc_type is None else "FAIL"
        print(f"[acceptance] criterion {self.num} ({self.label}): {verdict}", flush=True)
        return False


@pytest.fixture(scope="module")
def maps():
    return acceptance_maps()


@pytest.fixture(scope="module")
def reports(maps):
    return {name: check_hypotheses(m, count=SAMPLE_COUNT, seed=0)
            for name, m in maps.items()}


@pytest.fixture(scope="module")
def inversion_log():
    # (map name, result) pairs accumulated by criterion 1, re-checked by 5
    return []


def test_criterion_1_round_trip(maps, reports, inversion_log):
    with _criterion(1, "round trip"):
        t0 = time.perf_counter()
        worst = 0.0
        for idx, (name, m) in enumerate(maps.items()):
            rng = np.random.default_rng([401, idx])
            dirs = rng.standard_normal((100, m.n))
            dirs /= np.linalg.norm(dirs, axis=1)[:, None]
            mags = 10.0 ** rng.uniform(-3.0, 3.0, size=100)
            for eta in dirs * mags[:, None]:
                res = invert(m, eta, report=reports[name])
                rel = float(
                    np.linalg.norm(eval_map(m, res.xi) - eta) / np.linalg.norm(eta)
                )
                worst = max(worst, rel)
                inversion_log.append((name, res))
        elapsed = time.perf_counter() - t0
        assert worst <= 1e-8, f"worst relative residual {worst:.3e}"
        assert elapsed < 60.0, f"500 inversions took {elapsed:.1f}s"


def test_criterion_2_inverse_homogeneity(maps, reports):
    with _criterion(2, "inverse homogeneity"):
        taus = [1e-2, 1e-1, 1.0, 1e1, 1e2]
        worst = 0.0
        for idx, (name, m) in enumerate(maps.items()):
            rng = np.random.default_rng([402, idx])
            for _ in range(3):
                eta = rng.standard_normal(m.n)
                eta /= np.linalg.norm(eta)
                dev = inverse_homogeneity_check(m, eta, taus, report=reports[name])
                worst = max(worst, dev)
        assert worst <= 1e-7, f"worst deviation {worst:.3e}"


def test_criterion_3_planar_counterexample():
    with _criterion(3, "planar counterexample"):
        m = complex_square_map()
        rep = check_hypotheses(m, count=SAMPLE_COUNT, seed=0)
        assert rep.status == "hypotheses-met-but-n<3"

        pre = count_preimages(m, np.array([1.0, 0.0]), report=rep)
        assert len(pre) == 2, f"expected 2 preimages, found {len(pre)}"
        roots = sorted(tuple(x) for x, _ in pre)
        assert np.allclose(roots[0], [-1.0, 0.0], atol=1e-10)
        assert np.allclose(roots[1], [1.0, 0.0], atol=1e-10)

        deg = mapping_degree(m, np.array([1.0, 0.0]), report=rep)
        assert deg.degree == 2

        probe = injectivity_probe(m, trials=20, report=rep)
        assert probe["verdict"] == "not-injective"
        assert all(c != 1 for c in probe["counts"]), probe["counts"]
        assert all(c == 2 for c in probe["counts"]), probe["counts"]


def test_criterion_4_uniqueness_for_n_ge_3(maps, reports):
    with _criterion(4, "uniqueness for n >= 3"):
        pool = dict(maps)
        pool["reflection3"] = reflection_map(3)
        all_reports = dict(reports)
        all_reports["reflection3"] = check_hypotheses(
            pool["reflection3"], count=SAMPLE_COUNT, seed=0
        )
        degrees = {}
        for name, m in pool.items():
            rep = all_reports[name]
            probe = injectivity_probe(m, trials=20, report=rep)
            assert probe["counts"] == [1] * 20, f"{name}: {probe['counts']}"
            rng = np.random.default_rng([404, m.n])
            eta = rng.standard_normal(m.n)
            deg = mapping_degree(m, eta, report=rep)
            assert deg.degree in (-1, 1), f"{name}: degree {deg.degree}"
            assert deg.injective_evidence
            degrees[name] = deg.degree
        assert degrees["reflection3"] == -1
        assert degrees["identity3"] == 1


def test_criterion_5_coercivity_bracket(maps, reports, inversion_log):
    with _criterion(5, "coercivity bracket"):
        # every successful inversion sits inside its bracket (slack 1e-9 r_hi);
        # first the inversions accumulated by criterion 1, then a fresh batch
        checked = 0
        for name, res in inversion_log:
            r = float(np.linalg.norm(res.xi))
            r_lo, r_hi = res.bracket
            slack = 1e-9 * r_hi
            assert r_lo - slack <= r <= r_hi + slack, (name, r, res.bracket)
            checked += 1
        for idx, (name, m) in enumerate(maps.items()):
            rng = np.random.default_rng([405, idx])
            for _ in range(20):
                eta = rng.standard_normal(m.n) * 10.0 ** rng.uniform(-3, 3)
                res = invert(m, eta, report=reports[name])
                r = float(np.linalg.norm(res.xi))
                r_lo, r_hi = res.bracket
                slack = 1e-9 * r_hi
                assert r_lo - slack <= r <= r_hi + slack, (name, r, res.bracket)
                checked += 1
        assert checked >= 100

        # radial maps have |f| identically 1 on the sphere
        for name in ("identity3", "radial_cube3"):
            rep = reports[name]
            assert rep.sample_count == 10_000
            assert abs(rep.c0_empirical - 1.0) <= 1e-6, name
            assert abs(rep.c_empirical - 1.0) <= 1e-6, name


def test_criterion_6_continuity_at_origin(reports):
    with _criterion(6, "continuity at the origin"):
        m = radial_cube_map(3)
        rep = reports["radial_cube3"]
        u = np.array([1.0, 1.0, 1.0]) / np.sqrt(3.0)
        c0 = rep.c0_empirical
        prev_bound = np.inf
        for j in range(1, 31):
            eta = (2.0 ** -j) * u
            res = invert(m, eta, report=rep)
            bound = (np.linalg.norm(eta) / c0) ** (1.0 / m.kappa)
            assert np.linalg.norm(res.xi) <= bound * (1.0 + 1e-12), j
            assert bound < prev_bound, "bound must decrease strictly"
            prev_bound = bound
        assert prev_bound < 1e-2  # the j=30 bound: preimages collapse to 0


def test_criterion_7_hypothesis_gate():
    with _criterion(7, "hypothesis gate"):
        rep = check_hypotheses(axis_cube_map(3), count=SAMPLE_COUNT, seed=0)
        assert rep.status == "fail"
        assert "jacobian-vanishes" in rep.reasons

        bb = perturbed_radial_blackbox(n=3, kappa=3.0, shift=(0.01, 0.0, 0.0))
        assert homogeneity_residual(bb, count=100, seed=0, taus=[100.0]) > 1e-3
        rep_bb = check_hypotheses(bb, count=2000, seed=0)
        assert rep_bb.status == "fail"
        assert "homogeneity-residual" in rep_bb.reasons


def test_criterion_8_parser_and_jacobian():
    with _criterion(8, "parser and Jacobian"):
        # parse/format round trip: exact term multiset equality, 200 maps
        for seed in range(200):
            m = random_polymap_spec(seed)
            back = parse_map(format_map(m))
            assert back.body == m.body, f"seed {seed}"
            assert back.kappa == m.kappa, f"seed {seed}"

        # symbolic vs finite differences at 50 unit points per map
        rng = np.random.default_rng(408)
        for seed in range(0, 200, 4):  # every map family shape appears
            m = random_polymap_spec(seed)
            W = rng.standard_normal((50, m.n))
            W /= np.linalg.norm(W, axis=1)[:, None]
            Js = eval_jacobian_batch(m, W)
            Jf = eval_jacobian_batch(blackbox_of(m), W)
            scale = max(1.0, float(np.max(np.abs(Js))))
            assert float(np.max(np.abs(Js - Jf))) <= 1e-6 * scale, f"seed {seed}"

        # fuzz: 10^4 mutations never crash, errors carry positions
        r = random.Random(999)
        alphabet = string.ascii_lowercase + string.digits + "+-*^=;/. \nxf"
        seeds = [format_map(random_polymap_spec(s)) for s in range(20)]
        for _ in range(10_000):
            text = list(r.choice(seeds))
            for _ in range(r.randint(1, 6)):
                op = r.randint(0, 2)
                pos = r.randrange(max(1, len(text)))
                if op == 0 and text:
                    text[pos] = r.choice(alphabet)
                elif op == 1:
                    text.insert(pos, r.choice(alphabet))
                elif text:
                    del text[pos]
            try:
                parse_map("".join(text))
            except MapDefinitionError as err:
                assert isinstance(err.line, int) and err.line >= 1
                assert isinstance(err.col, int) and err.col >= 1


def test_criterion_9_deterministic_reports(tmp_path):
    with _criterion(9, "deterministic reports"):
        radial = tmp_path / "radial_cube3.map"
        radial.write_text(
            "n = 3;\n"
            "f1 = x1^3 + x1 x2^2 + x1 x3^2;\n"
            "f2 = x2 x1^2 + x2^3 + x2 x3^2;\n"
            "f3 = x3 x1^2 + x3 x2^2 + x3^3;\n"
        )
        planar = tmp_path / "complex_square.map"
        planar.write_text("n = 2; f1 = x1^2 - x2^2; f2 = 2 x1 x2;\n")

        suite = [
            ["check", str(radial), "--samples", "2000"],
            ["invert", str(radial), "--target", "0.5,-1,2", "--samples", "2000"],
            ["degree", str(planar), "--target", "1,0", "--samples", "2000"],
            ["roundtrip", str(radial), "--count", "5", "--samples", "2000"],
        ]
        for k, argv in enumerate(suite):
            texts = []
            for run in (1, 2):
                out = tmp_path / f"cmd{k}_run{run}.json"
                rc = cli_main(argv + ["--seed", "0", "--json", str(out)])
                assert rc == 0, argv
                doc = json.loads(out.read_text())
                doc.pop("timing")
                texts.append(json.dumps(doc, indent=2))
            assert texts[0] == texts[1], f"report for {argv[0]} not reproducible"

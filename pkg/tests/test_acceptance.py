"""Acceptance criteria, one test each, at the stated tolerances and time limits.

Every test records a line "criterion N: PASS|FAIL ..." that is printed as it runs
and again in the terminal summary.
"""

from __future__ import annotations

import math
import time

import numpy as np

from knotapoly.apoly import apoly
from knotapoly.cli import run
from knotapoly.knot_input import parse_knot_spec
from knotapoly.oracle import interpolate_apoly
from knotapoly.perturb import (
    Infeasible, SliceBlocked, enumerate_critical_points, graph_polyline, plan_finite_avoidance,
    plan_slice_path, polyline_distance,
)
from knotapoly.pillowcase import TWO_PI, check_symmetries, torus_hausdorff, wrap_angle
from knotapoly.polyalg import IntPoly2, L_MINUS_1, divide_out
from knotapoly.slicecheck import check_all_slices, deg_m_nonzero

from conftest import (
    ACCEPTANCE_LINES, COMPUTE_SECONDS, abelian_line, pillowcase_of, riley_set_of, synthetic_set,
)

KNOTS = ["3/1", "5/3", "7/3", "torus:2,5"]
ONE = IntPoly2({(0, 0): 1})
DELTA = TWO_PI / 360

_results = {}


def report(n, ok, detail):
    line = f"criterion {n}: {'PASS' if ok else 'FAIL'} ({detail})"
    ACCEPTANCE_LINES.append(line)
    print(line)
    assert ok, line


def _apolys(specs):
    """A-polynomials computed once per test session, with the time each took."""
    out = {}
    for spec in specs:
        if spec not in _results:
            start = time.perf_counter()
            r = apoly(parse_knot_spec(spec))
            _results[spec] = (r, time.perf_counter() - start)
        out[spec] = _results[spec]
    return out


def _cached_set(kind, spec):
    s = (pillowcase_of if kind == "slice" else riley_set_of)(spec)
    return s, COMPUTE_SECONDS[(kind, spec, 360)]


def test_criterion_01_unknot_exact():
    start = time.perf_counter()
    r = apoly(parse_knot_spec("1/1"))
    elapsed = time.perf_counter() - start
    ok = r.a_poly == L_MINUS_1 and elapsed < 1.0
    report(1, ok, f"a_poly = {r.a_poly}, {elapsed:.3f}s < 1s")


def test_criterion_02_l_minus_1_divides():
    results = _apolys(["1/1"] + KNOTS)
    exact = {spec: divide_out(r.a_poly, L_MINUS_1)[1] for spec, (r, _) in results.items()}
    elapsed = sum(t for _, t in results.values())
    ok = all(exact.values()) and elapsed < 30.0
    report(2, ok, f"exact division for {sorted(k for k, v in exact.items() if v)}, {elapsed:.2f}s < 30s")


def test_criterion_03_oracle_equivalence():
    start = time.perf_counter()
    agree = {}
    for spec in ["3/1", "5/3"]:
        r = apoly(parse_knot_spec(spec))
        agree[spec] = interpolate_apoly(parse_knot_spec(spec)) == r.a_poly
    elapsed = time.perf_counter() - start
    ok = all(agree.values()) and elapsed < 60.0
    report(3, ok, f"coefficient match {agree}, {elapsed:.2f}s < 60s")


def test_criterion_04_nontrivial_factor():
    results = _apolys(KNOTS)
    factors = {spec: str(r.nontrivial_factor) for spec, (r, _) in results.items()}
    elapsed = sum(t for _, t in results.values())
    ok = all(r.nontrivial_factor != ONE for r, _ in results.values()) and elapsed < 30.0
    report(4, ok, f"nontrivial factors {factors}, {elapsed:.2f}s < 30s")


def test_criterion_05_degree_in_m():
    results = _apolys(["1/1"] + KNOTS)
    start = time.perf_counter()
    knots_ok = {spec: deg_m_nonzero(results[spec][0]) for spec in KNOTS}
    unknot = deg_m_nonzero(results["1/1"][0])
    elapsed = time.perf_counter() - start
    ok = all(knots_ok.values()) and not unknot and elapsed < 1.0
    report(5, ok, f"deg_m != 0 for {knots_ok}, unknot {unknot}, {elapsed:.4f}s < 1s")


def test_criterion_06_slice_property():
    results = _apolys(["1/1", "3/1", "5/3"])
    start = time.perf_counter()
    verdicts = {spec: check_all_slices(results[spec][0], 360, 1e-8) for spec in ["3/1", "5/3", "1/1"]}
    verdicts["(l-1)(m-2)"] = check_all_slices(IntPoly2.parse("(l - 1)*(m - 2)"), 360, 1e-8)
    elapsed = time.perf_counter() - start
    expected = {"3/1": True, "5/3": True, "1/1": False, "(l-1)(m-2)": False}
    got = {k: v.passed for k, v in verdicts.items()}
    worst = {k: max(e.min_unit_distance for e in v.entries) for k, v in verdicts.items()}
    ok = got == expected and elapsed < 60.0
    report(6, ok, f"passed {got}, worst slice distance 3/1 {worst['3/1']:.1e} 5/3 {worst['5/3']:.1e}, "
                  f"{elapsed:.2f}s < 60s")


def test_criterion_07_symmetries():
    start = time.perf_counter()
    extra = 0.0
    details = {}
    ok = True
    for spec in ["3/1", "5/3"]:
        s, t = _cached_set("slice", spec)
        extra += t
        rep = check_symmetries(s, DELTA)
        details[spec] = (f"{rep['translation_distance']:.1e}", f"{rep['reflection_distance']:.1e}")
        ok = ok and rep["passed"]
    elapsed = time.perf_counter() - start + extra
    ok = ok and elapsed < 120.0
    report(7, ok, f"(translation, reflection) Hausdorff {details} < {DELTA:.4f}, "
                  f"{elapsed:.2f}s < 120s including sampling")


def test_criterion_08_pillowcase_on_curve():
    start = time.perf_counter()
    extra = 0.0
    fractions = {}
    for spec in ["3/1", "5/3"]:
        s, t = _cached_set("slice", spec)
        extra += t
        a = _apolys([spec])[spec][0].a_poly
        pts = [p for p in s.points if p.eta != 0.0]
        good = sum(a.relative_residual(complex(math.cos(p.theta), math.sin(p.theta)),
                                       complex(math.cos(p.eta), math.sin(p.eta))) < 1e-6 for p in pts)
        fractions[spec] = (good / len(pts) if pts else 0.0, len(pts))
    elapsed = time.perf_counter() - start + extra
    ok = all(f >= 0.99 for f, _ in fractions.values()) and elapsed < 60.0
    shown = {k: f"{f:.4f} of {n}" for k, (f, n) in fractions.items()}
    report(8, ok, f"fraction with residual < 1e-6 {shown}, {elapsed:.2f}s < 60s including sampling")


def test_criterion_09_cross_method():
    start = time.perf_counter()
    extra = 0.0
    dist = {}
    for spec in ["3/1", "5/3"]:
        a, ta = _cached_set("slice", spec)
        b, tb = _cached_set("riley", spec)
        extra += ta + tb
        dist[spec] = torus_hausdorff(a, b)
    elapsed = time.perf_counter() - start + extra
    ok = all(d < DELTA for d in dist.values()) and elapsed < 120.0
    shown = {k: f"{d:.1e}" for k, d in dist.items()}
    report(9, ok, f"Hausdorff {shown} < {DELTA:.4f}, {elapsed:.2f}s < 120s including sampling")


def test_criterion_10_planner_soundness():
    start = time.perf_counter()
    rng = np.random.default_rng(20240601)
    sound = 0
    margins = []
    for _ in range(20):
        xy = synthetic_set(rng)
        try:
            g1, g2, cert = plan_finite_avoidance(xy, DELTA)
        except Infeasible:
            continue
        if cert.passed and enumerate_critical_points(xy, xy, g1, g2, cert.margin / 2) == []:
            sound += 1
            margins.append(cert.margin)
    infeasible = 0
    for _ in range(5):
        xy = np.vstack([synthetic_set(rng), [[0.0, math.pi]]])
        try:
            plan_finite_avoidance(xy, DELTA)
        except Infeasible:
            infeasible += 1
    elapsed = time.perf_counter() - start
    ok = sound == 20 and infeasible == 5 and elapsed < 30.0
    report(10, ok, f"{sound}/20 certified with no critical points (min margin {min(margins, default=0):.3f}), "
                   f"{infeasible}/5 sets with (0,pi) infeasible, {elapsed:.2f}s < 30s")


def _slice_path_sound(shifted, eta0):
    g = plan_slice_path(shifted, eta0, DELTA)
    xs = np.linspace(-7.0, 7.0, 1401)
    odd = np.allclose(g(-xs), -g(xs), atol=1e-12)
    periodic = np.allclose(g(xs + TWO_PI), g(xs), atol=1e-12)
    ends = g(0.0) == 0.0 and abs(g(math.pi)) < 1e-12
    sym = np.vstack([shifted, wrap_angle(-np.asarray(shifted))])
    margin = float(polyline_distance(sym, graph_polyline(g)).min())
    return odd and periodic and ends and margin > 0, margin


def test_criterion_11_slice_path_planner():
    start = time.perf_counter()
    checks = {}
    unknot_shifted = np.array(abelian_line()) + np.array([0.0, -math.pi])
    checks["unknot"] = _slice_path_sound(unknot_shifted, 3 * math.pi / 2)
    rng = np.random.default_rng(7)
    for i in range(5):
        eta0 = float(rng.uniform(math.pi + 0.3, TWO_PI - 0.3))
        h = abs(eta0 - math.pi)
        # two points well inside the regions bounded by the path
        pts = np.array([[rng.uniform(0.8, 2.3), h + rng.uniform(0.4, 0.8)],
                        [rng.uniform(0.8, 2.3), -h - rng.uniform(0.4, 0.8)]])
        checks[f"two-point #{i}"] = _slice_path_sound(pts, eta0)
    s, t = _cached_set("slice", "3/1")
    eta0 = next(p.eta for p in s.points if 0.5 < p.eta < 1.0)
    try:
        plan_slice_path(s.coords() + np.array([0.0, -math.pi]), eta0, DELTA)
        blocked = False
    except SliceBlocked:
        blocked = True
    elapsed = time.perf_counter() - start + t
    ok = all(v[0] for v in checks.values()) and blocked and elapsed < 30.0
    shown = {k: f"{v[1]:.3f}" for k, v in checks.items()}
    report(11, ok, f"graph margins {shown}, trefoil eta0={eta0:.4f} blocked {blocked}, "
                   f"{elapsed:.2f}s < 30s including sampling")


def _pipeline(d):
    """Every CLI subcommand on fixed inputs; returns exit codes."""
    codes = []
    codes.append(run(["apoly", "3/1", "-o", str(d / "trefoil.json")]))
    codes.append(run(["apoly", "1/1", "-o", str(d / "unknot.json")]))
    codes.append(run(["pillowcase", "3/1", "-o", str(d / "trefoil.csv")]))
    codes.append(run(["pillowcase", "5/3", "--json", "-o", str(d / "fig8.json")]))
    codes.append(run(["slices", str(d / "trefoil.json"), "-o", str(d / "slices.csv")]))
    codes.append(run(["validate", str(d / "trefoil.json"), str(d / "trefoil.csv"),
                      "-o", str(d / "validate.json")]))
    rows = [(0.3, 1.0), (2.0, 4.0), (5.0, 1.5)] + abelian_line(72)
    (d / "synthetic.csv").write_text("theta,eta\n" + "".join(f"{a!r},{b!r}\n" for a, b in rows))
    codes.append(run(["plan", "--set", str(d / "synthetic.csv"), "--g1-out", str(d / "g1.json"),
                      "--g2-out", str(d / "g2.json")]))
    codes.append(run(["certify", "--set", str(d / "synthetic.csv"), "--g1", str(d / "g1.json"),
                      "--g2", str(d / "g2.json"), "-o", str(d / "cert.json")]))
    codes.append(run(["critical", "--p1", str(d / "synthetic.csv"), "--p2", str(d / "synthetic.csv"),
                      "--g1", str(d / "g1.json"), "--g2", str(d / "g2.json"), "--tol", "0.01",
                      "-o", str(d / "critical.json")]))
    codes.append(run(["plan", "--knot", "1/1", "--eta0", "4.71238898038469", "-o", str(d / "path.json")]))
    codes.append(run(["render", str(d / "trefoil.csv"), "--second", str(d / "synthetic.csv"),
                      "-o", str(d / "trefoil.svg")]))
    codes.append(run(["render", str(d / "synthetic.csv"), "--shear", str(d / "path.json"),
                      "-o", str(d / "path.svg")]))
    return codes


def test_criterion_12_determinism(tmp_path, capsys):
    outputs = []
    for tag in ("first", "second"):
        d = tmp_path / tag
        d.mkdir()
        codes = _pipeline(d)
        captured = capsys.readouterr()
        files = {p.name: p.read_bytes() for p in sorted(d.iterdir())}
        outputs.append((codes, captured.out, files))
    (c1, o1, f1), (c2, o2, f2) = outputs
    differing = sorted(k for k in f1 if f1[k] != f2.get(k))
    ok = c1 == c2 and all(c == 0 for c in c1) and o1 == o2 and f1.keys() == f2.keys() and not differing
    report(12, ok, f"{len(f1)} files from {len(c1)} commands byte-identical across reruns"
                   + (f", differing: {differing}" if differing else "") + f", exit codes {c1}")

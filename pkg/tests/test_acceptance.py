"""Acceptance gate: every quantitative criterion at its stated tolerance.

Run with `pytest tests/test_acceptance.py -v -s` to see one pass/fail line
per criterion.
"""

import math
import time
from fractions import Fraction

import numpy as np
import pytest
from scipy.optimize import minimize_scalar

from flatdrop import capacity as cap
from flatdrop import energy as en
from flatdrop import geometry as g
from flatdrop import specfun as sf
from flatdrop.verify import perturbed_disk, random_convex_polygon, random_star_set

LADDER = [0.16, 0.08, 0.04]       # for unit-scale shapes (diameter ~ 2)
RUNTIME_BUDGET = 60.0
CELL_BUDGET = 10_000


def report(num: int, name: str, passed: bool, detail: str) -> None:
    print(f"criterion {num:02d} {name}: {'PASS' if passed else 'FAIL'} - {detail}")
    assert passed, f"criterion {num:02d} {name}: {detail}"


def test_01_disk_capacity():
    disk = g.make_disk(1.0, 256)
    start = time.perf_counter()
    res = cap.riesz_energy(disk, LADDER)
    elapsed = time.perf_counter() - start
    target = math.pi / 2.0
    rel = abs(res.extrapolated - target) / target
    ok = rel <= 0.01 and elapsed < RUNTIME_BUDGET and len(res.measure.mesh) <= CELL_BUDGET
    report(
        1, "disk-capacity", ok,
        f"extrapolated={res.extrapolated:.6f} target={target:.6f} rel={rel:.2e} "
        f"({len(res.measure.mesh)} cells, {elapsed:.1f}s)",
    )


def test_02_ellipse_capacity():
    ell = g.make_ellipse(g.EllipseSpec(1.0, 0.7), 1024)
    start = time.perf_counter()
    res = cap.riesz_energy(ell, LADDER)
    elapsed = time.perf_counter() - start
    target = sf.elliptic_K(0.49)
    rel = abs(res.extrapolated - target) / target
    ok = rel <= 0.01 and elapsed < RUNTIME_BUDGET and len(res.measure.mesh) <= CELL_BUDGET
    report(
        2, "ellipse-capacity", ok,
        f"extrapolated={res.extrapolated:.6f} target={target:.6f} rel={rel:.2e} "
        f"({elapsed:.1f}s)",
    )


def test_03_ellipse_perimeter():
    ell = g.make_ellipse(g.EllipseSpec(1.0, 0.7), 4096)
    target = 4.0 * sf.elliptic_E(0.49)
    err = abs(g.perimeter(ell) - target)
    report(3, "ellipse-perimeter", err <= 1e-4, f"|perimeter - 4E(0.49)| = {err:.2e} <= 1e-4")


def test_04_dudko_accuracy():
    def rel_error(e: float) -> float:
        x = e * e
        bound = en.dudko_capacitary_factor(
            4.0 * sf.elliptic_E(x), math.pi * math.sqrt(1.0 - x)
        )
        return bound / sf.elliptic_K(x) - 1.0

    r07 = rel_error(0.7)
    r9999 = rel_error(0.9999)
    ok = 4e-5 <= r07 <= 6e-5 and 0.15 <= r9999 <= 0.35
    report(4, "dudko-accuracy", ok, f"rel(e=0.7)={r07:.3e} in [4e-5,6e-5]; rel(e=0.9999)={r9999:.3f} in [0.15,0.35]")


def test_05_f_bound_and_g_sign():
    grid = np.arange(1, 10_001) / 10_001
    f_max = max(sf.dudko_f(x) for x in grid)
    g_max = max(sf.dudko_g(x) for x in grid)
    f_limit = abs(sf.dudko_f(1e-9) - 1.0)
    ok = f_max <= 1.0 + 1e-12 and g_max < 0.0 and f_limit <= 1e-9
    report(
        5, "f-bound-g-sign", ok,
        f"max f = {f_max:.15f} <= 1+1e-12; max g = {g_max:.2e} < 0; |f(0+)-1| = {f_limit:.1e} <= 1e-9",
    )


def test_06_exact_certificate():
    p27, q15 = sf.derive_certificate()
    ok = (
        p27.degree == 27
        and q15.degree == 15
        and p27[0] > 0
        and q15[0] < 0
        and sf.sturm_constant_sign(p27, 0, 1)
        and sf.sturm_constant_sign(q15, 0, 1)
    )
    report(
        6, "exact-certificate", ok,
        f"degrees=({p27.degree},{q15.degree}) P(0)={p27[0]} Q(0)={q15[0]} no roots in [0,1] (exact)",
    )


def test_07_ball_optimum():
    worst = 0.0
    for lam in (1.0, 4.0, 10.0):
        floor = 2.0 * math.pi * math.sqrt(lam)
        opt = minimize_scalar(
            lambda r: en.ball_energy_Q(r, lam), bounds=(1e-6, 100.0), method="bounded",
            options={"xatol": 1e-12},
        )
        worst = max(
            worst,
            abs(opt.fun - floor) / floor,
            abs(en.ball_energy_Q(en.optimal_ball_radius(lam), lam) - floor) / floor,
        )
    report(7, "ball-optimum", worst <= 1e-12, f"max rel deviation {worst:.2e} <= 1e-12")


def test_08_thresholds_and_crossover():
    th = en.critical_thresholds(math.pi)
    targets = (4.0, 4.0 * math.sqrt(2.0), 12.0, math.pi**2)
    dev = max(
        abs(a - b)
        for a, b in zip((th.lambda0_Q, th.lambda_c1_Q, th.lambda_c2_Q, th.lambda0_U), targets)
    )
    crossover_err = abs(en.split_crossover(math.pi, tol=1e-12) - th.lambda_c1_Q)
    ok = dev <= 1e-12 and crossover_err <= 1e-9
    report(
        8, "thresholds", ok,
        f"threshold dev {dev:.2e} <= 1e-12; bisection crossover err {crossover_err:.2e} <= 1e-9",
    )


def test_09_scaling_law():
    cfg, _ = en.nonexistence_witness(math.pi, 8.0, 100, 1e6)
    witness_gap = abs(
        en.multiball_energy_upper(cfg, 8.0) / (2.0 * math.pi * math.sqrt(8.0)) - 1.0
    )
    mist = en.mist_configuration(4.0, 100, 1e6)
    mist_gap = abs(en.multiball_energy_upper(mist, 4.0) / (4.0 * math.pi) - 1.0)
    ok = witness_gap <= 0.01 and mist_gap <= 0.01
    report(9, "scaling-law", ok, f"witness gap {witness_gap:.2e}, mist gap {mist_gap:.2e} <= 1e-2")


def test_10_partition_bounds():
    rng = np.random.default_rng(1010)
    worst_upper = -math.inf
    worst_lower = math.inf
    for k in range(10):
        s1 = random_star_set(rng)
        s2 = random_star_set(rng, center=(4.0 + 0.3 * k, 0.5))
        union = g.PlanarSet([s1.components[0], s2.components[0]])
        gap = g.set_distance(s1, s2)
        mesh = cap.build_mesh(union, 0.08 * max(g.diameter(s1), g.diameter(s2)))
        kernel = cap.assemble_kernel(mesh)
        w, e_union, _ = cap._equilibrium_weights(kernel)
        in1 = mesh.component_id == 0
        e1 = cap._equilibrium_weights(kernel[np.ix_(in1, in1)])[1]
        e2 = cap._equilibrium_weights(kernel[np.ix_(~in1, ~in1)])[1]
        for theta in (0.0, 0.25, 0.5, 0.75, 1.0):
            bound = theta**2 * e1 + (1 - theta) ** 2 * e2 + 2 * theta * (1 - theta) / gap
            worst_upper = max(worst_upper, (e_union - bound) / e_union)
        theta_bar = float(w[in1].sum())
        recombined = theta_bar**2 * e1 + (1 - theta_bar) ** 2 * e2
        worst_lower = min(worst_lower, (e_union - recombined) / e_union)
    ok = worst_upper <= 0.02 and worst_lower > 0.0
    report(
        10, "partition-bounds", ok,
        f"upper slack {worst_upper:+.3e} <= 0.02; lower margin {worst_lower:+.3e} > 0",
    )


def test_11_brunn_minkowski():
    rng = np.random.default_rng(1111)
    worst = math.inf
    for _ in range(20):
        p = random_convex_polygon(rng, scale=rng.uniform(0.5, 1.5))
        q = random_convex_polygon(rng, scale=rng.uniform(0.5, 1.5))
        mid = g.minkowski_sum(g.scale(p, 0.5), g.scale(q, 0.5))
        caps = []
        for poly in (p, q, mid):
            s = poly.to_planar_set()
            mesh = cap.build_mesh(s, 0.08 * g.diameter(s))
            caps.append(1.0 / cap.equilibrium_measure(mesh).energy)
        worst = min(worst, (caps[2] - 0.5 * (caps[0] + caps[1])) / (caps[0] + caps[1]))
    report(11, "brunn-minkowski", worst >= -0.02, f"min margin {worst:+.3e} >= -0.02")


def test_12_hadwiger_rounding():
    rect = g.ConvexPolygon([(0.0, 0.0), (3.0, 0.0), (3.0, 1.0), (0.0, 1.0)])
    seq = g.hadwiger_round(rect, 64)
    roundness_final = g.roundness(seq[-1])
    perim_dev = max(abs(g.perimeter(p) - 8.0) for p in seq)

    def i1(s):
        mesh = cap.build_mesh(s, 0.08 * g.diameter(s))
        return cap.equilibrium_measure(mesh).energy

    base = i1(rect.to_planar_set())
    monotone = all(i1(seq[n - 1].to_planar_set()) <= base * 1.02 for n in (2, 8, 32))
    ok = roundness_final <= 1.05 and perim_dev <= 1e-9 * 8.0 and monotone
    report(
        12, "hadwiger-rounding", ok,
        f"roundness(64)={roundness_final:.4f} <= 1.05; perimeter dev {perim_dev:.1e}; "
        f"I1 non-increasing within 2%: {monotone}",
    )


def test_13_equilibrium_density():
    disk = g.make_disk(1.0, 256)
    mesh = cap.build_mesh(disk, 0.05)
    measure = cap.equilibrium_measure(mesh)
    inner = mesh.boundary_dist > 0.2
    r = np.linalg.norm(mesh.centroids[inner], axis=1)
    predicted = 1.0 / (2.0 * math.pi * np.sqrt(1.0 - r * r))
    dev = float(np.max(np.abs(measure.densities()[inner] / predicted - 1.0)))
    report(13, "equilibrium-density", dev <= 0.05, f"max density deviation {dev:.3e} <= 0.05 on {int(inner.sum())} cells")


def test_14_fixed_voltage_program():
    worst = 0.0
    for m in (math.pi, 2.0):
        for lam in (1.5 * math.pi**2, 4.0 * math.pi**2):
            for n in (1, 4, 25):
                closed = 2.0 * math.sqrt(math.pi * m) * (1.0 - lam / math.pi**2) * math.sqrt(n)
                worst = max(worst, abs(en.eu_divergence_sequence(m, lam, n) - closed))
    seq = [en.eu_divergence_sequence(math.pi, 2.0 * math.pi**2, 4**k) for k in range(5)]
    unbounded = all(b < a for a, b in zip(seq, seq[1:])) and seq[-1] < -100.0
    crit = math.pi**2
    tri = (
        en.ball_energy_U_infimum(0.9 * crit) == (0.0, False)
        and en.ball_energy_U_infimum(crit) == (0.0, True)
        and en.ball_energy_U_infimum(1.1 * crit)[0] == -math.inf
    )
    ok = worst <= 1e-12 and unbounded and tri
    report(
        14, "fixed-voltage-program", ok,
        f"closed-form dev {worst:.2e} <= 1e-12; divergent sequence: {unbounded}; trichotomy: {tri}",
    )


def test_15_global_minimality_suite():
    rng = np.random.default_rng(1515)
    lam0 = 4.0  # lambda0 at area pi
    h = 0.16
    disk = g.make_disk(1.0, 192)

    def e_q(s):
        mesh = cap.build_mesh(s, h)
        return g.perimeter(s) + lam0 * cap.equilibrium_measure(mesh).energy

    baseline = e_q(disk)
    margins = [(e_q(perturbed_disk(rng)) - baseline) / baseline for _ in range(20)]
    worst = min(margins)
    report(
        15, "global-minimality", worst > 0.0,
        f"min margin over 20 perturbed disks {worst:+.3e} > 0 (strict)",
    )

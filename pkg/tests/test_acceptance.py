"""
Acceptance criteria 1-9.

Each test records one pass/fail line (with the measured figures) that is
printed in the terminal summary; run this file alone with
``pytest tests/test_acceptance.py -v``.
"""

import math
import time

import numpy as np
import pytest

from jacobi_spectra.background import BorgData, reconstruct
from jacobi_spectra.perturbation import Perturbation, moments
from jacobi_spectra.regions import (
    Rect,
    constants,
    criterion_first_moment_empty,
    criterion_lhs,
    first_moment_lhs,
    omega_constant,
)
from jacobi_spectra.suite import run_check
from jacobi_spectra.verify import finite_section, locate_zeros, random_perturbation, truncated_eigs, winding

RESULTS = {}

TITLES = {
    1: "omega constant",
    2: "K2 dual formula",
    3: "reconstruction round-trip",
    4: "identity suite",
    5: "bound suite",
    6: "region free of eigenvalues",
    7: "cross-oracle zero location",
    8: "first-moment emptiness",
    9: "solver equivalence",
}

REFERENCE = [BorgData(1.0, 3.0, nu, eps) for nu in (0.0, 0.5) for eps in (-1, 1)]


def record(n, passed, detail):
    RESULTS[n] = (bool(passed), detail)
    assert passed, f"criterion {n} ({TITLES[n]}): {detail}"


def run_checks(seed, spec):
    """Run named suite checks; returns (all passed, summary, seconds)."""
    rng = np.random.default_rng(seed)
    t0 = time.perf_counter()
    out = [run_check(cid, rng, **sizes) for cid, sizes in spec]
    dt = time.perf_counter() - t0
    summary = ", ".join(f"{r.id.split('.')[1]} {r.worst:.2g}" for r in out)
    bad = [r.to_dict() for r in out if not r.passed]
    return not bad, summary, dt, bad


def test_c1_omega_constant():
    t = omega_constant()
    reps = 200
    t0 = time.perf_counter()
    for _ in range(reps):
        omega_constant()
    per_call = (time.perf_counter() - t0) / reps
    residual = abs(t * math.exp(t) - 1)
    ok = f"{t:.3f}" == "0.567" and residual <= 1e-14 and per_call < 1e-3
    record(1, ok, f"t = {t!r}, |t e^t - 1| = {residual:.1e}, {per_call * 1e6:.1f} us/call")


def test_c2_k2_dual_formula():
    ok, summary, dt, bad = run_checks(2, [("regions.constants", {"n_bg": 100})])
    record(2, ok and dt < 1.0, f"worst err/tol {summary}, {dt:.3f} s" + (f" {bad}" if bad else ""))


def test_c3_reconstruction_roundtrip():
    ok, summary, dt, bad = run_checks(3, [("background.band_edges", {"n_bg": 100})])
    record(3, ok and dt < 1.0, f"100 Borg inputs, worst err/tol {summary}, {dt:.3f} s" + (f" {bad}" if bad else ""))


def test_c4_identity_suite():
    spec = [
        ("background.wronskian", {"n_points": 10_000}),
        ("background.green_delta", {"n_points": 10_000}),
        ("background.weyl_product", {"n_points": 10_000}),
        ("background.psi1_floquet_form", {"n_points": 10_000}),
        ("background.conjugate_symmetry", {"n_points": 10_000}),
    ]
    ok, summary, dt, bad = run_checks(4, spec)
    record(4, ok and dt < 10.0, f"10^4 points each, worst err/tol: {summary}; {dt:.2f} s" + (f" {bad}" if bad else ""))


def test_c5_bound_suite():
    spec = [
        ("regions.disk_bounds", {"n_points": 10_000}),
        ("perturbation.kernel_bounds", {"n_points": 10_000}),
        ("background.chi_bound", {"n_points": 10_000}),
        ("background.green_bound", {"n_points": 10_000}),
        ("jost.deviation_bound", {"n_points": 10_000}),
    ]
    ok, summary, dt, bad = run_checks(5, spec)
    record(5, ok and dt < 60.0, f"10^4 points each, worst lhs/bound: {summary}; {dt:.2f} s" + (f" {bad}" if bad else ""))


def _rescaled(pert, bg, factor):
    base = Perturbation.zero(bg, pert.support)
    return Perturbation.from_deviations(bg, (pert.a - base.a) * factor, (pert.b - base.b) * factor, (pert.c - base.c) * factor)


def _cells_in_region(borg, params, total0, grid, cell):
    """Grid cells (slightly shrunk, off-centre) whose 9x9 samples all satisfy the criterion."""
    out = []
    for x0 in np.arange(grid.re_min, grid.re_max, cell):
        for y0 in np.arange(grid.im_min, grid.im_max, cell):
            r = Rect(x0 + 0.013, x0 + cell - 0.011, y0 + 0.017, y0 + cell - 0.007)
            xs, ys = np.linspace(r.re_min, r.re_max, 9), np.linspace(r.im_min, r.im_max, 9)
            pts = (xs[None, :] + 1j * ys[:, None]).ravel()
            lhs = criterion_lhs(borg, params, total0, pts)
            if np.all(lhs < params.t) and borg.dist_to_continuous_spectrum(pts).min() > 1e-3:
                out.append(r)
    return out


@pytest.mark.slow
def test_c6_region_free_of_eigenvalues():
    rng = np.random.default_rng(6)
    grid, cell = Rect(-6.0, 6.0, -4.0, 4.0), 0.5
    xs, ys = np.linspace(grid.re_min, grid.re_max, 121), np.linspace(grid.im_min, grid.im_max, 81)
    lam_grid = (xs[None, :] + 1j * ys[:, None]).ravel()
    t0 = time.perf_counter()
    n_eigs = n_in_G = n_contours = n_nonzero = 0
    for i in range(50):
        borg = REFERENCE[i % 4]
        bg = reconstruct(borg)
        params = constants(borg)
        shape = random_perturbation(bg, int(rng.integers(1, 11)), 1.0, rng)
        # scale so that the region covers a fraction q of the test grid
        q = rng.uniform(0.05, 0.6)
        lhs_unit = criterion_lhs(borg, params, 1.0, lam_grid)
        pert = _rescaled(shape, bg, params.t / np.nanquantile(lhs_unit, q) / moments(shape, bg).total0)
        total0 = moments(pert, bg).total0
        res = truncated_eigs(pert, borg, bg, 200)
        n_eigs += len(res.filtered)
        for z in res.filtered:
            lhs = criterion_lhs(borg, params, total0, z)
            n_in_G += bool(lhs < params.t)
        cells = _cells_in_region(borg, params, total0, grid, cell)
        assert cells, "scaling left the region empty on the test grid"
        for k in rng.choice(len(cells), min(10, len(cells)), replace=False):
            n_contours += 1
            n_nonzero += winding(pert, borg, bg, cells[k], n_samples=64).zeros_inside != 0
    dt = time.perf_counter() - t0
    ok = n_in_G == 0 and n_nonzero == 0 and dt < 300
    record(6, ok, f"50 perturbations: {n_eigs} filtered eigenvalues, {n_in_G} in G; {n_contours} contours in G, {n_nonzero} nonzero windings; {dt:.1f} s")


@pytest.mark.slow
def test_c7_cross_oracle_zero_location():
    rng = np.random.default_rng(7)
    t0 = time.perf_counter()
    worst_fwd = worst_back = 0.0
    n_eigs = 0
    count_mismatch = []
    for i in range(20):
        borg = REFERENCE[i % 4]
        bg = reconstruct(borg)
        while True:
            pert = random_perturbation(bg, int(rng.integers(1, 11)), float(rng.uniform(1.0, 3.0)), rng)
            res = truncated_eigs(pert, borg, bg, 200)
            if len(res.filtered):
                break
        sub, diag, sup = finite_section(pert, bg, pert.support + 2)
        # Gershgorin radius bounds every eigenvalue
        R = float(np.max(np.abs(diag)) + np.max(np.abs(sub)) + np.max(np.abs(sup))) + 0.5
        search = locate_zeros(pert, borg, bg, Rect(-R, R + 0.1, -R, R + 0.3), res.delta)
        zeros = np.array(search.zeros, dtype=complex)
        zeros = zeros[borg.dist_to_continuous_spectrum(zeros) > res.delta]
        n_eigs += len(res.filtered)
        if len(zeros) != len(res.filtered):
            count_mismatch.append(i)
            continue
        for z in res.filtered:
            worst_fwd = max(worst_fwd, float(np.min(np.abs(zeros - z))))
        for z in zeros:
            worst_back = max(worst_back, float(np.min(np.abs(res.filtered - z))))
    dt = time.perf_counter() - t0
    ok = not count_mismatch and worst_fwd < 1e-6 and worst_back < 1e-6 and dt < 300
    record(7, ok, f"20 perturbations, {n_eigs} eigenvalues; oracle->zero {worst_fwd:.1e}, zero->oracle {worst_back:.1e}; count mismatches {count_mismatch}; {dt:.1f} s")


def test_c8_first_moment_emptiness():
    rng = np.random.default_rng(8)
    t0 = time.perf_counter()
    nonempty = []
    worst_ratio = 0.0
    for i in range(20):
        borg = REFERENCE[0] if i % 2 == 0 else REFERENCE[2]
        bg = reconstruct(borg)
        params = constants(borg)
        shape = random_perturbation(bg, int(rng.integers(1, 11)), 1.0, rng)
        # as large as the criterion allows
        limit = params.t / first_moment_lhs(borg, params, 1.0)
        pert = _rescaled(shape, bg, rng.uniform(0.5, 0.99) * limit / moments(shape, bg).total1)
        total1 = moments(pert, bg).total1
        assert criterion_first_moment_empty(borg, params, total1)
        worst_ratio = max(worst_ratio, first_moment_lhs(borg, params, total1) / params.t)
        res = truncated_eigs(pert, borg, bg, 200)
        if len(res.filtered):
            nonempty.append((i, res.filtered.tolist()))
    dt = time.perf_counter() - t0
    record(8, not nonempty and dt < 120, f"20 perturbations up to {worst_ratio:.2f} of the threshold; non-empty: {nonempty or 'none'}; {dt:.1f} s")


def test_c9_solver_equivalence():
    ok, summary, dt, bad = run_checks(9, [("jost.solver_agreement", {"n_pairs": 1000})])
    record(9, ok and dt < 30.0, f"10^3 pairs, worst err/tol {summary}; {dt:.2f} s" + (f" {bad}" if bad else ""))


if __name__ == "__main__":
    import sys

    sys.exit(pytest.main([__file__, "-v"]))

"""
Randomised invariant suite.

Every check draws its own backgrounds, perturbations and sample points
from a child of one seed, so the report is reproducible and independent
of the order (or thread) in which checks run. A check reports the worst
ratio ``error / tolerance`` it saw; it passes when that ratio is at most 1.
"""

from __future__ import annotations

import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .background import (
    BorgData,
    chi,
    floquet_rho,
    floquet_w,
    fundamental_polys,
    green,
    green_polynomial,
    green_scaled,
    hill_u,
    hill_u_entries,
    psi1_floquet_form,
    reconstruct,
    weyl_functions,
)
from .errors import ContourError, ConvergenceError
from .jost import jost_table, jost_values, regularized_jost_values, solve_backsub, solve_series
from .perturbation import Perturbation, kernel_A, kernel_tilde_matrix, moments
from .regions import (
    constants,
    criterion_lhs,
    jost_kernel_factor,
    k2_closed_form,
    k2_constant,
    disk_f,
    disk_f_lower_bound,
    disk_g,
    disk_g_lower_bound,
    omega_constant,
)
from .verify import Circle, random_perturbation, truncated_eigs, winding

__all__ = ["CheckResult", "SuiteReport", "CHECKS", "run_check", "run_invariant_suite", "random_borg", "sample_lambdas"]

EDGE_MARGIN = 1e-3


@dataclass
class CheckResult:
    id: str
    status: str
    worst: float
    n_points: int
    seconds: float = 0.0
    counterexample: dict | None = None

    @property
    def passed(self):
        return self.status == "pass"

    def to_dict(self, timing=False):
        out = {
            "id": self.id,
            "status": self.status,
            "worst": self.worst,
            "n_points": self.n_points,
            "counterexample": self.counterexample,
        }
        if timing:
            out["seconds"] = self.seconds
        return out


@dataclass
class SuiteReport:
    seed: int
    n_cases: int
    results: list = field(default_factory=list)

    @property
    def passed(self):
        return all(r.passed for r in self.results)

    @property
    def failures(self):
        return [r for r in self.results if not r.passed]

    def to_dict(self, timing=False):
        """JSON-ready report; timings are left out unless asked for, so output is reproducible."""
        return {
            "seed": self.seed,
            "n_cases": self.n_cases,
            "passed": self.passed,
            "results": [r.to_dict(timing) for r in self.results],
        }


class _Tracker:
    """Keeps the worst ``err / tol`` ratio and the inputs that produced it."""

    def __init__(self):
        self.worst = 0.0
        self.n = 0
        self.example = None

    def update(self, ratio, context, n=None):
        ratio = np.atleast_1d(np.asarray(ratio, dtype=float))
        self.n += ratio.size if n is None else n
        if ratio.size == 0:
            return
        bad = ~np.isfinite(ratio)
        k = int(np.argmax(bad)) if bad.any() else int(np.argmax(ratio))
        r = math.inf if bad.any() else float(ratio[k])
        if r > self.worst or (self.example is None and r > 1.0):
            self.worst = r
            self.example = context(k) if callable(context) else dict(context)


def _borg_dict(borg):
    return {"s": borg.s, "d": borg.d, "nu": borg.nu, "eps": borg.eps}


def _c(z):
    z = complex(z)
    return [z.real, z.imag]


def random_borg(rng, d_range=(0.5, 20.0)) -> BorgData:
    """Random admissible Borg data with ``s/d`` and ``|nu|/s`` kept off the degenerate ends."""
    d = float(math.exp(rng.uniform(math.log(d_range[0]), math.log(d_range[1]))))
    s = d * float(rng.uniform(0.05, 0.95))
    nu = s * float(rng.uniform(-0.95, 0.95))
    return BorgData(s=s, d=d, nu=nu, eps=int(rng.choice([-1, 1])))


def _keep(borg, lam, margin):
    ok = borg.dist_to_band_edges(lam) > margin
    if borg.eps == 1:
        ok &= np.abs(lam - borg.nu) > margin
    return lam[ok]


def sample_lambdas(borg: BorgData, n: int, rng, radius=None, margin=EDGE_MARGIN, far_fraction=0.0):
    """About ``n`` points in ``|lam| <= radius`` (default ``2d``), minus the margins.

    A ``far_fraction`` of the points is drawn with log-uniform modulus up
    to ``100 d`` instead.
    """
    radius = 2.0 * borg.d if radius is None else radius
    n_far = int(round(far_fraction * n))
    r = radius * np.sqrt(rng.uniform(0.0, 1.0, n - n_far))
    if n_far:
        r = np.concatenate((r, np.exp(rng.uniform(math.log(radius), math.log(100.0 * borg.d), n_far))))
    lam = r * np.exp(1j * rng.uniform(0.0, 2.0 * math.pi, r.size))
    return _keep(borg, lam, margin)


def _rel(a, b, floor=1.0):
    a, b = np.asarray(a), np.asarray(b)
    return np.abs(a - b) / np.maximum(np.maximum(np.abs(a), np.abs(b)), floor)


def _split_points(n_points, n_bg):
    return max(1, n_points // n_bg)


# ---------------------------------------------------------------- background


def check_hill_roundtrip(rng, n_points=10_000, n_bg=20):
    tr = _Tracker()
    for _ in range(n_bg):
        borg = random_borg(rng)
        bg = reconstruct(borg)
        lam = sample_lambdas(borg, _split_points(n_points, n_bg), rng, far_fraction=0.2)
        u1, u2 = hill_u(borg, lam), hill_u_entries(bg, lam)
        tr.update(_rel(u1, u2, 1e-300) / 1e-12, lambda k: {"borg": _borg_dict(borg), "lam": _c(lam[k])})
    return tr


def check_band_edges(rng, n_bg=100):
    """Roots of ``u^2 = 1`` from the entries, entry bounds (d-s)/2 <= a <= (d+s)/2 and the ``eps`` ordering."""
    tr = _Tracker()
    for _ in range(n_bg):
        borg = random_borg(rng)
        bg = reconstruct(borg)
        x = np.array([-1.0, 0.0, 1.0])
        coef = np.polyfit(x, np.real(hill_u_entries(bg, x)), 2)
        roots = np.sort(np.concatenate((np.roots(coef - [0, 0, 1]), np.roots(coef + [0, 0, 1]))).real)
        expect = np.sort([-borg.d, -borg.s, borg.s, borg.d])
        err = np.max(np.abs(roots - expect)) / (1e-10 * max(1.0, borg.d))
        lo, hi = 0.5 * (borg.d - borg.s), 0.5 * (borg.d + borg.s)
        inside = all(lo <= a <= hi for a in (bg.a1, bg.a2))
        ordered = (bg.a1 < bg.a2) if borg.eps == 1 else (bg.a1 > bg.a2)
        prod = abs(bg.a1 * bg.a2 - 0.25 * (borg.d**2 - borg.s**2)) / (0.25 * (borg.d**2 - borg.s**2)) / 1e-12
        ratio = max(err, prod) if (inside and ordered) else math.inf
        tr.update(ratio, {"borg": _borg_dict(borg), "background": bg.as_dict(), "roots": roots.tolist()})
    return tr


def check_floquet(rng, n_points=10_000, n_bg=20):
    """``|rho| <= 1``, the quadratic, ``w^2 = rho``, ``u = (w^2 + w^-2)/2`` and ``|w| = 1`` on the bands."""
    tr = _Tracker()
    for _ in range(n_bg):
        borg = random_borg(rng)
        lam = sample_lambdas(borg, _split_points(n_points, n_bg), rng, far_fraction=0.2)
        u = np.asarray(hill_u(borg, lam))
        w = np.asarray(floquet_w(borg, lam))
        rho = np.asarray(floquet_rho(borg, lam))
        quad = np.abs(rho * rho - 2 * u * rho + 1) / np.maximum(1.0, np.abs(2 * u * rho))
        ratios = np.maximum.reduce([
            np.where(np.abs(rho) <= 1 + 1e-12, 0.0, np.inf),
            quad / 1e-12,
            np.abs(w * w - rho) / 1e-12,
            _rel(u, 0.5 * (w * w + 1 / (w * w))) / 1e-12,
            np.where(np.abs(w) < 1, 0.0, np.inf),
        ])
        tr.update(ratios, lambda k: {"borg": _borg_dict(borg), "lam": _c(lam[k]), "w": _c(w[k])})
        band = rng.uniform(borg.s, borg.d, 64) * rng.choice([-1.0, 1.0], 64)
        wb = np.asarray(floquet_w(borg, band))
        tr.update(np.abs(np.abs(wb) - 1) / 1e-12, lambda k: {"borg": _borg_dict(borg), "lam": band[k]})
    return tr


def check_wronskian(rng, n_points=10_000, n_bg=20):
    tr = _Tracker()
    for _ in range(n_bg):
        borg = random_borg(rng)
        bg = reconstruct(borg)
        for lam in sample_lambdas(borg, _split_points(n_points, n_bg), rng, far_fraction=0.2):
            fp = fundamental_polys(bg, lam, 3)
            s, c = fp.s_vals, fp.c_vals
            scale = max(1.0, abs(s[3] * c[2]), abs(s[2] * c[3]))
            tr.update(abs(fp.wronskian() - 1) / scale / 1e-10, {"borg": _borg_dict(borg), "lam": _c(lam)})
    return tr


def check_weyl_product(rng, n_points=10_000, n_bg=20):
    tr = _Tracker()
    for _ in range(n_bg):
        borg = random_borg(rng)
        bg = reconstruct(borg)
        lam = sample_lambdas(borg, _split_points(n_points, n_bg), rng, far_fraction=0.2)
        lam = lam[np.abs(lam - borg.nu) > EDGE_MARGIN]
        m, mh = weyl_functions(borg, bg, lam)
        expect = (lam + borg.nu) / (lam - borg.nu)
        tr.update(_rel(m * mh, expect, 1e-300) / 1e-10, lambda k: {"borg": _borg_dict(borg), "lam": _c(lam[k])})
    return tr


def check_psi1_floquet(rng, n_points=10_000, n_bg=20):
    """``psi_1 = m`` against its closed form through ``w``."""
    tr = _Tracker()
    for _ in range(n_bg):
        borg = random_borg(rng)
        bg = reconstruct(borg)
        lam = sample_lambdas(borg, _split_points(n_points, n_bg), rng, far_fraction=0.2)
        lam = lam[np.abs(lam - borg.nu) > EDGE_MARGIN]
        m, _ = weyl_functions(borg, bg, lam)
        tr.update(_rel(m, psi1_floquet_form(borg, bg, lam), 1e-300) / 1e-10, lambda k: {"borg": _borg_dict(borg), "lam": _c(lam[k])})
    return tr


def _psi_table(borg, bg, lam, n_max):
    m, _ = weyl_functions(borg, bg, lam)
    rho = np.asarray(floquet_rho(borg, lam))
    out = np.empty((n_max + 1,) + lam.shape, dtype=complex)
    for n in range(n_max + 1):
        out[n] = (1.0 if n % 2 == 0 else m) * rho ** (n // 2)
    return out


def check_conjugate_symmetry(rng, n_points=10_000, n_bg=20, n_max=6):
    tr = _Tracker()
    for _ in range(n_bg):
        borg = random_borg(rng)
        bg = reconstruct(borg)
        lam = sample_lambdas(borg, _split_points(n_points, n_bg), rng, far_fraction=0.2)
        lam = lam[np.abs(lam.imag) > 1e-8]
        p1 = _psi_table(borg, bg, lam, n_max)
        p2 = _psi_table(borg, bg, np.conj(lam), n_max)
        ratio = np.max(_rel(p2, np.conj(p1), 1e-300), axis=0) / 1e-10
        tr.update(ratio, lambda k: {"borg": _borg_dict(borg), "lam": _c(lam[k])})
    return tr


def check_psi_recurrence(rng, n_points=10_000, n_bg=20, n_max=7):
    tr = _Tracker()
    for _ in range(n_bg):
        borg = random_borg(rng)
        bg = reconstruct(borg)
        lam = sample_lambdas(borg, _split_points(n_points, n_bg), rng, far_fraction=0.2)
        lam = lam[np.abs(lam - borg.nu) > EDGE_MARGIN]
        p = _psi_table(borg, bg, lam, n_max)
        worst = np.zeros(lam.shape)
        for n in range(1, n_max):
            t1, t2, t3 = bg.a(n - 1) * p[n - 1], (bg.b(n) - lam) * p[n], bg.a(n) * p[n + 1]
            scale = np.maximum.reduce([np.ones(lam.shape), np.abs(p[n - 1]), np.abs(p[n]), np.abs(p[n + 1])])
            scale = scale * max(1.0, bg.a1, bg.a2, abs(bg.b1)) * np.maximum(1.0, np.abs(lam))
            worst = np.maximum(worst, np.abs(t1 + t2 + t3) / scale)
        tr.update(worst / 1e-10, lambda k: {"borg": _borg_dict(borg), "lam": _c(lam[k])})
    return tr


def check_green_delta(rng, n_points=10_000, n_bg=20, n_max=6):
    """Green function solves the inhomogeneous recurrence with a Kronecker delta."""
    tr = _Tracker()
    for _ in range(n_bg):
        borg = random_borg(rng)
        bg = reconstruct(borg)
        lam = sample_lambdas(borg, _split_points(n_points, n_bg), rng, far_fraction=0.2)
        worst = np.zeros(lam.shape)
        for m in range(n_max + 1):
            G = [np.asarray(green(borg, bg, lam, n, m)) for n in range(m + 2)]
            for n in range(1, m + 1):
                t1, t2, t3 = bg.a(n - 1) * G[n - 1], (bg.b(n) - lam) * G[n], bg.a(n) * G[n + 1]
                scale = np.maximum.reduce([np.ones(lam.shape), np.abs(t1), np.abs(t2), np.abs(t3)])
                worst = np.maximum(worst, np.abs(t1 + t2 + t3 - (1.0 if n == m else 0.0)) / scale)
        tr.update(worst / 1e-10, lambda k: {"borg": _borg_dict(borg), "lam": _c(lam[k])})
    return tr


def check_green_polynomial(rng, n_points=2_000, n_bg=20, n_max=6):
    """Regularised Green function against the polynomial formula."""
    tr = _Tracker()
    for _ in range(n_bg):
        borg = random_borg(rng)
        bg = reconstruct(borg)
        for lam in sample_lambdas(borg, _split_points(n_points, n_bg), rng):
            fp = fundamental_polys(bg, lam, n_max)
            s, c = fp.s_vals, fp.c_vals
            worst = 0.0
            for n in range(n_max):
                for m in range(n + 1, n_max + 1):
                    g = complex(green(borg, bg, lam, n, m))
                    gp = green_polynomial(bg, lam, n, m)
                    scale = max(abs(c[n] * s[m]), abs(s[n] * c[m])) / bg.a2
                    worst = max(worst, abs(g - gp) / max(scale, abs(g), 1e-300))
            tr.update(worst / 1e-10, {"borg": _borg_dict(borg), "lam": _c(lam)})
    return tr


# -------------------------------------------------------------------- bounds


def check_chi_bound(rng, n_points=10_000, n_bg=20):
    tr = _Tracker()
    for _ in range(n_bg):
        borg = random_borg(rng)
        bg = reconstruct(borg)
        p = constants(borg)
        lam = sample_lambdas(borg, _split_points(n_points, n_bg), rng)
        lam = lam[np.abs(lam - borg.nu) > EDGE_MARGIN]
        w = np.asarray(floquet_w(borg, lam))
        s, d = borg.s, borg.d
        bound = 4 * math.sqrt(2) * d * d / ((d - s) * math.sqrt(d * d - s * s))
        lhs = np.abs(chi(borg, bg, lam, 1)) * np.abs(w * w - p.w2eps_nu)
        tr.update(lhs / bound, lambda k: {"borg": _borg_dict(borg), "lam": _c(lam[k]), "lhs": float(lhs[k]), "bound": bound})
    return tr


def check_green_bound(rng, n_points=10_000, n_bg=20, n_max=8):
    tr = _Tracker()
    for _ in range(n_bg):
        borg = random_borg(rng)
        bg = reconstruct(borg)
        K1 = constants(borg).K1
        lam = sample_lambdas(borg, _split_points(n_points, n_bg), rng)
        w = np.asarray(floquet_w(borg, lam))
        fac = np.abs(1 - w**4) / np.abs(w)
        worst = np.zeros(lam.shape)
        for n in range(n_max + 1):
            for m in range(n + 1, n_max + 1):
                worst = np.maximum(worst, np.abs(green_scaled(borg, bg, lam, n, m)) * fac / K1)
        tr.update(worst, lambda k: {"borg": _borg_dict(borg), "lam": _c(lam[k])})
    return tr


def _random_case(rng, max_support=10, log_scale=(-4.0, 0.0)):
    borg = random_borg(rng)
    bg = reconstruct(borg)
    M = int(rng.integers(1, max_support + 1))
    pert = random_perturbation(bg, M, 10 ** rng.uniform(*log_scale), rng)
    return borg, bg, pert


def _case_dict(borg, pert):
    return {"borg": _borg_dict(borg), "perturbation": {k: ([_c(z) for z in v] if isinstance(v, list) else v) for k, v in pert.to_dict().items()}}


def check_kernel_bounds(rng, n_points=10_000, n_cases=20):
    """Zero-moment and first-moment bounds on the scaled kernel."""
    tr = _Tracker()
    for _ in range(n_cases):
        borg, bg, pert = _random_case(rng)
        K1 = constants(borg).K1
        dm = np.concatenate(([0.0], moments(pert, bg).d_seq))
        lam = sample_lambdas(borg, _split_points(n_points, n_cases), rng)
        w = np.abs(np.asarray(floquet_w(borg, lam)))
        edge = np.abs(1 - np.asarray(floquet_w(borg, lam)) ** 4)
        At = np.abs(kernel_tilde_matrix(pert, borg, bg, lam))
        worst = np.zeros(lam.shape)
        for n in range(pert.support + 1):
            for m in range(n + 1, pert.support + 2):
                if dm[m] == 0:
                    worst = np.maximum(worst, np.where(At[n, m] == 0, 0.0, np.inf))
                    continue
                zero_mom = At[n, m] * edge / (w * K1 * dm[m])
                first_mom = At[n, m] / (K1 * (m - n) * dm[m] * w)
                worst = np.maximum(worst, np.maximum(zero_mom, first_mom))
        tr.update(worst, lambda k: dict(_case_dict(borg, pert), lam=_c(lam[k])))
    return tr


def check_kernel_first_entry(rng, n_cases=50):
    """``A(lam; n-1, n) = (b_n^0 - b_n) / a_{n-1}^0``, and ``A = 0`` below the diagonal."""
    tr = _Tracker()
    for _ in range(n_cases):
        borg, bg, pert = _random_case(rng, log_scale=(-2.0, 0.5))
        lam = sample_lambdas(borg, 8, rng)
        db = pert.delta_b(bg)
        for n in range(1, pert.support + 1):
            a = np.asarray(kernel_A(pert, borg, bg, lam, n - 1, n))
            expect = db[n] / bg.a(n - 1)
            below = np.asarray(kernel_A(pert, borg, bg, lam, n, n - 1))
            ratio = np.maximum(_rel(a, expect, 1.0) / 1e-12, np.where(below == 0, 0.0, np.inf))
            tr.update(ratio, lambda k: dict(_case_dict(borg, pert), lam=_c(lam[k]), n=n))
    return tr


def check_disk_bounds(rng, n_points=10_000, n_bg=20):
    """Lower bounds for ``|f|`` and ``|g|`` on ``|z| <= 0.999``."""
    tr = _Tracker()
    for _ in range(n_bg):
        borg = random_borg(rng)
        k = _split_points(n_points, n_bg)
        z = 0.999 * np.sqrt(rng.uniform(0, 1, k)) * np.exp(1j * rng.uniform(0, 2 * math.pi, k))
        z[:4] = [0.999, -0.999, 0.999j, -0.999j]
        rf = disk_f_lower_bound(borg) / np.abs(disk_f(z, borg))
        rg = disk_g_lower_bound(borg) / np.abs(disk_g(z, borg))
        tr.update(np.maximum(rf, rg), lambda i: {"borg": _borg_dict(borg), "z": _c(z[i])})
    return tr


def check_constants(rng, n_bg=100):
    """``K2`` closed form, ``t e^t = 1`` and ``|tau(nu, eps)| <= |tau| < 1``."""
    tr = _Tracker()
    t = omega_constant()
    tr.update(abs(t * math.exp(t) - 1) / 1e-14, {"t": t})
    for _ in range(n_bg):
        d = float(rng.uniform(1e-3, 100.0))
        s = float(rng.uniform(0.0, d))
        if not 0 < s < d:
            continue
        k2a, k2b = k2_constant(s, d), k2_closed_form(s, d)
        tr.update(abs(k2a - k2b) / abs(k2b) / 1e-12, {"s": s, "d": d, "K2": k2a, "K2_closed": k2b})
        borg = BorgData(s=s, d=d, nu=s * float(rng.uniform(-0.999, 0.999)), eps=int(rng.choice([-1, 1])))
        p = constants(borg)
        ok = abs(p.tau_nu_eps) <= abs(p.tau) * (1 + 1e-14) and abs(p.tau) < 1
        tr.update(0.0 if ok else math.inf, {"borg": _borg_dict(borg), "tau_nu_eps": p.tau_nu_eps, "tau": p.tau})
    return tr


def check_criterion_linear(rng, n_points=2_000, n_bg=20):
    """Halving the zero moment halves the region criterion exactly."""
    tr = _Tracker()
    for _ in range(n_bg):
        borg = random_borg(rng)
        p = constants(borg)
        lam = sample_lambdas(borg, _split_points(n_points, n_bg), rng)
        total0 = float(10 ** rng.uniform(-6, 0))
        a = np.asarray(criterion_lhs(borg, p, total0, lam))
        b = np.asarray(criterion_lhs(borg, p, 0.5 * total0, lam))
        tr.update(np.where(b == 0.5 * a, 0.0, np.inf), lambda k: {"borg": _borg_dict(borg), "lam": _c(lam[k]), "total0": total0})
    return tr


def check_moments(rng, n_cases=100):
    """``kappa0`` and ``kappa1`` non-increasing and zero beyond the support."""
    tr = _Tracker()
    for _ in range(n_cases):
        borg, bg, pert = _random_case(rng, log_scale=(-3.0, 0.5))
        mo = moments(pert, bg)
        M = pert.support
        k0 = [mo.kappa0(n) for n in range(M + 4)]
        k1 = [mo.kappa1(n) for n in range(M + 4)]
        ok = all(x >= y for x, y in zip(k0, k0[1:])) and all(x >= y for x, y in zip(k1, k1[1:]))
        ok = ok and all(x == 0 for x in k0[M + 1 :] + k1[M + 1 :]) and np.all(mo.d_seq >= 0)
        tr.update(0.0 if ok else math.inf, _case_dict(borg, pert))
    return tr


# ---------------------------------------------------------------------- jost


def _contraction_case(rng, lam_count=1):
    """Perturbation rescaled so that ``K kappa0(0) / |1 - w^4| < 1`` at the sampled points."""
    borg = random_borg(rng, d_range=(0.5, 10.0))
    bg = reconstruct(borg)
    p = constants(borg)
    M = int(rng.integers(1, 11))
    lam = sample_lambdas(borg, 4 * lam_count, rng, margin=1e-2, far_fraction=0.2)[:lam_count]
    shape = rng.standard_normal((2, M)) + 1j * rng.standard_normal((2, M))
    unit = Perturbation.from_deviations(bg, da=shape[0], db=shape[1])
    x1 = moments(unit, bg).total0
    K, edge = jost_kernel_factor(borg, p, lam)
    x_unit = float(np.max(np.asarray(K) * x1 / np.asarray(edge)))
    target = float(rng.uniform(0.01, 0.9))
    scale = target / x_unit
    pert = Perturbation.from_deviations(bg, da=scale * shape[0], db=scale * shape[1])
    return borg, bg, pert, lam


def check_solver_agreement(rng, n_pairs=1_000):
    tr = _Tracker()
    for _ in range(n_pairs):
        borg, bg, pert, lam = _contraction_case(rng)
        lam = complex(lam[0])
        a = solve_backsub(pert, borg, bg, lam)
        try:
            b = solve_series(pert, borg, bg, lam)
        except ConvergenceError:
            tr.update(math.inf, dict(_case_dict(borg, pert), lam=_c(lam), reason="series did not converge"))
            continue
        err = np.max(np.abs(a.v - b.v) / np.maximum(1.0, np.abs(a.v)))
        tr.update(err / 1e-9, dict(_case_dict(borg, pert), lam=_c(lam)))
    return tr


def check_series_majorant(rng, n_cases=200):
    """Each series term obeys the factorial majorant ``x^j / (j-1)!``."""
    tr = _Tracker()
    for _ in range(n_cases):
        borg, bg, pert, lam = _contraction_case(rng)
        lam = lam[:1]
        p = constants(borg)
        At = kernel_tilde_matrix(pert, borg, bg, lam)[..., 0]
        vt, chi_tab, _ = jost_table(pert, borg, bg, lam)
        chi_tab = chi_tab[:, 0]
        K, edge = jost_kernel_factor(borg, p, lam)
        mo = moments(pert, bg)
        x = np.array([float(K[0]) * mo.kappa0(n) / float(edge[0]) for n in range(len(chi_tab))])
        term = At @ chi_tab
        worst = 0.0
        for j in range(1, 40):
            with np.errstate(divide="ignore", invalid="ignore"):
                bound = x**j / math.factorial(j - 1)
                r = np.where(np.abs(term) <= 1e-300, 0.0, np.abs(term) / bound)
            worst = max(worst, float(np.max(r)))
            term = At @ term
        tr.update(worst, dict(_case_dict(borg, pert), lam=_c(lam[0])))
    return tr


def check_jost_equation(rng, n_cases=200):
    """Recurrence residual of the Jost solution and ``v_n = psi_n`` beyond the support."""
    tr = _Tracker()
    for _ in range(n_cases):
        borg, bg, pert = _random_case(rng, log_scale=(-3.0, 0.5))
        lam = complex(sample_lambdas(borg, 4, rng, margin=1e-2, far_fraction=0.2)[0])
        sol = solve_backsub(pert, borg, bg, lam)
        M = pert.support
        psi = _psi_table(borg, bg, np.asarray(lam), M + 2)
        tail = np.max(np.abs(sol.v[M + 1 :] - psi[M + 1 :]) / np.maximum(1.0, np.abs(psi[M + 1 :])))
        tr.update(max(sol.recurrence_residual / 1e-9, tail / 1e-12), dict(_case_dict(borg, pert), lam=_c(lam)))
    return tr


def check_deviation_bound(rng, n_points=10_000, n_cases=20):
    """``|v_n - psi_n| <= x |w|^n e^x`` with ``x = K kappa0(n) / |1 - w^4|``, ``n <= M``."""
    tr = _Tracker()
    for _ in range(n_cases):
        borg, bg, pert = _random_case(rng)
        p = constants(borg)
        mo = moments(pert, bg)
        lam = sample_lambdas(borg, _split_points(n_points, n_cases), rng)
        vt, chi_tab, w = jost_table(pert, borg, bg, lam)
        K, edge = jost_kernel_factor(borg, p, lam)
        aw = np.abs(w)
        worst = np.zeros(lam.shape)
        for n in range(pert.support + 1):
            x = K * mo.kappa0(n) / edge
            with np.errstate(over="ignore", divide="ignore", invalid="ignore"):
                dev = np.abs(vt[n] - chi_tab[n]) * aw**n
                bound = x * aw**n * np.exp(np.minimum(x, 700.0))
                r = np.where(dev == 0, 0.0, dev / bound)
            worst = np.maximum(worst, np.nan_to_num(r, nan=np.inf))
        tr.update(worst, lambda k: dict(_case_dict(borg, pert), lam=_c(lam[k])))
    return tr


def check_jost_far_field(rng, n_cases=100):
    """``v_0`` tends to 1 far out: ``|v_0 - 1| < 1e-6`` at ``|lam| = 100 d``.

    ``v_0 - 1`` decays only like ``total0 / |lam|``, so the entries deviate
    by at most ``1e-5 d`` here.
    """
    tr = _Tracker()
    for _ in range(n_cases):
        borg = random_borg(rng)
        bg = reconstruct(borg)
        pert = random_perturbation(bg, int(rng.integers(1, 11)), 10 ** rng.uniform(-8, -5) * borg.d, rng)
        lam = 100.0 * borg.d * np.exp(1j * rng.uniform(0, 2 * math.pi, 8))
        v0 = jost_values(pert, borg, bg, lam)
        tr.update(np.abs(v0 - 1) / 1e-6, lambda k: dict(_case_dict(borg, pert), lam=_c(lam[k])))
    return tr


def check_jost_analytic(rng, n_cases=50, n_nodes=64):
    """Mean of ``v_0`` over a small circle equals its centre value."""
    tr = _Tracker()
    for _ in range(n_cases):
        borg, bg, pert = _random_case(rng, log_scale=(-3.0, 0.0))
        p = 1j * rng.uniform(0.2, 1.0) * borg.d + rng.uniform(-2, 2) * borg.d
        r = 0.1 * min(abs(p.imag), borg.d)
        nodes = p + r * np.exp(2j * math.pi * np.arange(n_nodes) / n_nodes)
        vals = jost_values(pert, borg, bg, nodes)
        centre = complex(jost_values(pert, borg, bg, p))
        err = abs(np.mean(vals) - centre) / max(1.0, abs(centre))
        tr.update(err / 1e-8, dict(_case_dict(borg, pert), centre=_c(p), radius=r))
    return tr


# -------------------------------------------------------------------- oracles


def _oracle_backgrounds():
    return [BorgData(1.0, 3.0, nu, eps) for nu in (0.0, 0.5) for eps in (-1, 1)]


def check_oracle_agreement(rng, n_cases=8, truncation=200):
    """Stable filtered eigenvalues are zeros of ``v_0``, each enclosed by a winding count >= 1."""
    tr = _Tracker()
    bgs = _oracle_backgrounds()
    for i in range(n_cases):
        borg = bgs[i % len(bgs)]
        bg = reconstruct(borg)
        pert = random_perturbation(bg, int(rng.integers(1, 11)), float(rng.uniform(1.0, 3.0)), rng)
        res = truncated_eigs(pert, borg, bg, truncation)
        for z in res.filtered:
            f = abs(complex(regularized_jost_values(pert, borg, bg, z)))
            if borg.eps == 1:
                f /= max(abs(z - borg.nu), 1e-300)
            ratio = f / (1e-6 * (1 + abs(z)))
            try:
                count = winding(pert, borg, bg, Circle(complex(z), 1e-3)).zeros_inside
            except ContourError:
                count = -1
            if count < 1:
                ratio = math.inf
            tr.update(ratio, dict(_case_dict(borg, pert), eigenvalue=_c(z), winding=count))
        tr.n += 1
    return tr


def check_enclosure(rng, n_cases=10, truncation=200, nx=41, ny=41):
    """No filtered eigenvalue lies in the region, and no zero is counted inside it.

    Perturbation sizes span the range where the region is non-empty on
    the test rectangle and some eigenvalues are still produced.
    """
    tr = _Tracker()
    bgs = _oracle_backgrounds()
    for i in range(n_cases):
        borg = bgs[i % len(bgs)]
        bg = reconstruct(borg)
        params = constants(borg)
        pert = random_perturbation(bg, int(rng.integers(1, 11)), float(10 ** rng.uniform(-5, 0.5)), rng)
        total0 = moments(pert, bg).total0
        res = truncated_eigs(pert, borg, bg, truncation)
        for z in res.filtered:
            lhs = float(criterion_lhs(borg, params, total0, z))
            ok = math.isnan(lhs) or lhs >= params.t
            tr.update(0.0 if ok else math.inf, dict(_case_dict(borg, pert), eigenvalue=_c(z), lhs=lhs))
        tr.n += 1
    return tr


CHECKS = {
    "background.hill_roundtrip": (check_hill_roundtrip, {"n_points": 1.0}),
    "background.band_edges": (check_band_edges, {"n_bg": 0.01}),
    "background.floquet": (check_floquet, {"n_points": 1.0}),
    "background.wronskian": (check_wronskian, {"n_points": 0.2}),
    "background.weyl_product": (check_weyl_product, {"n_points": 1.0}),
    "background.psi1_floquet_form": (check_psi1_floquet, {"n_points": 1.0}),
    "background.conjugate_symmetry": (check_conjugate_symmetry, {"n_points": 1.0}),
    "background.psi_recurrence": (check_psi_recurrence, {"n_points": 1.0}),
    "background.green_delta": (check_green_delta, {"n_points": 1.0}),
    "background.green_polynomial": (check_green_polynomial, {"n_points": 0.05}),
    "background.chi_bound": (check_chi_bound, {"n_points": 1.0}),
    "background.green_bound": (check_green_bound, {"n_points": 1.0}),
    "perturbation.kernel_bounds": (check_kernel_bounds, {"n_points": 1.0}),
    "perturbation.kernel_first_entry": (check_kernel_first_entry, {"n_cases": 0.005}),
    "perturbation.moments": (check_moments, {"n_cases": 0.01}),
    "regions.disk_bounds": (check_disk_bounds, {"n_points": 1.0}),
    "regions.constants": (check_constants, {"n_bg": 0.01}),
    "regions.criterion_linear": (check_criterion_linear, {"n_points": 0.2}),
    "jost.solver_agreement": (check_solver_agreement, {"n_pairs": 0.01}),
    "jost.series_majorant": (check_series_majorant, {"n_cases": 0.005}),
    "jost.equation": (check_jost_equation, {"n_cases": 0.005}),
    "jost.deviation_bound": (check_deviation_bound, {"n_points": 1.0}),
    "jost.far_field": (check_jost_far_field, {"n_cases": 0.005}),
    "jost.analyticity": (check_jost_analytic, {"n_cases": 0.005}),
    "verify.oracle_agreement": (check_oracle_agreement, {"n_cases": 0.0004}),
    "verify.enclosure": (check_enclosure, {"n_cases": 0.0004}),
}
"""Check id -> (function, size knobs per unit of ``n_cases * 100``)."""


def run_check(check_id: str, rng, **sizes) -> CheckResult:
    """Run one named check with explicit sample sizes."""
    fn, _ = CHECKS[check_id]
    t0 = time.perf_counter()
    tr = fn(rng, **sizes)
    dt = time.perf_counter() - t0
    status = "pass" if tr.worst <= 1.0 else "fail"
    return CheckResult(
        id=check_id,
        status=status,
        worst=tr.worst,
        n_points=tr.n,
        seconds=dt,
        counterexample=tr.example if status == "fail" else None,
    )


def run_invariant_suite(seed: int = 0, n_cases: int = 100, threads: int = 1, only=None) -> SuiteReport:
    """Run every registered check; sizes scale linearly with ``n_cases``.

    ``n_cases = 100`` gives ``10^4`` sample points for the pointwise
    checks. Each check gets its own child generator, so results do not
    depend on ``threads``.
    """
    ids = [k for k in CHECKS if only is None or any(k.startswith(p) for p in only)]
    children = dict(zip(CHECKS, np.random.SeedSequence(seed).spawn(len(CHECKS))))

    def job(cid):
        _, knobs = CHECKS[cid]
        sizes = {k: max(1, int(round(v * n_cases * 100))) for k, v in knobs.items()}
        return run_check(cid, np.random.default_rng(children[cid]), **sizes)

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(job, ids))
    else:
        results = [job(cid) for cid in ids]
    return SuiteReport(seed=seed, n_cases=n_cases, results=results)

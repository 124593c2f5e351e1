"""
Explicit constants and the discrete-spectrum-free region.

For a perturbation with zero moment ``total0 = sum d_m`` the region is

    G = { lam : K2 |w| / (|w^2 - w^{2eps}(nu)| |1 - w^4|) * total0 < t }

with ``t`` the root of ``x exp(x) = 1``. With first moment
``total1 = sum m d_m`` and ``eps = -1`` the whole plane is free of
discrete spectrum as soon as ``K2 / (1 - |w(nu)|^2) * total1 < t``.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .background import BorgData, _as_complex, floquet_w, w2eps_nu
from .errors import ValidationError

__all__ = [
    "RegionParams",
    "Rect",
    "CriterionValue",
    "RegionSample",
    "RegionReport",
    "omega_constant",
    "k1_constant",
    "k2_constant",
    "k2_closed_form",
    "tau_nu_eps",
    "constants",
    "disk_f",
    "disk_g",
    "disk_f_lower_bound",
    "disk_g_lower_bound",
    "jost_kernel_factor",
    "criterion_lhs",
    "criterion_zero_moment",
    "first_moment_lhs",
    "criterion_first_moment_empty",
    "scan",
]

EXCLUDE_TOL = 1e-12


def omega_constant(x0: float = 0.5, tol: float = 1e-15, max_iter: int = 50) -> float:
    """Positive root of ``x exp(x) = 1`` by Newton's method kept inside ``[0, 1]``."""
    lo, hi = 0.0, 1.0
    x = x0
    for _ in range(max_iter):
        ex = math.exp(x)
        f = x * ex - 1.0
        if f > 0:
            hi = x
        else:
            lo = x
        step = f / (ex * (1.0 + x))
        x_new = x - step
        if not lo < x_new < hi:
            x_new = 0.5 * (lo + hi)
        if abs(x_new - x) <= tol * max(1.0, abs(x)):
            return x_new
        x = x_new
    return x


def k1_constant(s: float, d: float) -> float:
    """Green-kernel constant ``256 d^3 / (d - s)^4``."""
    return 256.0 * d**3 / (d - s) ** 4


def k2_constant(s: float, d: float) -> float:
    """``K1 * 4 sqrt(2) d^2 / ((d - s) sqrt(d^2 - s^2))``."""
    return k1_constant(s, d) * 4.0 * math.sqrt(2.0) * d**2 / ((d - s) * math.sqrt(d * d - s * s))


def k2_closed_form(s: float, d: float) -> float:
    return 1024.0 * math.sqrt(2.0) * d**5 / ((d - s) ** 5 * math.sqrt(d * d - s * s))


def tau_nu_eps(borg: BorgData) -> float:
    s2, d2, nu2 = borg.s**2, borg.d**2, borg.nu**2
    return (borg.eps * math.sqrt((d2 - nu2) * (s2 - nu2)) - nu2) / d2


@dataclass(frozen=True)
class RegionParams:
    K1: float
    K2: float
    t: float
    tau_nu_eps: float
    tau: float
    xi: float
    w2eps_nu: float

    def as_dict(self):
        return dict(self.__dict__)


def constants(borg: BorgData) -> RegionParams:
    s, d = borg.s, borg.d
    return RegionParams(
        K1=k1_constant(s, d),
        K2=k2_constant(s, d),
        t=omega_constant(),
        tau_nu_eps=tau_nu_eps(borg),
        tau=borg.eps * s / d,
        xi=(d * d + s * s) / (2.0 * d * d),
        w2eps_nu=w2eps_nu(borg),
    )


def _disk_root(z, tau):
    # positive on (-1, 1)
    return np.sqrt(1.0 - z) * np.sqrt(1.0 - tau * tau * z)


def disk_f(z, borg: BorgData):
    """``1 + tau(nu, eps) z + sqrt((1 - z)(1 - tau^2 z))`` on the unit disk."""
    z = np.asarray(z, dtype=complex)
    tau = borg.eps * borg.s / borg.d
    return 1.0 + tau_nu_eps(borg) * z + _disk_root(z, tau)


def disk_g(z, borg: BorgData):
    """``1 - xi z + sqrt((1 - z)(1 - tau^2 z))`` on the unit disk."""
    z = np.asarray(z, dtype=complex)
    tau = borg.s / borg.d
    xi = (borg.d**2 + borg.s**2) / (2.0 * borg.d**2)
    return 1.0 - xi * z + _disk_root(z, tau)


def disk_f_lower_bound(borg: BorgData) -> float:
    return (borg.d - borg.s) ** 2 / (4.0 * borg.d**2)


def disk_g_lower_bound(borg: BorgData) -> float:
    return (borg.d**2 - borg.s**2) ** 2 / (4.0 * borg.d**4)


def _factors(borg, params, lam):
    w = np.asarray(floquet_w(borg, lam))
    w2 = w * w
    edge = np.abs(1.0 - w2 * w2)
    pole = np.abs(w2 - params.w2eps_nu)
    return w, edge, pole


def jost_kernel_factor(borg: BorgData, params: RegionParams, lam):
    """``K(lam) = K2 |w| / |w^2 - w^{2eps}(nu)|`` and ``|1 - w^4|`` as a pair."""
    lam = _as_complex(lam)
    w, edge, pole = _factors(borg, params, lam)
    with np.errstate(divide="ignore"):
        K = params.K2 * np.abs(w) / pole
    return K, edge


def criterion_lhs(borg: BorgData, params: RegionParams, total0: float, lam):
    """Vectorised left side of the region inequality; ``nan`` at excluded points.

    Excluded are the band edges (``w^4 = 1``) and the zeros of
    ``w^2 - w^{2eps}(nu)``, i.e. ``lam = +-nu`` when ``eps = +1``.
    """
    lam = _as_complex(lam)
    w, edge, pole = _factors(borg, params, lam)
    excluded = (edge <= EXCLUDE_TOL) | (pole <= EXCLUDE_TOL)
    with np.errstate(divide="ignore", invalid="ignore"):
        lhs = params.K2 * np.abs(w) / (pole * edge) * float(total0)
    lhs = np.where(excluded, np.nan, lhs)
    return lhs if lam.ndim else lhs[()]


@dataclass(frozen=True)
class CriterionValue:
    lhs: float | None
    in_G: bool

    @property
    def excluded(self):
        return self.lhs is None


def criterion_zero_moment(borg: BorgData, params: RegionParams, total0: float, lam) -> CriterionValue:
    if total0 < 0:
        raise ValidationError("total0 must be non-negative")
    lhs = float(criterion_lhs(borg, params, total0, complex(lam)))
    if math.isnan(lhs):
        return CriterionValue(lhs=None, in_G=False)
    return CriterionValue(lhs=lhs, in_G=lhs < params.t)


def first_moment_lhs(borg: BorgData, params: RegionParams, total1: float) -> float:
    if borg.eps != -1:
        raise ValidationError("the first-moment criterion needs a background without eigenvalue (eps = -1)")
    if total1 < 0:
        raise ValidationError("total1 must be non-negative")
    abs_w2_nu = abs(complex(floquet_w(borg, borg.nu))) ** 2
    return params.K2 / (1.0 - abs_w2_nu) * float(total1)


def criterion_first_moment_empty(borg: BorgData, params: RegionParams, total1: float) -> bool:
    """True when the first moment is small enough to rule out any eigenvalue."""
    return first_moment_lhs(borg, params, total1) < params.t


@dataclass(frozen=True)
class Rect:
    re_min: float
    re_max: float
    im_min: float
    im_max: float

    def __post_init__(self):
        if self.re_min > self.re_max or self.im_min > self.im_max:
            raise ValidationError("rectangle corners out of order")

    @property
    def center(self):
        return complex(0.5 * (self.re_min + self.re_max), 0.5 * (self.im_min + self.im_max))

    def contains(self, z):
        z = complex(z)
        return self.re_min < z.real < self.re_max and self.im_min < z.imag < self.im_max

    def as_dict(self):
        return dict(self.__dict__)


@dataclass(frozen=True)
class RegionSample:
    lam: complex
    abs_w: float
    lhs: float | None
    in_G: bool

    @property
    def excluded(self):
        return self.lhs is None


@dataclass(frozen=True)
class RegionReport:
    rect: Rect
    nx: int
    ny: int
    total0: float
    samples: list = field(repr=False)

    @property
    def lam(self):
        return np.array([s.lam for s in self.samples]).reshape(self.ny, self.nx)

    @property
    def in_G(self):
        return np.array([s.in_G for s in self.samples]).reshape(self.ny, self.nx)

    @property
    def lhs(self):
        vals = [np.nan if s.lhs is None else s.lhs for s in self.samples]
        return np.array(vals).reshape(self.ny, self.nx)


def _scan_rows(borg, params, total0, lam_rows):
    w = np.abs(np.asarray(floquet_w(borg, lam_rows)))
    lhs = np.asarray(criterion_lhs(borg, params, total0, lam_rows))
    return w, lhs


def scan(borg: BorgData, params: RegionParams, total0: float, rect: Rect, nx: int, ny: int, threads: int = 1) -> RegionReport:
    """Evaluate the region criterion on an ``ny x nx`` grid (rows = fixed Im)."""
    if nx < 1 or ny < 1:
        raise ValidationError("grid needs at least one point per axis")
    if total0 < 0:
        raise ValidationError("total0 must be non-negative")
    xs = np.linspace(rect.re_min, rect.re_max, nx)
    ys = np.linspace(rect.im_min, rect.im_max, ny)
    grid = xs[None, :] + 1j * ys[:, None]
    if threads > 1 and ny > 1:
        chunks = np.array_split(np.arange(ny), min(threads, ny))
        with ThreadPoolExecutor(max_workers=threads) as pool:
            parts = list(pool.map(lambda idx: _scan_rows(borg, params, total0, grid[idx]), chunks))
        abs_w = np.concatenate([p[0] for p in parts])
        lhs = np.concatenate([p[1] for p in parts])
    else:
        abs_w, lhs = _scan_rows(borg, params, total0, grid)
    samples = []
    for lam, aw, val in zip(grid.ravel(), abs_w.ravel(), lhs.ravel()):
        if math.isnan(val):
            samples.append(RegionSample(lam=complex(lam), abs_w=float(aw), lhs=None, in_G=False))
        else:
            samples.append(RegionSample(lam=complex(lam), abs_w=float(aw), lhs=float(val), in_G=bool(val < params.t)))
    return RegionReport(rect=rect, nx=nx, ny=ny, total0=float(total0), samples=samples)

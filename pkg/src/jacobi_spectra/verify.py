"""
Independent checks on the Jost-function machinery.

Two oracles locate the discrete spectrum without going through the
integral equation's bounds:

- finite sections of the perturbed matrix, filtered for stability under
  doubling and for distance from the continuous spectrum;
- the argument principle applied to the (pole-free) Jost function.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from .background import Background, BorgData
from .errors import ContourError, ConvergenceError, ValidationError
from .jost import regularized_jost_values
from .perturbation import Perturbation
from .regions import Rect

__all__ = [
    "Circle",
    "OracleResult",
    "WindingResult",
    "finite_section",
    "section_eigenvalues",
    "section_size",
    "truncated_eigs",
    "contour_points",
    "contour_clearance",
    "winding",
    "refine_zero",
    "locate_zeros",
    "random_perturbation",
]

CONTOUR_MARGIN = 1e-3


def finite_section(pert: Perturbation, bg: Background, size: int):
    """Diagonals ``(sub, diag, sup)`` of the top-left ``size x size`` block."""
    if size < 1:
        raise ValidationError("section size must be positive")
    diag = np.empty(size, dtype=complex)
    sub = np.empty(size - 1, dtype=complex)
    sup = np.empty(size - 1, dtype=complex)
    for n in range(1, size + 1):
        a_n, b_n, c_n = pert.entries(bg, n)
        diag[n - 1] = b_n
        if n < size:
            sub[n - 1] = a_n
            sup[n - 1] = c_n
    return sub, diag, sup


def section_eigenvalues(pert: Perturbation, bg: Background, size: int) -> np.ndarray:
    """Eigenvalues of a finite section.

    The diagonal similarity that turns ``(a_n, c_n)`` into the common
    off-diagonal ``sqrt(a_n c_n)`` is applied first, so LAPACK sees a
    complex symmetric tridiagonal (hence already Hessenberg) matrix.
    """
    sub, diag, sup = finite_section(pert, bg, size)
    off = np.sqrt(sub * sup)
    mat = np.diag(diag) + np.diag(off, 1) + np.diag(off, -1)
    try:
        vals = scipy.linalg.eigvals(mat, overwrite_a=True, check_finite=False)
    except np.linalg.LinAlgError as exc:
        raise ConvergenceError(f"eigenvalue iteration failed for section size {size}: {exc}") from exc
    return np.sort_complex(vals)


def section_size(borg: BorgData, n: int) -> int:
    """Smallest size ``>= n`` whose cut-off end carries no gap state.

    The far end of an even section behaves like the reversed background,
    which has a gap eigenvalue at ``-nu`` iff ``eps = +1``; odd sections
    have one at ``nu`` iff ``eps = -1``. Picking the other parity keeps
    those spurious states out of the oracle.
    """
    want_even = borg.eps == -1
    return n if (n % 2 == 0) == want_even else n + 1


@dataclass(frozen=True)
class OracleResult:
    truncation: int
    eigenvalues: np.ndarray
    stable: np.ndarray
    filtered: np.ndarray
    delta: float

    def as_dict(self):
        return {
            "truncation": self.truncation,
            "delta": self.delta,
            "eigenvalues": [complex(z) for z in self.eigenvalues],
            "stable": [bool(x) for x in self.stable],
            "filtered": [complex(z) for z in self.filtered],
        }


def truncated_eigs(
    pert: Perturbation,
    borg: BorgData,
    bg: Background,
    truncation: int = 200,
    delta: float | None = None,
    stab_tol: float = 1e-6,
) -> OracleResult:
    """Finite-section oracle for the discrete spectrum.

    Eigenvalues of the section are recomputed at twice the size; those that
    move by less than ``stab_tol`` are *stable*. The filtered list keeps
    stable eigenvalues farther than ``delta`` (default ``0.05 (d - s)``)
    from the continuous spectrum.
    """
    if truncation < pert.support + 20:
        raise ValidationError(f"truncation must be >= M + 20 = {pert.support + 20}")
    delta = 0.05 * (borg.d - borg.s) if delta is None else float(delta)
    n1 = section_size(borg, truncation)
    n2 = section_size(borg, 2 * truncation)
    ev = section_eigenvalues(pert, bg, n1)
    ev2 = section_eigenvalues(pert, bg, n2)
    gaps = np.min(np.abs(ev[:, None] - ev2[None, :]), axis=1)
    stable = gaps < stab_tol
    far = borg.dist_to_continuous_spectrum(ev) > delta
    return OracleResult(truncation=n1, eigenvalues=ev, stable=stable, filtered=ev[stable & far], delta=delta)


@dataclass(frozen=True)
class Circle:
    center: complex
    radius: float

    def __post_init__(self):
        if not self.radius > 0:
            raise ValidationError("circle radius must be positive")

    def contains(self, z):
        return abs(complex(z) - complex(self.center)) < self.radius

    def as_dict(self):
        return {"center": complex(self.center), "radius": self.radius}


def contour_points(contour, t):
    """Positively oriented point at parameter ``t`` in ``[0, 1]``."""
    t = np.asarray(t, dtype=float)
    if isinstance(contour, Circle):
        return complex(contour.center) + contour.radius * np.exp(2j * np.pi * t)
    if isinstance(contour, Rect):
        x0, x1, y0, y1 = contour.re_min, contour.re_max, contour.im_min, contour.im_max
        corners = np.array([complex(x0, y0), complex(x1, y0), complex(x1, y1), complex(x0, y1), complex(x0, y0)])
        s = np.clip(t, 0.0, 1.0) * 4.0
        k = np.minimum(np.floor(s).astype(int), 3)
        frac = s - k
        return corners[k] + frac * (corners[k + 1] - corners[k])
    raise ValidationError(f"unknown contour type {type(contour).__name__}")


def _real_crossings(contour):
    if isinstance(contour, Circle):
        c, r = complex(contour.center), contour.radius
        if abs(c.imag) > r:
            return []
        h = math.sqrt(r * r - c.imag**2)
        return [c.real - h, c.real + h]
    if contour.im_min <= 0.0 <= contour.im_max:
        xs = [contour.re_min, contour.re_max]
        if contour.im_min == 0.0 or contour.im_max == 0.0:
            xs += list(np.linspace(contour.re_min, contour.re_max, 2001))
        return xs
    return []


def contour_clearance(borg: BorgData, contour, n: int = 4096) -> float:
    """Distance from the contour to the continuous spectrum and the Weyl pole."""
    z = contour_points(contour, np.linspace(0.0, 1.0, n, endpoint=False))
    z = np.concatenate([z, np.asarray(_real_crossings(contour), dtype=complex)])
    dist = borg.dist_to_continuous_spectrum(z)
    if borg.eps == 1:
        dist = np.minimum(dist, np.abs(z - borg.nu))
    return float(np.min(dist))


@dataclass(frozen=True)
class WindingResult:
    contour: object
    zeros_inside: int
    min_modulus_on_contour: float
    winding_raw: float
    n_evaluations: int


def winding(
    pert: Perturbation,
    borg: BorgData,
    bg: Background,
    contour,
    n_samples: int = 128,
    max_refine: int = 40,
    margin: float = CONTOUR_MARGIN,
) -> WindingResult:
    """Count eigenvalues inside a contour by tracking the argument of the Jost function.

    The tracked function is the pole-free Jost function, so the count is
    the number of zeros (eigenvalues) inside. Segments whose argument
    change reaches ``pi/2`` are halved until none remain.
    """
    clearance = contour_clearance(borg, contour)
    if clearance < margin:
        raise ContourError(f"contour passes within {clearance:.3g} of the continuous spectrum or Weyl pole")

    def f(t):
        return regularized_jost_values(pert, borg, bg, contour_points(contour, t))

    t = np.linspace(0.0, 1.0, max(n_samples, 8) + 1)
    vals = f(t)
    vals[-1] = vals[0]
    n_eval = len(t)
    for _ in range(max_refine):
        dphi = np.angle(vals[1:] / vals[:-1])
        bad = np.flatnonzero(np.abs(dphi) >= np.pi / 2)
        if bad.size == 0:
            break
        t_mid = 0.5 * (t[bad] + t[bad + 1])
        v_mid = f(t_mid)
        n_eval += len(t_mid)
        t = np.insert(t, bad + 1, t_mid)
        vals = np.insert(vals, bad + 1, v_mid)
    else:
        raise ContourError("argument tracking did not resolve after step halving")
    mods = np.abs(vals)
    min_mod = float(np.min(mods))
    if not np.all(np.isfinite(vals)) or min_mod < 1e-9 * float(np.max(mods)):
        raise ContourError(f"Jost function nearly vanishes on the contour (min |f| = {min_mod:.3g})")
    total = float(np.sum(np.angle(vals[1:] / vals[:-1]))) / (2.0 * np.pi)
    count = int(round(total))
    if abs(total - count) >= 0.1:
        raise ContourError(f"non-integral winding {total:.4f}")
    if count < 0:
        raise ContourError(f"negative zero count {count}; the contour encloses a singularity")
    return WindingResult(contour=contour, zeros_inside=count, min_modulus_on_contour=min_mod, winding_raw=total, n_evaluations=n_eval)


def refine_zero(pert, borg, bg, z0, h=1e-4, tol=1e-14, max_iter=60, bounds: Rect | None = None):
    """Secant iteration on the pole-free Jost function.

    With ``bounds`` given the iteration is abandoned as soon as it leaves
    that rectangle.
    """
    def f(z):
        return complex(regularized_jost_values(pert, borg, bg, z))

    z_prev, z = complex(z0), complex(z0) + h
    f_prev, fz = f(z_prev), f(z)
    for _ in range(max_iter):
        if fz == 0:
            return z
        denom = fz - f_prev
        if denom == 0:
            break
        z_new = z - fz * (z - z_prev) / denom
        if bounds is not None and not bounds.contains(z_new):
            break
        z_prev, f_prev = z, fz
        z = z_new
        fz = f(z)
        if abs(z - z_prev) <= tol * (1.0 + abs(z)):
            return z
    raise ConvergenceError(f"secant refinement from {complex(z0)!r} did not converge")


def _split(rect: Rect, ratio):
    xm = rect.re_min + ratio * (rect.re_max - rect.re_min)
    ym = rect.im_min + ratio * (rect.im_max - rect.im_min)
    return [
        Rect(rect.re_min, xm, rect.im_min, ym),
        Rect(xm, rect.re_max, rect.im_min, ym),
        Rect(rect.re_min, xm, ym, rect.im_max),
        Rect(xm, rect.re_max, ym, rect.im_max),
    ]


def _rect_spectrum_distance(borg, rect):
    """Distance from the closed rectangle to the continuous spectrum."""
    y = 0.0 if rect.im_min <= 0.0 <= rect.im_max else min(abs(rect.im_min), abs(rect.im_max))

    def interval_dist(a, b):
        return math.hypot(max(a - rect.re_max, rect.re_min - b, 0.0), y)

    return min(interval_dist(-borg.d, -borg.s), interval_dist(borg.s, borg.d))


def _rect_boundary_distance(rect, z):
    z = complex(z)
    if rect.contains(z):
        return min(z.real - rect.re_min, rect.re_max - z.real, z.imag - rect.im_min, rect.im_max - z.imag)
    dx = max(rect.re_min - z.real, 0.0, z.real - rect.re_max)
    dy = max(rect.im_min - z.imag, 0.0, z.imag - rect.im_max)
    return math.hypot(dx, dy)


@dataclass
class ZeroSearch:
    """Result of :func:`locate_zeros`; ``skipped`` tiles were not examined."""

    zeros: list = field(default_factory=list)
    skipped: list = field(default_factory=list)
    tiles_counted: int = 0


# off-centre split ratios keep tile edges off the real axis and off symmetric points
_RATIOS = (0.5 + 1 / 97, 0.5 - 1 / 89, 0.5 + 1 / 53)


def locate_zeros(
    pert: Perturbation,
    borg: BorgData,
    bg: Background,
    rect: Rect,
    exclusion: float,
    min_size: float | None = None,
    n_samples: int = 64,
    max_depth: int = 16,
) -> ZeroSearch:
    """Find the zeros of the pole-free Jost function in ``rect`` by bisection on winding counts.

    Tiles closer than ``exclusion / 2`` to the continuous spectrum (or
    whose edges pass near the Weyl pole) are subdivided down to
    ``min_size`` (default ``exclusion / 4``) and then skipped. A skipped
    tile lies entirely within ``exclusion`` of the spectrum, so every zero
    farther out than that is found; some closer ones may be reported too.
    Each tile holding a single zero is finished by secant refinement.
    """
    min_size = exclusion / 4.0 if min_size is None else min_size
    out = ZeroSearch()

    def blocked(tile):
        if _rect_spectrum_distance(borg, tile) < 0.5 * exclusion:
            return True
        return borg.eps == 1 and _rect_boundary_distance(tile, borg.nu) < CONTOUR_MARGIN

    def visit(tile, depth):
        size = max(tile.re_max - tile.re_min, tile.im_max - tile.im_min)
        ratio = _RATIOS[depth % len(_RATIOS)]
        if blocked(tile):
            if size <= min_size or depth >= max_depth:
                out.skipped.append(tile)
                return
            for sub in _split(tile, ratio):
                visit(sub, depth + 1)
            return
        res = winding(pert, borg, bg, tile, n_samples=n_samples)
        out.tiles_counted += 1
        if res.zeros_inside == 0:
            return
        if res.zeros_inside == 1:
            try:
                z = refine_zero(pert, borg, bg, tile.center, h=1e-3 * size, bounds=tile)
            except ConvergenceError:
                z = None
            if z is not None:
                out.zeros.append(z)
                return
        if depth >= max_depth:
            raise ConvergenceError(f"zero search did not isolate the zeros in {tile}")
        for sub in _split(tile, ratio):
            visit(sub, depth + 1)

    visit(rect, 0)
    return out


def random_perturbation(bg: Background, support: int, scale: float, rng, real: bool = False) -> Perturbation:
    """Perturbation with entries deviating by at most ``scale`` (random complex)."""
    def draw():
        x = rng.uniform(-1.0, 1.0, support)
        if real:
            return scale * x
        return scale * (x + 1j * rng.uniform(-1.0, 1.0, support)) / math.sqrt(2.0)

    base = Perturbation.zero(bg, support)
    a = base.a + draw()
    c = base.c + draw()
    return Perturbation(a=a, b=base.b + draw(), c=c)

"""
Two-periodic real Jacobi background.

The background is parametrised by its Borg data ``{±s, ±d, nu, eps}``:
the continuous spectrum is ``[-d, -s] U [s, d]``, ``nu`` is the root of
``s_2`` inside the gap and ``eps = +1`` when the Weyl function ``m`` has a
pole at ``nu`` (i.e. ``nu`` is an eigenvalue of the background).

Every evaluator accepts a scalar or an array of spectral parameters.
Points on the real axis are treated as boundary values from the upper
half-plane, ``lambda + i0``.

Conventions
-----------
- entries are 1-based and 2-periodic, ``a_0 = a_2``;
- ``w`` is the Floquet map, ``w**2 = rho`` with ``|rho| <= 1``;
- ``reg_m = (lambda - nu) m`` and ``reg_mhat = (lambda - nu) mhat`` are the
  pole-free Weyl products used by the Green function.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ValidationError

__all__ = [
    "POLE",
    "Pole",
    "BorgData",
    "Background",
    "BackgroundEval",
    "FundamentalPair",
    "normal_form",
    "reconstruct",
    "hill_u",
    "hill_u_entries",
    "hill_v",
    "floquet_w",
    "floquet_rho",
    "w2eps_nu",
    "fundamental_polys",
    "weyl_regularized",
    "weyl_functions",
    "evaluate",
    "weyl_solution",
    "weyl_solution_hat",
    "chi",
    "psi1_floquet_form",
    "green_scaled",
    "green",
    "green_polynomial",
]


class Pole:
    """Marker for a value sitting on a pole of a meromorphic function."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "POLE"

    def __reduce__(self):
        return (Pole, ())


POLE = Pole()


@dataclass(frozen=True)
class BorgData:
    """Spectral data ``{s, d, nu, eps}`` of a 2-periodic background."""

    s: float
    d: float
    nu: float
    eps: int

    def __post_init__(self):
        s, d, nu = float(self.s), float(self.d), float(self.nu)
        for name, val in (("s", s), ("d", d), ("nu", nu)):
            if not math.isfinite(val):
                raise ValidationError(f"{name} must be finite, got {val!r}")
        if s <= 0:
            raise ValidationError(f"s must be positive, got {s!r}")
        if s >= d:
            raise ValidationError(f"need s < d, got s={s!r}, d={d!r}")
        if abs(nu) >= s:
            raise ValidationError(f"need |nu| < s, got nu={nu!r}, s={s!r}")
        if self.eps not in (1, -1):
            raise ValidationError(f"eps must be +1 or -1, got {self.eps!r}")
        object.__setattr__(self, "s", s)
        object.__setattr__(self, "d", d)
        object.__setattr__(self, "nu", nu)
        object.__setattr__(self, "eps", int(self.eps))

    @property
    def band_edges(self):
        return (-self.d, -self.s, self.s, self.d)

    @property
    def bands(self):
        return ((-self.d, -self.s), (self.s, self.d))

    @property
    def gap(self):
        return (-self.s, self.s)

    @property
    def roots_s2(self):
        """The set Lambda of roots of ``s_2``."""
        return (self.nu,)

    @property
    def weyl_poles(self):
        """The set Lambda_r of poles of ``m``: ``{nu}`` iff ``eps = +1``."""
        return (self.nu,) if self.eps == 1 else ()

    def dist_to_continuous_spectrum(self, lam):
        lam = np.asarray(lam, dtype=complex)
        x, y = lam.real, lam.imag
        ax = np.abs(x)
        dx = np.maximum(np.maximum(self.s - ax, ax - self.d), 0.0)
        return np.hypot(dx, y)

    def dist_to_band_edges(self, lam):
        lam = np.asarray(lam, dtype=complex)
        return np.min([np.abs(lam - e) for e in self.band_edges], axis=0)


def normal_form(bands, nu, eps):
    """Shift two equal-length bands so they sit symmetrically about 0.

    ``bands`` is ``((lo1, hi1), (lo2, hi2))`` in any affine position.
    Returns ``(borg, shift)``; a spectral parameter ``z`` of the raw
    problem corresponds to ``z - shift`` in normal form.
    """
    (lo1, hi1), (lo2, hi2) = sorted((tuple(map(float, b)) for b in bands))
    if not (lo1 < hi1 < lo2 < hi2):
        raise ValidationError("bands must be disjoint non-degenerate intervals")
    len1, len2 = hi1 - lo1, hi2 - lo2
    if not math.isclose(len1, len2, rel_tol=1e-12, abs_tol=1e-14):
        raise ValidationError(
            f"2-periodic bands have equal length, got {len1!r} and {len2!r}"
        )
    shift = 0.5 * (hi1 + lo2)
    s = 0.5 * (lo2 - hi1)
    d = 0.5 * (hi2 - lo1)
    return BorgData(s=s, d=d, nu=float(nu) - shift, eps=eps), shift


@dataclass(frozen=True)
class Background:
    """Period-2 entries ``a1, a2 > 0`` and ``b1, b2`` real."""

    a1: float
    a2: float
    b1: float
    b2: float

    def a(self, n):
        """Off-diagonal ``a_n^0`` for ``n >= 0`` (``a_0 = a_2``)."""
        return self.a1 if n % 2 else self.a2

    def b(self, n):
        """Diagonal ``b_n^0`` for ``n >= 0`` (``b_0 = b_2``)."""
        return self.b1 if n % 2 else self.b2

    def a_seq(self, n_max):
        n = np.arange(n_max + 1)
        return np.where(n % 2 == 1, self.a1, self.a2).astype(float)

    def b_seq(self, n_max):
        n = np.arange(n_max + 1)
        return np.where(n % 2 == 1, self.b1, self.b2).astype(float)

    def as_dict(self):
        return {"a1": self.a1, "a2": self.a2, "b1": self.b1, "b2": self.b2}


def reconstruct(borg: BorgData) -> Background:
    """Restore the 2-periodic entries from Borg data.

    ``eps = +1`` gives ``a1 < a2`` and ``eps = -1`` gives ``a1 > a2``.
    """
    s2, d2, nu2 = borg.s**2, borg.d**2, borg.nu**2
    root = math.sqrt((d2 - nu2) * (s2 - nu2))
    base = d2 + s2 - 2.0 * nu2
    # the smaller square suffers cancellation; recover it from a1*a2
    big = math.sqrt(base + 2.0 * root) / 2.0
    small = (d2 - s2) / (4.0 * big)
    # exact at nu = 0; keep rounding from leaving [(d-s)/2, (d+s)/2]
    big = min(big, 0.5 * (borg.d + borg.s))
    small = max(small, 0.5 * (borg.d - borg.s))
    if borg.eps == 1:
        a1, a2 = small, big
    else:
        a1, a2 = big, small
    return Background(a1=a1, a2=a2, b1=borg.nu, b2=0.0 - borg.nu)


def _as_complex(lam):
    """Complex array with ``-0.0`` imaginary parts turned into ``+0.0``.

    Real inputs are then read as ``lambda + i0``.
    """
    arr = np.asarray(lam, dtype=complex)
    out = np.empty(arr.shape, dtype=complex)
    out.real = arr.real
    out.imag = arr.imag + 0.0
    return out


def _ret(x, like):
    return x if np.ndim(like) else x[()]


def hill_u(borg: BorgData, lam):
    """Hill discriminant in normal form, ``2(lam^2 - (d^2+s^2)/2)/(d^2-s^2)``."""
    lam = _as_complex(lam)
    s2, d2 = borg.s**2, borg.d**2
    out = 2.0 * (lam * lam - 0.5 * (d2 + s2)) / (d2 - s2)
    return _ret(out, lam)


def hill_u_entries(bg: Background, lam):
    """Hill discriminant ``(s_3 + c_2)/2`` from the matrix entries."""
    lam = _as_complex(lam)
    a1, a2, b1, b2 = bg.a1, bg.a2, bg.b1, bg.b2
    out = ((lam - b1) * (lam - b2) - a1 * a1 - a2 * a2) / (2.0 * a1 * a2)
    return _ret(out, lam)


def hill_v(bg: Background, lam):
    """The companion polynomial ``v = (s_3 - c_2)/2``."""
    lam = _as_complex(lam)
    a1, a2, b1, b2 = bg.a1, bg.a2, bg.b1, bg.b2
    out = ((lam - b1) * (lam - b2) - a1 * a1 + a2 * a2) / (2.0 * a1 * a2)
    return _ret(out, lam)


def _sqrt_cut(lam, a):
    # ~ lam at infinity, cut on [-a, a]
    return np.sqrt(lam - a) * np.sqrt(lam + a)


def floquet_w(borg: BorgData, lam):
    """Floquet map ``w(lam)`` with ``w**2 = rho`` and ``|rho| <= 1``.

    Uses ``1/w = (sqrt(lam^2-s^2) + sqrt(lam^2-d^2)) / sqrt(d^2-s^2)``, both
    roots behaving like ``lam`` at infinity. This maps the upper
    half-plane into the lower half-disk, sends ``(d, inf)`` onto ``(0, 1)``
    and ``(-inf, -d)`` onto ``(-1, 0)``.
    """
    lam = _as_complex(lam)
    denom = _sqrt_cut(lam, borg.s) + _sqrt_cut(lam, borg.d)
    with np.errstate(divide="ignore", invalid="ignore"):
        out = math.sqrt(borg.d**2 - borg.s**2) / denom
    return _ret(out, lam)


def floquet_rho(borg: BorgData, lam):
    """Floquet multiplier ``rho = w**2``."""
    w = floquet_w(borg, lam)
    return w * w


def w2eps_nu(borg: BorgData) -> float:
    """``w^{2 eps}(nu)``, taken from the gap boundary value.

    ``rho(nu)`` is real and negative, so this is a real number in
    ``(-inf, 0)``; it equals ``-a1/a2`` for the reconstructed entries.
    """
    rho = complex(floquet_rho(borg, borg.nu))
    val = rho if borg.eps == 1 else 1.0 / rho
    return val.real


@dataclass(frozen=True)
class FundamentalPair:
    """'sin' and 'cos' solutions ``s_n``, ``c_n`` for ``n = 0..n_max``."""

    s_vals: np.ndarray
    c_vals: np.ndarray
    lam: complex

    def wronskian(self):
        """``s_3 c_2 - s_2 c_3``; equal to 1 identically."""
        s, c = self.s_vals, self.c_vals
        return s[3] * c[2] - s[2] * c[3]


def fundamental_polys(bg: Background, lam, n_max: int) -> FundamentalPair:
    if n_max < 3:
        raise ValidationError(f"n_max must be >= 3, got {n_max}")
    lam = complex(_as_complex(lam))
    s = np.zeros(n_max + 1, dtype=complex)
    c = np.zeros(n_max + 1, dtype=complex)
    s[1], c[0] = 1.0, 1.0
    for n in range(1, n_max):
        a_prev, a_n, b_n = bg.a(n - 1), bg.a(n), bg.b(n)
        s[n + 1] = ((lam - b_n) * s[n] - a_prev * s[n - 1]) / a_n
        c[n + 1] = ((lam - b_n) * c[n] - a_prev * c[n - 1]) / a_n
    return FundamentalPair(s_vals=s, c_vals=c, lam=lam)


def weyl_regularized(borg: BorgData, bg: Background, lam):
    """Return ``(reg_m, reg_mhat) = ((lam-nu) m, (lam-nu) mhat)``.

    Both are finite for every ``lam``. Their product is ``lam^2 - nu^2``;
    the smaller of the two is recovered from that product to avoid
    cancellation in ``v -+ sqrt(u^2-1)``.
    """
    lam = _as_complex(lam)
    w = floquet_w(borg, lam)
    sq = hill_u(borg, lam) - w * w
    v = hill_v(bg, lam)
    p, q = v - sq, v + sq
    prod = (lam * lam - borg.nu**2) / bg.a1**2
    use_p = np.abs(p) >= np.abs(q)
    with np.errstate(divide="ignore", invalid="ignore"):
        p_s = np.where(use_p, p, prod / q)
        q_s = np.where(use_p, prod / p, q)
    return _ret(bg.a1 * p_s, lam), _ret(bg.a1 * q_s, lam)


def weyl_functions(borg: BorgData, bg: Background, lam):
    """Array-valued ``(m, mhat)``; a pole evaluates to ``inf``/``nan``.

    Use :func:`evaluate` for scalar work where poles must be marked.
    """
    lam = _as_complex(lam)
    reg_m, reg_mhat = weyl_regularized(borg, bg, lam)
    reg_m, reg_mhat = np.asarray(reg_m), np.asarray(reg_mhat)
    lm, lp = lam - borg.nu, lam + borg.nu
    use_m = np.abs(reg_m) >= np.abs(reg_mhat)
    with np.errstate(divide="ignore", invalid="ignore"):
        m = np.where(use_m, reg_m / lm, lp / reg_mhat)
        mhat = np.where(use_m, lp / reg_m, reg_mhat / lm)
    return _ret(m, lam), _ret(mhat, lam)


@dataclass(frozen=True)
class BackgroundEval:
    """Unperturbed spectral functions at a single point."""

    lam: complex
    u: complex
    v: complex
    sqrt_u2m1: complex
    rho: complex
    w: complex
    m: complex | Pole
    mhat: complex | Pole
    reg_m: complex
    reg_mhat_w2: complex
    chi1: complex | Pole

    def as_dict(self):
        out = {}
        for k, val in self.__dict__.items():
            out[k] = None if val is POLE else complex(val)
        return out


def _on_pole(borg, lam):
    return complex(lam) == complex(borg.nu)


def evaluate(borg: BorgData, bg: Background, lam) -> BackgroundEval:
    lam = complex(_as_complex(lam))
    w = complex(floquet_w(borg, lam))
    rho = w * w
    u = complex(hill_u(borg, lam))
    reg_m, reg_mhat = (complex(x) for x in weyl_regularized(borg, bg, lam))
    if _on_pole(borg, lam):
        if borg.eps == 1:
            m, mhat = POLE, (lam + borg.nu) / reg_m
        else:
            m, mhat = (lam + borg.nu) / reg_mhat, POLE
    else:
        m, mhat = (complex(x) for x in weyl_functions(borg, bg, lam))
    chi1 = POLE if m is POLE else m / w
    return BackgroundEval(
        lam=lam,
        u=u,
        v=complex(hill_v(bg, lam)),
        sqrt_u2m1=u - rho,
        rho=rho,
        w=w,
        m=m,
        mhat=mhat,
        reg_m=reg_m,
        reg_mhat_w2=reg_mhat * rho,
        chi1=chi1,
    )


def _solution(borg, bg, lam, n, hat):
    if n < 0:
        raise ValidationError(f"index must be non-negative, got {n}")
    ev = evaluate(borg, bg, lam)
    half = n // 2
    if n % 2 == 0:
        first = 1.0
    else:
        first = ev.mhat if hat else ev.m
        if first is POLE:
            return POLE
    rho = ev.rho
    return first * (rho ** (-half) if hat else rho**half)


def weyl_solution(borg: BorgData, bg: Background, lam, n: int):
    """Weyl solution ``psi_n`` (``psi_0 = 1``, ``psi_1 = m``, ``psi_{n+2} = rho psi_n``)."""
    return _solution(borg, bg, lam, n, hat=False)


def weyl_solution_hat(borg: BorgData, bg: Background, lam, n: int):
    """Second solution ``psihat_n`` with ``psihat_{n+2} = psihat_n / rho``."""
    return _solution(borg, bg, lam, n, hat=True)


def chi(borg: BorgData, bg: Background, lam, n: int):
    """Periodic factor ``chi_n = psi_n w^{-n}``; ``chi_even = 1``, ``chi_odd = m/w``."""
    lam = _as_complex(lam)
    if n % 2 == 0:
        return _ret(np.ones(lam.shape, dtype=complex), lam)
    m, _ = weyl_functions(borg, bg, lam)
    return m / floquet_w(borg, lam)


def psi1_floquet_form(borg: BorgData, bg: Background, lam):
    """``psi_1`` written through ``w``: ``4 a1 (lam+nu) w^2 / ((d^2-s^2)(w^2 - w^{2eps}(nu)))``."""
    lam = _as_complex(lam)
    w2 = floquet_rho(borg, lam)
    num = 4.0 * bg.a1 * (lam + borg.nu) * w2
    with np.errstate(divide="ignore", invalid="ignore"):
        out = num / ((borg.d**2 - borg.s**2) * (w2 - w2eps_nu(borg)))
    return out


def _geom(x, k):
    """``1 + x + ... + x^{k-1}`` by Horner."""
    acc = np.zeros_like(x)
    for _ in range(k):
        acc = acc * x + 1.0
    return acc


def green_scaled(borg: BorgData, bg: Background, lam, n: int, m: int):
    """Scaled Green function ``G(lam; n, m) w^{m-n}``.

    Uses the four parity cases of the Green function in a division-free
    form, so the value is finite at ``nu`` and at the band edges.
    """
    lam = _as_complex(lam)
    if n < 0 or m < 0:
        raise ValidationError("Green function indices must be non-negative")
    if m <= n:
        return _ret(np.zeros(lam.shape, dtype=complex), lam)
    D = 4.0 / (borg.d**2 - borg.s**2)
    w = np.asarray(floquet_w(borg, lam))
    w2 = w * w
    w4 = w2 * w2
    p, q = n // 2, m // 2
    k = q - p
    if n % 2 == 0 and m % 2 == 0:
        out = D * (lam - borg.nu) * w2 * _geom(w4, k)
    elif n % 2 == 1 and m % 2 == 1:
        out = D * (lam + borg.nu) * w2 * _geom(w4, k)
    else:
        reg_m = np.asarray(weyl_regularized(borg, bg, lam)[0])
        if n % 2 == 0:
            out = D * (bg.a1 * w + reg_m * w * w2 * _geom(w4, k))
        else:
            out = D * (reg_m * w * _geom(w4, k) - bg.a1 * w ** (4 * k - 1))
    return _ret(out, lam)


def green(borg: BorgData, bg: Background, lam, n: int, m: int):
    """Green function ``G(lam; n, m)`` of the background (zero for ``m <= n``)."""
    lam = _as_complex(lam)
    gs = green_scaled(borg, bg, lam, n, m)
    if m <= n:
        return gs
    return gs * floquet_w(borg, lam) ** (n - m)


def green_polynomial(bg: Background, lam, n: int, m: int):
    """Green function from the 'sin'/'cos' polynomials, ``(c_n s_m - s_n c_m)/a_2``.

    Loses accuracy for large ``|lam|`` and large indices; intended as an
    independent check of :func:`green`.
    """
    if m <= n:
        return 0j
    fp = fundamental_polys(bg, lam, max(m, 3))
    s, c = fp.s_vals, fp.c_vals
    return (c[n] * s[m] - s[n] * c[m]) / bg.a2

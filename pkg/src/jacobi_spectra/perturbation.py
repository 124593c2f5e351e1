"""Finitely supported complex perturbations of the periodic background."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .background import Background, BorgData, _as_complex, floquet_w, green_scaled
from .errors import ValidationError

__all__ = [
    "Perturbation",
    "MomentSummary",
    "moments",
    "kernel_A",
    "kernel_A_tilde",
    "kernel_tilde_matrix",
]


@dataclass(frozen=True, eq=False)
class Perturbation:
    """Entries ``a_n, b_n, c_n`` for ``n = 1..M``; background beyond ``M``.

    ``a`` is the sub-diagonal and ``c`` the super-diagonal of the
    perturbed matrix, both required nonzero.
    """

    a: np.ndarray
    b: np.ndarray
    c: np.ndarray

    def __post_init__(self):
        a, b, c = (np.atleast_1d(np.asarray(x, dtype=complex)).copy() for x in (self.a, self.b, self.c))
        if not (a.ndim == b.ndim == c.ndim == 1):
            raise ValidationError("perturbation entries must be 1-d sequences")
        if not (len(a) == len(b) == len(c)):
            raise ValidationError(
                f"a, b, c must share the support length, got {len(a)}, {len(b)}, {len(c)}"
            )
        if not (np.all(np.isfinite(a)) and np.all(np.isfinite(b)) and np.all(np.isfinite(c))):
            raise ValidationError("perturbation entries must be finite")
        bad = np.flatnonzero(a * c == 0)
        if bad.size:
            raise ValidationError(f"need a_n c_n != 0, violated at n = {(bad + 1).tolist()}")
        for x in (a, b, c):
            x.flags.writeable = False
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)
        object.__setattr__(self, "c", c)

    @property
    def support(self) -> int:
        return len(self.b)

    @classmethod
    def zero(cls, bg: Background, support: int = 0):
        """Unperturbed entries on ``1..support``."""
        n = np.arange(1, support + 1)
        a = np.where(n % 2 == 1, bg.a1, bg.a2)
        b = np.where(n % 2 == 1, bg.b1, bg.b2)
        return cls(a=a, b=b, c=a)

    @classmethod
    def from_deviations(cls, bg: Background, da=None, db=None, dc=None):
        """Background plus additive deviations (any subset, equal lengths)."""
        given = [x for x in (da, db, dc) if x is not None]
        if not given:
            return cls.zero(bg, 0)
        M = len(given[0])
        base = cls.zero(bg, M)

        def add(x, dx):
            return x if dx is None else x + np.asarray(dx, dtype=complex)

        return cls(a=add(base.a, da), b=add(base.b, db), c=add(base.c, dc))

    def entries(self, bg: Background, n: int):
        """``(a_n, b_n, c_n)`` of the perturbed matrix for ``n >= 1``."""
        if 1 <= n <= self.support:
            return complex(self.a[n - 1]), complex(self.b[n - 1]), complex(self.c[n - 1])
        return complex(bg.a(n)), complex(bg.b(n)), complex(bg.a(n))

    def delta_b(self, bg: Background) -> np.ndarray:
        """``b_m^0 - b_m`` for ``m = 0..M+1`` (zero at both ends)."""
        M = self.support
        out = np.zeros(M + 2, dtype=complex)
        out[1 : M + 1] = bg.b_seq(M)[1:] - self.b
        return out

    def delta_a(self, bg: Background) -> np.ndarray:
        """``a_j^0 - a_j c_j / a_j^0`` for ``j = 0..M+1`` (zero at both ends)."""
        M = self.support
        out = np.zeros(M + 2, dtype=complex)
        a0 = bg.a_seq(M)[1:]
        # exactly zero when a = c = a^0
        out[1 : M + 1] = (a0 * a0 - self.a * self.c) / a0
        return out

    def to_dict(self):
        return {
            "support": self.support,
            "a": [complex(x) for x in self.a],
            "b": [complex(x) for x in self.b],
            "c": [complex(x) for x in self.c],
        }


@dataclass(frozen=True)
class MomentSummary:
    """Moment sequence ``d_m`` (``d_seq[m-1] = d_m``, ``m = 1..M+1``)."""

    d_seq: np.ndarray
    total0: float
    total1: float

    def _d(self):
        # padded so that index = m
        return np.concatenate(([0.0], self.d_seq))

    def kappa0(self, n: int) -> float:
        """``sum_{m > n} d_m``."""
        d = self._d()
        return float(d[n + 1 :].sum()) if n + 1 < len(d) else 0.0

    def kappa1(self, n: int) -> float:
        """``sum_{m > n} (m - n) d_m``."""
        d = self._d()
        if n + 1 >= len(d):
            return 0.0
        m = np.arange(n + 1, len(d))
        return float(((m - n) * d[n + 1 :]).sum())


def moments(pert: Perturbation, bg: Background) -> MomentSummary:
    """``d_m = |b_m^0 - b_m| + |a_{m-1}^0 - a_{m-1} c_{m-1} / a_{m-1}^0|``."""
    db, da = pert.delta_b(bg), pert.delta_a(bg)
    d = np.abs(db[1:]) + np.abs(da[:-1])
    m = np.arange(1, len(d) + 1)
    return MomentSummary(d_seq=d, total0=float(d.sum()), total1=float((m * d).sum()))


def _check_indices(n, m):
    if n < 0 or m < 0:
        raise ValidationError("kernel indices must be non-negative")


def kernel_A(pert: Perturbation, borg: BorgData, bg: Background, lam, n: int, m: int):
    """Kernel ``A(lam; n, m)`` of the Jost integral equation.

    Assembled from the scaled Green function so that large ``|lam|`` stays
    accurate: ``A = A_tilde * w^{n-m}``.
    """
    _check_indices(n, m)
    lam = _as_complex(lam)
    at = kernel_A_tilde(pert, borg, bg, lam, n, m)
    if m <= n:
        return at
    return at * floquet_w(borg, lam) ** (n - m)


def kernel_A_tilde(pert: Perturbation, borg: BorgData, bg: Background, lam, n: int, m: int):
    """Scaled kernel ``A(lam; n, m) w^{m-n}``."""
    _check_indices(n, m)
    lam = _as_complex(lam)
    zero = np.zeros(lam.shape, dtype=complex)
    M = pert.support
    if m <= n or m > M + 1:
        return zero if lam.ndim else zero[()]
    db = pert.delta_b(bg)[m] if m <= M else 0.0
    da = pert.delta_a(bg)[m - 1]
    out = zero
    if db != 0:
        out = out + db * green_scaled(borg, bg, lam, n, m)
    if da != 0:
        out = out + da * green_scaled(borg, bg, lam, n, m - 1) * floquet_w(borg, lam)
    return out


def kernel_tilde_matrix(pert: Perturbation, borg: BorgData, bg: Background, lam, size=None):
    """All ``A_tilde(lam; n, m)`` for ``0 <= n, m < size`` at once.

    Returns an array of shape ``(size, size) + lam.shape``; strictly upper
    triangular in ``(n, m)`` and zero for ``m > M + 1``.
    """
    lam = _as_complex(lam)
    M = pert.support
    size = M + 3 if size is None else size
    db, da = pert.delta_b(bg), pert.delta_a(bg)
    w = floquet_w(borg, lam)
    out = np.zeros((size, size) + lam.shape, dtype=complex)
    top = min(M + 1, size - 1)
    gs = {}

    def G(n, m):
        key = (n, m)
        if key not in gs:
            gs[key] = green_scaled(borg, bg, lam, n, m)
        return gs[key]

    for n in range(top):
        for m in range(n + 1, top + 1):
            acc = np.zeros(lam.shape, dtype=complex)
            if db[m] != 0:
                acc = acc + db[m] * G(n, m)
            if m - 1 > n and da[m - 1] != 0:
                acc = acc + da[m - 1] * G(n, m - 1) * w
            out[n, m] = acc
    return out

"""
Jost solution of the perturbed recurrence.

The Jost solution solves

    v_n = psi_n + sum_{m > n} A(lam; n, m) v_m,

which, for a perturbation supported on ``1..M``, is a finite upper
triangular system. Both solvers work with the scaled unknowns
``v_n w^{-n}`` and the scaled kernel ``A w^{m-n}``, which stay bounded
for large ``|lam|``.

Two solvers are provided and used as checks on each other:
back-substitution (exact) and successive approximations
``V_{n,j+1} = sum_m A_tilde(n, m) V_{m,j}``.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .background import Background, BorgData, _as_complex, chi, floquet_w, weyl_regularized
from .errors import ConvergenceError, PoleProximityError
from .perturbation import Perturbation, kernel_tilde_matrix, moments
from .regions import constants, jost_kernel_factor

__all__ = [
    "JostSolution",
    "POLE_MARGIN",
    "check_admissible",
    "solve_backsub",
    "solve_series",
    "jost_value",
    "jost_values",
    "jost_table",
    "regularized_jost_values",
    "recurrence_residual",
    "deviation_bound",
    "series_term_bound",
]

POLE_MARGIN = 1e-6
CONDITIONING_LIMIT = 1e12


@dataclass(frozen=True)
class JostSolution:
    """Jost solution at one spectral parameter.

    ``v[n]`` for ``n = 0..M+2``; ``V[n] = (v_n - psi_n) w^{-n}``.
    ``series_terms_used`` is ``None`` for the back-substitution solver.
    """

    lam: complex
    v: np.ndarray
    V: np.ndarray
    recurrence_residual: float
    series_terms_used: int | None = None
    converged: bool = True

    @property
    def jost_function(self) -> complex:
        return complex(self.v[0])


def _near(lam, borg: BorgData, margin):
    lam = np.asarray(lam)
    bad = borg.dist_to_band_edges(lam) < margin
    if borg.eps == 1:
        bad = bad | (np.abs(lam - borg.nu) < margin)
    return bad


def check_admissible(borg: BorgData, lam, margin: float = POLE_MARGIN):
    """Raise :class:`PoleProximityError` near band edges or the Weyl pole."""
    lam = _as_complex(lam)
    bad = _near(lam, borg, margin)
    if np.any(bad):
        where = np.atleast_1d(lam)[np.atleast_1d(bad)][0]
        raise PoleProximityError(
            f"lam = {complex(where)!r} lies within {margin:g} of a band edge or Weyl pole"
        )


def _chi_table(borg, bg, lam, size):
    chi_odd = chi(borg, bg, lam, 1)
    out = np.empty((size,) + lam.shape, dtype=complex)
    out[0::2] = 1.0
    out[1::2] = chi_odd
    return out


def _scaled_backsub(At, chi_tab):
    size = chi_tab.shape[0]
    vt = np.empty_like(chi_tab)
    for n in range(size - 1, -1, -1):
        vt[n] = chi_tab[n] + np.einsum("m...,m...->...", At[n, n + 1 :], vt[n + 1 :])
    return vt


def _powers(w, size):
    out = np.empty((size,) + np.shape(w), dtype=complex)
    out[0] = 1.0
    for n in range(1, size):
        out[n] = out[n - 1] * w
    return out


def recurrence_residual(pert: Perturbation, bg: Background, lam, v) -> float:
    """Largest relative residual of the transformed perturbed recurrence.

    ``a_{n-1}^0 v_{n-1} + (b_n - lam) v_n + (c_n a_n / a_n^0) v_{n+1} = 0``
    for ``n = 1..len(v)-2``, each divided by its largest term.
    """
    lam = complex(lam)
    worst = 0.0
    for n in range(1, len(v) - 1):
        a_n, b_n, c_n = pert.entries(bg, n)
        t1 = bg.a(n - 1) * v[n - 1]
        t2 = (b_n - lam) * v[n]
        t3 = c_n * a_n / bg.a(n) * v[n + 1]
        scale = max(abs(t1), abs(t2), abs(t3), 1e-300)
        worst = max(worst, abs(t1 + t2 + t3) / scale)
    return worst


def _finish(pert, bg, lam, vt, chi_tab, w, terms=None, converged=True):
    pw = _powers(w, len(vt))
    v = vt * pw
    if np.max(np.abs(v)) > CONDITIONING_LIMIT:
        warnings.warn(
            f"Jost solution at lam={lam!r} exceeds {CONDITIONING_LIMIT:g}; result may be ill-conditioned",
            RuntimeWarning,
            stacklevel=3,
        )
    return JostSolution(
        lam=lam,
        v=v,
        V=vt - chi_tab,
        recurrence_residual=recurrence_residual(pert, bg, lam, v),
        series_terms_used=terms,
        converged=converged,
    )


def solve_backsub(pert: Perturbation, borg: BorgData, bg: Background, lam) -> JostSolution:
    """Exact Jost solution by backward substitution from ``n = M + 2``."""
    lam = complex(_as_complex(lam))
    check_admissible(borg, lam)
    size = pert.support + 3
    arr = np.asarray(lam)
    At = kernel_tilde_matrix(pert, borg, bg, arr, size)
    chi_tab = _chi_table(borg, bg, arr, size)
    vt = _scaled_backsub(At, chi_tab)
    return _finish(pert, bg, lam, vt, chi_tab, complex(floquet_w(borg, lam)))


def solve_series(pert: Perturbation, borg: BorgData, bg: Background, lam, tol: float = 1e-12, j_max: int = 200) -> JostSolution:
    """Jost solution by successive approximations.

    Sums ``V_n = sum_j V_{n,j}`` with ``V_{n,1} = sum_m A_tilde(n, m) chi_m``
    and ``V_{n,j+1} = sum_m A_tilde(n, m) V_{m,j}``; stops once
    ``max_n |V_{n,j}| < tol``. Raises :class:`ConvergenceError` (with the
    partial solution attached) when ``j_max`` terms do not reach ``tol``.
    """
    lam = complex(_as_complex(lam))
    check_admissible(borg, lam)
    size = pert.support + 3
    arr = np.asarray(lam)
    At = kernel_tilde_matrix(pert, borg, bg, arr, size)
    chi_tab = _chi_table(borg, bg, arr, size)
    term = np.einsum("nm,m->n", At, chi_tab)
    V = term.copy()
    j = 1
    while np.max(np.abs(term)) >= tol and j < j_max:
        term = np.einsum("nm,m->n", At, term)
        V += term
        j += 1
    converged = bool(np.max(np.abs(term)) < tol)
    sol = _finish(pert, bg, lam, V + chi_tab, chi_tab, complex(floquet_w(borg, lam)), terms=j, converged=converged)
    if not converged:
        raise ConvergenceError(
            f"series did not reach tol={tol:g} in {j_max} terms at lam={lam!r}", partial=sol
        )
    return sol


def jost_value(pert: Perturbation, borg: BorgData, bg: Background, lam) -> complex:
    """Jost function ``v_0(lam)``."""
    return solve_backsub(pert, borg, bg, lam).jost_function


def jost_values(pert: Perturbation, borg: BorgData, bg: Background, lam, margin: float = POLE_MARGIN):
    """Vectorised ``v_0`` over an array of spectral parameters."""
    lam = _as_complex(lam)
    check_admissible(borg, lam, margin)
    size = pert.support + 3
    At = kernel_tilde_matrix(pert, borg, bg, lam, size)
    chi_tab = _chi_table(borg, bg, lam, size)
    vt = _scaled_backsub(At, chi_tab)
    return vt[0] if lam.ndim else vt[0][()]


def jost_table(pert: Perturbation, borg: BorgData, bg: Background, lam, margin: float = POLE_MARGIN):
    """Vectorised back-substitution returning ``(v_tilde, chi, w)``.

    ``v_tilde[n] = v_n w^{-n}`` and ``chi[n] = psi_n w^{-n}`` for
    ``n = 0..M+2``, each with the trailing shape of ``lam``.
    """
    lam = _as_complex(lam)
    check_admissible(borg, lam, margin)
    size = pert.support + 3
    At = kernel_tilde_matrix(pert, borg, bg, lam, size)
    chi_tab = _chi_table(borg, bg, lam, size)
    return _scaled_backsub(At, chi_tab), chi_tab, np.asarray(floquet_w(borg, lam))


def regularized_jost_values(pert: Perturbation, borg: BorgData, bg: Background, lam, margin: float = 1e-12):
    """Jost function with the Weyl pole removed.

    Equal to ``v_0`` when ``eps = -1`` and to ``(lam - nu) v_0`` when
    ``eps = +1``; its zeros off the continuous spectrum are exactly the
    eigenvalues of the perturbed matrix, including any at ``nu``.
    """
    lam = _as_complex(lam)
    if borg.eps == -1:
        return jost_values(pert, borg, bg, lam, margin)
    bad = borg.dist_to_band_edges(lam) < margin
    if np.any(bad):
        raise PoleProximityError(f"lam lies within {margin:g} of a band edge")
    # (lam - nu) chi_odd = reg_m / w has no pole; the solve is linear in chi
    size = pert.support + 3
    At = kernel_tilde_matrix(pert, borg, bg, lam, size)
    reg_m = np.asarray(weyl_regularized(borg, bg, lam)[0])
    rhs = np.empty((size,) + lam.shape, dtype=complex)
    rhs[0::2] = lam - borg.nu
    rhs[1::2] = reg_m / np.asarray(floquet_w(borg, lam))
    out = _scaled_backsub(At, rhs)[0]
    return out if lam.ndim else out[()]


def deviation_bound(pert: Perturbation, borg: BorgData, bg: Background, lam, n: int, params=None) -> float:
    """Upper bound for ``|v_n - psi_n|`` under a summable zero moment.

    ``K kappa0(n) |w|^n / |1 - w^4| * exp(K kappa0(n) / |1 - w^4|)`` with
    ``K = K2 |w| / |w^2 - w^{2eps}(nu)|``.
    """
    params = constants(borg) if params is None else params
    K, edge = jost_kernel_factor(borg, params, complex(lam))
    x = float(K) * moments(pert, bg).kappa0(n) / float(edge)
    return x * abs(complex(floquet_w(borg, lam))) ** n * math.exp(x)


def series_term_bound(pert: Perturbation, borg: BorgData, bg: Background, lam, n: int, j: int, params=None) -> float:
    """Factorial majorant ``x^j / (j-1)!`` for ``|V_{n,j}|``, ``x = K kappa0(n) / |1 - w^4|``."""
    params = constants(borg) if params is None else params
    K, edge = jost_kernel_factor(borg, params, complex(lam))
    x = float(K) * moments(pert, bg).kappa0(n) / float(edge)
    return x**j / math.factorial(j - 1)

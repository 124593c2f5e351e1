"""
A 2-periodic background from its Borg data.

Reconstruct the periodic coefficients from the band picture (two bands,
an eigenvalue nu in the gap or on its mirror sheet) and look at the
spectral functions that the rest of the package is built on.
"""

import numpy as np

from jacobi_spectra import BorgData, evaluate, floquet_w, reconstruct, weyl_solution

# %% Borg data and the periodic coefficients
borg = BorgData(s=1.0, d=3.0, nu=0.5, eps=1)
bg = reconstruct(borg)
print("bands        :", borg.band_edges)
print("a1, a2       :", bg.a1, bg.a2)
print("b1, b2       :", bg.b1, bg.b2)
print("a1 a2 vs (d^2-s^2)/4 :", bg.a1 * bg.a2, (borg.d**2 - borg.s**2) / 4)

# %% Floquet multiplier: |w| < 1 off the spectrum, |w| = 1 on it
for lam in [5.0, 2.0 + 0.0j, 0.3j, 10j]:
    w = floquet_w(borg, lam)
    print(f"lam = {lam!s:>8}  w = {complex(w):.6f}  |w| = {abs(w):.6f}")

# %% Spectral functions at one point
ev = evaluate(borg, bg, 5.0)
for k, v in ev.as_dict().items():
    print(f"{k:>12} : {v}")

# %% The Weyl solution decays geometrically like w^n
lam = 0.2 + 1.5j
w = complex(floquet_w(borg, lam))
psi = np.array([weyl_solution(borg, bg, lam, n) for n in range(1, 21)])
ratio = np.abs(psi[2:] / psi[:-2])
print("|psi_{n+2}/psi_n| :", np.round(ratio[:6], 12), " |w|^2 =", abs(w) ** 2)

"""
An explicit eigenvalue-free region.

For a perturbation with zero-th moment total0 the criterion
K(lam) * total0 < t marks a region of the plane free of eigenvalues.  We
scan it on a grid, draw it, and overlay the eigenvalues of a truncation
of the perturbed operator.

Needs matplotlib (``pip install -e .[demos]``); saves ``region.png``.
"""

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from jacobi_spectra import BorgData, Perturbation, Rect, constants, moments, reconstruct, scan, truncated_eigs
from jacobi_spectra.verify import random_perturbation

borg = BorgData(s=1.0, d=3.0, nu=0.5, eps=1)
bg = reconstruct(borg)
params = constants(borg)
print("K1, K2, t :", params.K1, params.K2, params.t)

# %% A random perturbation, scaled so that G covers about 30% of the grid
rect = Rect(-6.0, 6.0, -4.0, 4.0)
unit = scan(borg, params, 1.0, rect, nx=241, ny=161)
total0 = params.t / np.nanquantile(unit.lhs, 0.3)
shape = random_perturbation(bg, support=4, scale=1.0, rng=np.random.default_rng(3))
f = total0 / moments(shape, bg).total0
base = Perturbation.zero(bg, shape.support)
pert = Perturbation.from_deviations(bg, (shape.a - base.a) * f, (shape.b - base.b) * f, (shape.c - base.c) * f)
print("total0 :", moments(pert, bg).total0)

report = scan(borg, params, total0, rect, nx=241, ny=161)
print("fraction of grid in G :", np.mean(report.in_G))

# %% Eigenvalues from a finite section, filtered for stability
res = truncated_eigs(pert, borg, bg, truncation=200)
print("filtered eigenvalues :", res.filtered)

fig, ax = plt.subplots(figsize=(8, 5.5))
ax.imshow(
    report.in_G,
    origin="lower",
    extent=(rect.re_min, rect.re_max, rect.im_min, rect.im_max),
    cmap="Greens",
    alpha=0.6,
)
e = borg.band_edges
for lo, hi in [(e[0], e[1]), (e[2], e[3])]:
    ax.plot([lo, hi], [0, 0], "k", lw=3)
ax.plot(res.filtered.real, res.filtered.imag, "rx", ms=9, label="eigenvalues")
ax.set_xlabel("Re lam")
ax.set_ylabel("Im lam")
ax.legend()
fig.savefig("region.png", dpi=120, bbox_inches="tight")
print("wrote region.png")

"""
Two independent ways to find eigenvalues.

The finite-section oracle diagonalises a large truncation and keeps the
eigenvalues that are stable under doubling the size.  The Jost oracle
searches for zeros of the (regularised) Jost function with the argument
principle.  They share no code beyond the matrix entries.
"""

import numpy as np

from jacobi_spectra import BorgData, Circle, Rect, locate_zeros, reconstruct, truncated_eigs, winding
from jacobi_spectra.verify import random_perturbation

borg = BorgData(s=1.0, d=3.0, nu=0.5, eps=1)
bg = reconstruct(borg)
rng = np.random.default_rng(11)
pert = random_perturbation(bg, support=5, scale=2.0, rng=rng)

# %% Finite sections
res = truncated_eigs(pert, borg, bg, truncation=200)
print(f"{len(res.eigenvalues)} eigenvalues, {int(res.stable.sum())} stable, {len(res.filtered)} kept")
print("kept:", np.round(res.filtered, 8))

# %% Zero search on the Jost function
search = locate_zeros(pert, borg, bg, Rect(-8.0, 8.1, -8.0, 8.3), res.delta)
zeros = np.array(search.zeros)
print("zeros:", np.round(zeros, 8))
for z in res.filtered:
    print(f"  {z:.8f}  nearest zero at distance {np.min(np.abs(zeros - z)):.1e}")

# %% Winding number around each eigenvalue
for z in res.filtered:
    r = 0.5 * min(res.delta, np.min(np.abs(np.delete(res.filtered, np.argmin(np.abs(res.filtered - z))) - z), initial=1.0))
    wr = winding(pert, borg, bg, Circle(complex(z), r))
    print(f"  winding around {z:.4f} (r = {r:.3f}) : {wr.zeros_inside}")

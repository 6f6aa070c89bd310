"""
Perturbation orders in the weak-field limit
===========================================

Compare first-order, closed-form second-order, and extended
(matrix-diagonalization) manifold energies as the fields are scaled
down together.  The extended route and the closed-form second order
agree ever better as the coupling weakens; first order alone misses
the quadratic Zeeman and Stark shifts.
"""

import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from crossedfields import FieldParams, conventional_spectrum, ebeta_scan

n = 7
beta = np.deg2rad(30.0)

# shrink both fields together; gamma ~ f * n so neither term dominates
scales = np.logspace(0, -3, 13)
gamma0, f0 = 2.0e-6, 3.0e-7

dev1 = np.empty_like(scales)
dev2 = np.empty_like(scales)
for i, s in enumerate(scales):
    p = FieldParams(gamma=gamma0 * s, f=f0 * s, beta=beta)
    ext = ebeta_scan(n, p.gamma, p.f, np.array([beta])).energies[0]
    e1 = np.sort(conventional_spectrum(n, p, order=1))
    e2 = np.sort(conventional_spectrum(n, p, order=2))
    # worst-case level deviation, normalized by the manifold spread
    spread = ext.max() - ext.min()
    dev1[i] = np.abs(e1 - ext).max() / spread
    dev2[i] = np.abs(e2 - ext).max() / spread

fig, ax = plt.subplots(figsize=(6, 4.5))
ax.loglog(scales, dev1, "o-", label="first order")
ax.loglog(scales, dev2, "s-", label="second order (closed form)")
ax.loglog(scales, scales * dev1[0], ":k", lw=0.8, label=r"$\propto$ field")
ax.loglog(scales, scales**2 * dev2[0], "--k", lw=0.8, label=r"$\propto$ field$^2$")
ax.set_xlabel("field scale factor")
ax.set_ylabel("max level deviation / manifold spread")
ax.legend()
fig.tight_layout()
fig.savefig("weak_field_orders.png", dpi=150)
print("wrote weak_field_orders.png")

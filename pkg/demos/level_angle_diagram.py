"""
Manifold energies versus field angle
====================================

Diagonalize the intramanifold Hamiltonian of the n = 8 shell at
B = 100 T, F = 50 kV/cm for field angles from parallel to perpendicular
and plot the resulting level-angle diagram.  Levels repel strongly in a
band of intermediate angles and cross or nearly cross at the ends.
"""

import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from crossedfields import ebeta_scan, energy_to_cm1, f_from_kv_per_cm, gamma_from_tesla

n = 8
gamma = gamma_from_tesla(100.0)
f = f_from_kv_per_cm(50.0)

# one energy curve per manifold state, 64 in total for n = 8
betas = np.deg2rad(np.linspace(0.0, 90.0, 361))
scan = ebeta_scan(n, gamma, f, betas)

fig, ax = plt.subplots(figsize=(7, 5))
bdeg = np.rad2deg(scan.betas)
for k in range(scan.energies.shape[1]):
    ax.plot(bdeg, energy_to_cm1(scan.energies[:, k]), lw=0.6, color="C0")

ax.set_xlabel(r"$\beta$ (degrees)")
ax.set_ylabel(r"energy (cm$^{-1}$)")
ax.set_title(f"n = {n} manifold, B = 100 T, F = 50 kV/cm")
fig.tight_layout()
fig.savefig("level_angle_diagram.png", dpi=150)
print("wrote level_angle_diagram.png")

"""
Poincare sections of the secular pseudospin dynamics
====================================================

Sections at phi2 = 0 for two field-strength regimes.  At weak scaled
fields every angle gives thin invariant curves.  At stronger fields the
picture depends on the angle between the fields: near-parallel and
perpendicular stay regular while intermediate angles develop large
chaotic seas.
"""

import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from crossedfields import ScaledParams, psos
from crossedfields.classical import default_seed_grid

seeds = default_seed_grid(8, 8)

# weak fields: regular at every angle (two samples)
weak = [(0.053, 0.0061, b) for b in (0.0, 45.0)]
# stronger fields: angle decides the character
strong = [(0.74, 0.2, b) for b in (20.0, 60.0)]

fig, axes = plt.subplots(2, 2, figsize=(9, 8), sharex=True, sharey=True)
for ax, (sg, sf, bdeg) in zip(axes.flat, weak + strong):
    params = ScaledParams(sg, sf, np.deg2rad(bdeg))
    section = psos(params, -0.5, seeds=seeds, max_crossings=120)
    for orbit in section.orbits:
        ax.plot(orbit.phi1, orbit.j1z, ".", ms=0.8)
    ax.set_title(f"$n^3\\gamma$={sg}, $n^4 f$={sf}, $\\beta$={bdeg:.0f}$^\\circ$",
                 fontsize=10)
    print(f"beta={bdeg:5.1f} sg={sg}: {len(section.orbits)} orbits, "
          f"{section.skipped_seeds} seeds off shell")

for ax in axes[-1]:
    ax.set_xlabel(r"$\varphi_1$")
for ax in axes[:, 0]:
    ax.set_ylabel(r"$J_{1z}$")
axes[0, 0].set_xlim(-np.pi, np.pi)
axes[0, 0].set_ylim(-0.5, 0.5)
fig.tight_layout()
fig.savefig("poincare_sections.png", dpi=150)
print("wrote poincare_sections.png")

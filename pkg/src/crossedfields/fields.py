"""Field strengths, unit conversions and the pseudospin precession vectors.

Atomic units are used throughout the package.  The reduced magnetic field
``gamma`` and reduced electric field ``f`` are the field strengths in atomic
units; the magnetic field defines the z axis and the electric field lies in
the (x, z) plane at angle ``beta`` to it, so ``beta = 0`` means parallel
fields and ``beta = pi/2`` perpendicular ones.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateFrameError

# One atomic unit of magnetic field strength expressed in tesla and one
# atomic unit of electric field strength in V/cm, rounded to the three
# significant digits conventional in the Rydberg literature.
TESLA_PER_AU = 2.35e5
VOLT_PER_CM_PER_AU = 5.14e9

# Wavenumbers per hartree.
CM1_PER_HARTREE = 219474.63


def gamma_from_tesla(b_tesla: float) -> float:
    """Reduced magnetic field strength for a lab field in tesla."""
    return b_tesla / TESLA_PER_AU


def f_from_kv_per_cm(f_kv_per_cm: float) -> float:
    """Reduced electric field strength for a lab field in kV/cm."""
    return f_kv_per_cm * 1e3 / VOLT_PER_CM_PER_AU


def energy_to_cm1(energy_au):
    """Convert an energy (scalar or array) from hartree to wavenumbers."""
    return energy_au * CM1_PER_HARTREE


def stark_saddle_energy(f: float) -> float:
    """Energy of the Stark saddle point, -2 sqrt(f), for field strength f >= 0.

    Above this energy the electron can escape over the potential barrier on
    the downfield side; bound-state calculations in this package are only
    meaningful below it.
    """
    if f < 0:
        raise ValueError(f"electric field strength must be >= 0, got {f}")
    return -2.0 * math.sqrt(f)


@dataclass(frozen=True)
class FieldParams:
    """Reduced field strengths gamma, f and the mutual angle beta in radians.

    The magnetic field points along +z; the electric field direction is
    (sin beta, 0, cos beta).
    """

    gamma: float
    f: float
    beta: float = 0.0

    def __post_init__(self):
        if self.gamma < 0 or self.f < 0:
            raise ValueError(
                f"field strengths must be >= 0, got gamma={self.gamma}, f={self.f}"
            )
        if not 0.0 <= self.beta <= math.pi:
            raise ValueError(f"beta must lie in [0, pi], got {self.beta}")

    @classmethod
    def from_lab(cls, b_tesla: float, f_kv_per_cm: float, beta_deg: float) -> "FieldParams":
        """Build from a magnetic field in tesla and an electric field in kV/cm."""
        return cls(
            gamma=gamma_from_tesla(b_tesla),
            f=f_from_kv_per_cm(f_kv_per_cm),
            beta=math.radians(beta_deg),
        )

    @property
    def f_par(self) -> float:
        """Electric field component along the magnetic field axis."""
        return self.f * math.cos(self.beta)

    @property
    def f_perp(self) -> float:
        """Electric field component perpendicular to the magnetic field axis."""
        return self.f * math.sin(self.beta)

    @property
    def f_vec(self) -> np.ndarray:
        return np.array([self.f_perp, 0.0, self.f_par])

    @property
    def gamma_vec(self) -> np.ndarray:
        return np.array([0.0, 0.0, self.gamma])


@dataclass(frozen=True)
class OmegaPair:
    """The two pseudospin precession vectors of a hydrogen n manifold.

    In first order the two conserved vectors I1 and I2 of the manifold
    precess about omega1 and omega2 respectively.  Both vectors lie in the
    (x, z) plane.
    """

    omega1: np.ndarray
    omega2: np.ndarray

    @property
    def norm1(self) -> float:
        return float(np.linalg.norm(self.omega1))

    @property
    def norm2(self) -> float:
        return float(np.linalg.norm(self.omega2))

    def axis(self, which: int) -> np.ndarray:
        """Unit vector along omega1 (which=1) or omega2 (which=2)."""
        vec = self.omega1 if which == 1 else self.omega2
        norm = np.linalg.norm(vec)
        if norm == 0.0:
            raise DegenerateFrameError(
                f"omega{which} vanishes; the precession axis is undefined"
            )
        return vec / norm

    @property
    def nearly_degenerate(self) -> bool:
        """True when |omega1| and |omega2| agree to one part in 1e12."""
        scale = max(self.norm1, self.norm2)
        return scale == 0.0 or abs(self.norm1 - self.norm2) <= 1e-12 * scale


def omega_vectors(n: int, params: FieldParams) -> OmegaPair:
    """Precession vectors omega_{1,2} = (gamma zhat -/+ 3 n f_vec) / 2.

    For perpendicular fields the two norms coincide at
    sqrt(gamma^2 + 9 n^2 f^2) / 2, which is the degenerate case excluded
    from the closed-form second-order energy.
    """
    if n < 1:
        raise ValueError(f"principal quantum number must be >= 1, got {n}")
    gvec = params.gamma_vec
    fvec = 3.0 * n * params.f_vec
    return OmegaPair(omega1=0.5 * (gvec - fvec), omega2=0.5 * (gvec + fvec))

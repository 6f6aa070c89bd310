"""Pseudospin algebra of a hydrogen n manifold.

The n^2 degenerate states of a field-free hydrogen manifold carry two
commuting angular-momentum-like vectors I1 = (L + A)/2 and I2 = (L - A)/2
built from the orbital angular momentum L and the scaled Runge-Lenz vector
A.  Both behave as spins of length j = (n - 1)/2, so every intramanifold
operator can be written with Kronecker products of standard spin-j matrices.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


def angular_momentum_matrices(j: float) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Spin matrices (jx, jy, jz) for spin j in the basis |j m>, m ascending.

    j may be integer or half integer.  jz is diagonal with entries -j..j,
    and the ladder elements are <m+1|J+|m> = sqrt(j(j+1) - m(m+1)).
    """
    twoj = round(2 * j)
    if twoj < 0 or abs(2 * j - twoj) > 1e-12:
        raise ValueError(f"j must be a nonnegative integer or half integer, got {j}")
    dim = twoj + 1
    m = -j + np.arange(dim)
    jz = np.diag(m).astype(complex)
    ladder = np.sqrt(j * (j + 1) - m[:-1] * (m[:-1] + 1))
    jplus = np.zeros((dim, dim), dtype=complex)
    jplus[np.arange(1, dim), np.arange(dim - 1)] = ladder
    jx = 0.5 * (jplus + jplus.T)
    jy = -0.5j * (jplus - jplus.T)
    return jx, jy, jz


@dataclass(frozen=True)
class ManifoldBasis:
    """Product basis |m1 m2> of a manifold, m1-major lexicographic order.

    m1 and m2 are the projections of I1 and I2 on the z axis; each runs
    over -j..j with j = (n - 1)/2, giving n^2 states.
    """

    n: int
    m1: np.ndarray
    m2: np.ndarray

    @property
    def j(self) -> float:
        return (self.n - 1) / 2

    @property
    def size(self) -> int:
        return self.n * self.n


def build_basis(n: int) -> ManifoldBasis:
    """Enumerate the n^2 product states of manifold n."""
    if n < 1:
        raise ValueError(f"principal quantum number must be >= 1, got {n}")
    j = (n - 1) / 2
    m = -j + np.arange(n)
    m1 = np.repeat(m, n)
    m2 = np.tile(m, n)
    return ManifoldBasis(n=n, m1=m1, m2=m2)


@dataclass(frozen=True)
class ManifoldOperators:
    """Matrices of the pseudospin components on the |m1 m2> basis."""

    n: int
    i1x: np.ndarray
    i1y: np.ndarray
    i1z: np.ndarray
    i2x: np.ndarray
    i2y: np.ndarray
    i2z: np.ndarray

    @property
    def i1(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        return self.i1x, self.i1y, self.i1z

    @property
    def i2(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        return self.i2x, self.i2y, self.i2z


def manifold_operators(n: int) -> ManifoldOperators:
    """Pseudospin component matrices I1k = Jk x 1 and I2k = 1 x Jk."""
    if n < 1:
        raise ValueError(f"principal quantum number must be >= 1, got {n}")
    jx, jy, jz = angular_momentum_matrices((n - 1) / 2)
    eye = np.eye(n, dtype=complex)
    return ManifoldOperators(
        n=n,
        i1x=np.kron(jx, eye),
        i1y=np.kron(jy, eye),
        i1z=np.kron(jz, eye),
        i2x=np.kron(eye, jx),
        i2y=np.kron(eye, jy),
        i2z=np.kron(eye, jz),
    )

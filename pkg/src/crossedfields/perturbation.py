"""Intramanifold perturbation theory for a hydrogen n manifold.

Two routes are provided.  The conventional route gives closed-form first and
second order energies for the product states aligned with the two precession
vectors; it breaks down once those states are strongly mixed, and its second
order form is undefined for perpendicular fields where the two precession
frequencies coincide.  The extended route assembles the full effective
intramanifold Hamiltonian

    H_eff = -1/(2 n^2) + V1 + V2 + W

with the paramagnetic and linear Stark part V1 (linear in the pseudospins),
the diamagnetic part V2 and the second-order Stark part W (both quadratic),
and diagonalizes it numerically.  The extended route remains valid at any
mutual angle including the perpendicular degeneracy.

V2 and W are fixed polynomials in the conserved vectors L and A:

    V2 = (n^2 gamma^2 / 16) (n^2 + 3 + Lz^2 + 4 A^2 - 5 Az^2)
    W  = -(n^4 f^2 / 16) (5 n^2 + 31 + 24 L^2 - 21 Lf^2 + 9 Af^2)

where the f subscript denotes the projection on the electric field axis.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from .errors import UnsupportedConfigurationError
from .fields import FieldParams, omega_vectors
from .manifold import ManifoldOperators

__all__ = [
    "manifold_labels",
    "first_order_energy",
    "second_order_energy_conventional",
    "conventional_spectrum",
    "build_extended_matrix",
    "diagonalize_manifold",
    "EbetaScan",
    "ebeta_scan",
    "GapMinimum",
    "min_gap_analysis",
]


def _check_label(n: int, label: float, name: str) -> None:
    j = (n - 1) / 2
    if abs(label) > j + 1e-9 or abs((label + j) - round(label + j)) > 1e-9:
        raise ValueError(f"{name} must be one of -{j}..{j} in integer steps, got {label}")


def manifold_labels(n: int) -> tuple[np.ndarray, np.ndarray]:
    """All n^2 label pairs (n', n'') in n'-major order, each running -j..j."""
    j = (n - 1) / 2
    lab = -j + np.arange(n)
    return np.repeat(lab, n), np.tile(lab, n)


def first_order_energy(n: int, params: FieldParams, nprime: float, ndouble: float) -> float:
    """First-order energy shift omega1 n' + omega2 n''.

    n' and n'' are the projections of the pseudospins on their respective
    precession axes and run over -j..j with j = (n - 1)/2.
    """
    _check_label(n, nprime, "nprime")
    _check_label(n, ndouble, "ndouble")
    pair = omega_vectors(n, params)
    return pair.norm1 * nprime + pair.norm2 * ndouble


def _angles_from_z(pair) -> tuple[float, float, float, float]:
    """Unsigned angles of the two precession vectors from the z axis."""
    for which in (1, 2):
        pair.axis(which)  # raises DegenerateFrameError on a zero vector
    ca1 = pair.omega1[2] / pair.norm1
    ca2 = pair.omega2[2] / pair.norm2
    sa1 = abs(pair.omega1[0]) / pair.norm1
    sa2 = abs(pair.omega2[0]) / pair.norm2
    return ca1, sa1, ca2, sa2


def second_order_energy_conventional(
    n: int, params: FieldParams, nprime: float, ndouble: float
) -> float:
    """Closed-form second-order energy of the state labelled (n', n'').

    The expression is the expectation value of V2 + W in the product state
    aligned with the two precession vectors, written in terms of the angles
    alpha_1,2 between the magnetic field axis and those vectors.  It is
    invalid when the two precession frequencies coincide with non-collinear
    axes (perpendicular fields), where the aligned product states are no
    longer the correct zeroth-order states.
    """
    _check_label(n, nprime, "nprime")
    _check_label(n, ndouble, "ndouble")
    pair = omega_vectors(n, params)
    ca1, sa1, ca2, sa2 = _angles_from_z(pair)
    if pair.nearly_degenerate:
        cross = pair.omega1[2] * pair.omega2[0] - pair.omega1[0] * pair.omega2[2]
        collinear = abs(cross) <= 1e-12 * pair.norm1 * pair.norm2
        if not collinear:
            raise UnsupportedConfigurationError(
                "degenerate precession frequencies with non-collinear axes "
                "(perpendicular fields): the closed-form second order does not "
                "apply, use the extended route"
            )
    n2 = n * n
    ef = -(n2 * n2 * params.f ** 2 / 16.0) * (
        17 * n2
        + 19
        - 12.0 * (nprime ** 2 + nprime * ndouble * (ca1 * ca2 - sa1 * sa2) + ndouble ** 2)
    )
    eg = (n2 * params.gamma ** 2 / 48.0) * (
        7 * n2
        + 5
        + 4.0 * nprime * ndouble * sa1 * sa2
        + (n2 - 1) * (ca1 ** 2 + ca2 ** 2)
        - 12.0 * (nprime ** 2 * ca1 ** 2 - nprime * ndouble * ca1 * ca2 + ndouble ** 2 * ca2 ** 2)
    )
    return ef + eg


def conventional_spectrum(n: int, params: FieldParams, order: int = 2) -> np.ndarray:
    """All n^2 conventional energies -1/(2n^2) + E1 (+ E2), in label order.

    Label order matches manifold_labels.  order=1 stops after the linear
    term and is safe at any angle; order=2 adds the closed second order.
    """
    if order not in (1, 2):
        raise ValueError(f"order must be 1 or 2, got {order}")
    labels1, labels2 = manifold_labels(n)
    base = -1.0 / (2.0 * n * n)
    out = np.empty(n * n)
    for k, (a, b) in enumerate(zip(labels1, labels2)):
        e = base + first_order_energy(n, params, a, b)
        if order == 2:
            e += second_order_energy_conventional(n, params, a, b)
        out[k] = e
    return out


def _spin_parts(n: int) -> tuple[sp.csr_matrix, sp.csr_matrix, sp.csr_matrix]:
    """Real building blocks of the spin-j matrices: Jx, Y (Jy = i Y), Jz."""
    j = (n - 1) / 2
    m = -j + np.arange(n)
    ladder = np.sqrt(j * (j + 1) - m[:-1] * (m[:-1] + 1))
    jx = sp.diags([0.5 * ladder, 0.5 * ladder], [-1, 1], format="csr")
    y = sp.diags([-0.5 * ladder, 0.5 * ladder], [-1, 1], format="csr")
    jz = sp.diags(m, 0, format="csr")
    return jx, y, jz


def _extended_real(n: int, params: FieldParams) -> np.ndarray:
    """Assemble H_eff in real arithmetic via sparse Kronecker products.

    Exploits that only the product I1y I2y involves the y components and
    that Jy = i Y with Y real antisymmetric, so I1y I2y = -kron(Y, Y).
    """
    jx, y, jz = _spin_parts(n)
    eye = sp.identity(n, format="csr")
    eye2 = sp.identity(n * n, format="csr")
    c = (n * n - 1) / 4.0
    sb, cb = math.sin(params.beta), math.cos(params.beta)

    i1x, i2x = sp.kron(jx, eye, format="csr"), sp.kron(eye, jx, format="csr")
    i1z, i2z = sp.kron(jz, eye, format="csr"), sp.kron(eye, jz, format="csr")

    pair = omega_vectors(n, params)
    v1 = (
        pair.omega1[0] * i1x
        + pair.omega1[2] * i1z
        + pair.omega2[0] * i2x
        + pair.omega2[2] * i2z
    )

    lz = i1z + i2z
    az = i1z - i2z
    dot12 = sp.kron(jx, jx, format="csr") - sp.kron(y, y, format="csr") + sp.kron(jz, jz, format="csr")
    a2 = 2 * c * eye2 - 2 * dot12
    l2 = 2 * c * eye2 + 2 * dot12
    lf = sb * (i1x + i2x) + cb * lz
    af = sb * (i1x - i2x) + cb * az

    n2 = n * n
    v2 = (n2 * params.gamma ** 2 / 16.0) * ((n2 + 3) * eye2 + lz @ lz + 4 * a2 - 5 * az @ az)
    w = -(n2 * n2 * params.f ** 2 / 16.0) * (
        (5 * n2 + 31) * eye2 + 24 * l2 - 21 * (lf @ lf) + 9 * (af @ af)
    )

    mat = (-1.0 / (2.0 * n2)) * eye2 + v1 + v2 + w
    return mat.toarray()


def _extended_from_ops(n: int, params: FieldParams, ops: ManifoldOperators) -> np.ndarray:
    """Assemble H_eff from explicit pseudospin matrices (complex route)."""
    if ops.n != n:
        raise ValueError(f"operators built for n={ops.n}, requested n={n}")
    dim = n * n
    eye = np.eye(dim, dtype=complex)
    c = (dim - 1) / 4.0
    sb, cb = math.sin(params.beta), math.cos(params.beta)

    pair = omega_vectors(n, params)
    v1 = (
        pair.omega1[0] * ops.i1x
        + pair.omega1[2] * ops.i1z
        + pair.omega2[0] * ops.i2x
        + pair.omega2[2] * ops.i2z
    )
    lz = ops.i1z + ops.i2z
    az = ops.i1z - ops.i2z
    dot12 = ops.i1x @ ops.i2x + ops.i1y @ ops.i2y + ops.i1z @ ops.i2z
    a2 = 2 * c * eye - 2 * dot12
    l2 = 2 * c * eye + 2 * dot12
    lf = sb * (ops.i1x + ops.i2x) + cb * lz
    af = sb * (ops.i1x - ops.i2x) + cb * az

    v2 = (dim * params.gamma ** 2 / 16.0) * ((dim + 3) * eye + lz @ lz + 4 * a2 - 5 * az @ az)
    w = -(dim * dim * params.f ** 2 / 16.0) * (
        (5 * dim + 31) * eye + 24 * l2 - 21 * (lf @ lf) + 9 * (af @ af)
    )
    mat = (-1.0 / (2.0 * dim)) * eye + v1 + v2 + w

    worst = np.abs(mat.imag).max()
    if worst > 1e-12:
        raise AssertionError(
            f"extended matrix acquired imaginary parts up to {worst:.3e}; "
            "the assembly is broken"
        )
    return np.ascontiguousarray(mat.real)


def build_extended_matrix(
    n: int, params: FieldParams, ops: ManifoldOperators | None = None
) -> np.ndarray:
    """Real symmetric matrix of H_eff on the n^2 product basis.

    Without ops the matrix is assembled in purely real arithmetic through
    sparse Kronecker products, which is the cheap route for the n = 50..60
    manifolds of the statistics pipeline.  Passing explicit ManifoldOperators
    forces the direct complex assembly; both routes agree to machine
    precision and the complex one verifies that every imaginary part cancels.
    """
    if n < 1:
        raise ValueError(f"principal quantum number must be >= 1, got {n}")
    if ops is None:
        return _extended_real(n, params)
    return _extended_from_ops(n, params, ops)


def diagonalize_manifold(mat: np.ndarray, symmetry_tol: float = 1e-10) -> np.ndarray:
    """Eigenvalues of an extended matrix, ascending.

    Rejects matrices whose asymmetry exceeds symmetry_tol relative to the
    largest element, rather than silently symmetrizing them.
    """
    mat = np.asarray(mat)
    if mat.ndim != 2 or mat.shape[0] != mat.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {mat.shape}")
    scale = max(np.abs(mat).max(), 1.0)
    asym = np.abs(mat - mat.T).max() / scale
    if asym > symmetry_tol:
        raise ValueError(
            f"matrix asymmetry {asym:.3e} exceeds tolerance {symmetry_tol:.3e}"
        )
    return np.linalg.eigvalsh(mat)


@dataclass(frozen=True)
class EbetaScan:
    """Extended-route manifold energies on a grid of mutual angles."""

    n: int
    gamma: float
    f: float
    betas: np.ndarray
    energies: np.ndarray  # shape (len(betas), n^2), each row ascending


def ebeta_scan(n: int, gamma: float, f: float, betas: np.ndarray) -> EbetaScan:
    """Diagonalize the extended matrix at every angle of a beta grid."""
    betas = np.asarray(betas, dtype=float)
    if betas.ndim != 1 or betas.size == 0:
        raise ValueError("betas must be a non-empty 1-d array of angles in radians")
    energies = np.empty((betas.size, n * n))
    for k, beta in enumerate(betas):
        params = FieldParams(gamma=gamma, f=f, beta=float(beta))
        energies[k] = diagonalize_manifold(build_extended_matrix(n, params))
    return EbetaScan(n=n, gamma=gamma, f=f, betas=betas, energies=energies)


@dataclass(frozen=True)
class GapMinimum:
    """A local minimum of the gap between adjacent levels over the scan."""

    lower_level: int  # gap is between levels lower_level and lower_level + 1
    beta: float  # refined angle of closest approach, radians
    gap: float  # refined gap in hartree
    grid_index: int  # index of the grid point that seeded the refinement


def min_gap_analysis(scan: EbetaScan) -> list[GapMinimum]:
    """Locate avoided crossings in an angle scan.

    For every adjacent level pair the gap g(beta) is scanned for interior
    local minima; each one is refined with the vertex of the parabola through
    the three surrounding points.  Refined angles are clamped to the
    bracketing interval and refined gaps floored at zero.
    """
    minima: list[GapMinimum] = []
    betas = scan.betas
    if betas.size < 3:
        return minima
    gaps = np.diff(scan.energies, axis=1)  # (nbeta, n^2 - 1)
    for pair in range(gaps.shape[1]):
        g = gaps[:, pair]
        for k in range(1, betas.size - 1):
            if not (g[k] < g[k - 1] and g[k] <= g[k + 1]):
                continue
            denom = g[k + 1] - 2.0 * g[k] + g[k - 1]
            if denom <= 0.0:
                beta_star, gap_star = betas[k], g[k]
            else:
                # parabola through the three bracketing points
                delta = 0.5 * (g[k - 1] - g[k + 1]) / denom
                delta = min(max(delta, -1.0), 1.0)
                beta_star = betas[k] + delta * (betas[k + 1] - betas[k])
                gap_star = g[k] - 0.25 * (g[k - 1] - g[k + 1]) * delta
            minima.append(
                GapMinimum(
                    lower_level=pair,
                    beta=float(beta_star),
                    gap=float(max(gap_star, 0.0)),
                    grid_index=k,
                )
            )
    minima.sort(key=lambda m: (m.beta, m.lower_level))
    return minima

"""Exact bound-state diagonalization in dilated semiparabolic coordinates.

The Schroedinger equation for hydrogen in static magnetic and electric
fields, written in semiparabolic coordinates (mu, nu, phi) dilated by a
length parameter b, becomes a linear generalized eigenvalue problem

    H psi = lambda B psi,      lambda = -(1 + 2 b^4 E),

where B represents mu^2 + nu^2 and H collects the kinetic terms, the
Coulomb constant 4 b^2, the paramagnetic, diamagnetic and Stark couplings.
Expanded over products of two-dimensional oscillator eigenfunctions
|N_mu m> x |N_nu m> (both factors share the azimuthal quantum number m),
every block of H and B is a short band of exact oscillator matrix elements:

    H = sum of
        diag(4 b^2 - 4 (N_mu + N_nu + |m| + 1))            kinetic + Coulomb
        - b^4 gamma m (mu^2 + nu^2)                        paramagnetic
        - (b^4 gamma)^2 / 4 (mu^4 nu^2 + mu^2 nu^4)        diamagnetic
        - b^6 f_par (mu^4 - nu^4)                          parallel Stark
        - b^6 f_perp (mu^3 nu + mu nu^3) between m, m+/-1  perpendicular Stark

Both matrices are real symmetric and B is positive definite, so the bound
part of the spectrum comes out of a shift-invert Lanczos run in lambda.
Only energies below the Stark saddle are trustworthy; the method sees field
ionization only through slow basis-size drift, not through widths.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp
from scipy.sparse.linalg import ArpackNoConvergence, eigsh

from .errors import NumericalError
from .fields import FieldParams
from .oscillator import rho2_matrix, rho3_step_up, rho4_matrix, rho_step_up

__all__ = [
    "OscBasisState",
    "TruncationScheme",
    "GeneralizedPair",
    "enumerate_basis",
    "assemble_matrices",
    "BoundStates",
    "solve_bound_states",
    "convergence_scan",
]


@dataclass(frozen=True)
class OscBasisState:
    """One product state |N_mu m> x |N_nu m> of the expansion basis."""

    n_mu: int
    n_nu: int
    m: int

    @property
    def quanta(self) -> int:
        """Total oscillator excitation 2 N_mu + 2 N_nu + 2|m|."""
        return 2 * self.n_mu + 2 * self.n_nu + 2 * abs(self.m)


@dataclass(frozen=True)
class TruncationScheme:
    """Basis cutoff: all states with quanta <= max_quanta and m in a window."""

    max_quanta: int
    m_min: int = 0
    m_max: int = 0

    def __post_init__(self):
        if self.max_quanta < 0:
            raise ValueError(f"max_quanta must be >= 0, got {self.max_quanta}")
        if self.m_min > self.m_max:
            raise ValueError(f"empty m window [{self.m_min}, {self.m_max}]")

    @classmethod
    def for_manifold(cls, n: int, extra_quanta: int = 30, m_pad: int = 2) -> "TruncationScheme":
        """A scheme wide enough for manifold n with some convergence margin."""
        return cls(
            max_quanta=2 * (n - 1) + extra_quanta,
            m_min=-(n - 1) - m_pad,
            m_max=(n - 1) + m_pad,
        )

    def m_values(self) -> list[int]:
        """The m window ordered by (|m|, m), matching the basis layout."""
        return sorted(range(self.m_min, self.m_max + 1), key=lambda m: (abs(m), m))

    def radial_cap(self, m: int) -> int:
        """Largest allowed N_mu + N_nu at this m, or -1 if the block is empty."""
        return (self.max_quanta - 2 * abs(m)) // 2 if 2 * abs(m) <= self.max_quanta else -1


def enumerate_basis(trunc: TruncationScheme) -> list[OscBasisState]:
    """Basis states sorted by (|m|, m, N_mu + N_nu, N_mu)."""
    states: list[OscBasisState] = []
    for m in trunc.m_values():
        cap = trunc.radial_cap(m)
        for nsum in range(cap + 1):
            for n_mu in range(nsum + 1):
                states.append(OscBasisState(n_mu=n_mu, n_nu=nsum - n_mu, m=m))
    return states


def _triangular_selector(cap: int) -> np.ndarray:
    """Rectangular-grid indices of the (N_sum, N_mu)-ordered triangular basis."""
    idx = []
    for nsum in range(cap + 1):
        for n_mu in range(nsum + 1):
            idx.append(n_mu * (cap + 1) + (nsum - n_mu))
    return np.array(idx, dtype=int)


@dataclass(frozen=True)
class GeneralizedPair:
    """Assembled pencil (H, B) with its basis and build parameters."""

    h: sp.csr_matrix
    b: sp.csr_matrix
    basis: list[OscBasisState]
    b_length: float
    params: FieldParams

    @property
    def size(self) -> int:
        return self.h.shape[0]

    def lam_to_energy(self, lam):
        """Map generalized eigenvalues lambda to energies in hartree."""
        return -(1.0 + np.asarray(lam)) / (2.0 * self.b_length ** 4)

    def energy_to_lam(self, energy: float) -> float:
        return -(1.0 + 2.0 * self.b_length ** 4 * energy)


def assemble_matrices(
    params: FieldParams, trunc: TruncationScheme, b_length: float
) -> GeneralizedPair:
    """Build the sparse pencil (H, B) for the given fields and basis cutoff.

    Parameters
    ----------
    params : FieldParams
        Reduced field strengths and mutual angle.
    trunc : TruncationScheme
        Basis cutoff.  The m window must span the states of interest; with
        f_perp != 0 neighbouring m blocks are coupled, so leave padding.
    b_length : float
        Dilation parameter b of the semiparabolic coordinates.  b^2 equal to
        the principal quantum number of interest makes that manifold's
        oscillator quanta resonant and is the default used elsewhere.
    """
    if b_length <= 0:
        raise ValueError(f"b_length must be > 0, got {b_length}")
    b2 = b_length ** 2
    b4g = b2 * b2 * params.gamma
    b6 = b2 ** 3
    mvals = trunc.m_values()
    nonempty = [m for m in mvals if trunc.radial_cap(m) >= 0]
    if not nonempty:
        raise ValueError("truncation admits no basis states")

    caps = {m: trunc.radial_cap(m) for m in nonempty}
    sel = {m: _triangular_selector(caps[m]) for m in nonempty}
    block_of = {m: k for k, m in enumerate(nonempty)}
    nblocks = len(nonempty)
    hblocks = [[None] * nblocks for _ in range(nblocks)]
    bblocks = [[None] * nblocks for _ in range(nblocks)]

    for m in nonempty:
        cap = caps[m]
        alpha = abs(m)
        size = cap + 1
        x2 = rho2_matrix(alpha, size)
        x4 = rho4_matrix(alpha, size)
        one = sp.identity(size, format="csr")
        ix = sel[m]

        bmat = sp.kron(x2, one) + sp.kron(one, x2)
        nmu = np.repeat(np.arange(size), size)
        nnu = np.tile(np.arange(size), size)
        diag = 4.0 * b2 - 4.0 * (nmu + nnu + alpha + 1.0)
        hmat = (
            sp.diags(diag, 0)
            - b4g * m * bmat
            - 0.25 * b4g * b4g * (sp.kron(x4, x2) + sp.kron(x2, x4))
            - b6 * params.f_par * (sp.kron(x4, one) - sp.kron(one, x4))
        )
        k = block_of[m]
        hblocks[k][k] = hmat.tocsr()[ix][:, ix]
        bblocks[k][k] = bmat.tocsr()[ix][:, ix]

    if params.f_perp != 0.0:
        for m in nonempty:
            if m + 1 not in block_of:
                continue
            lo, hi = block_of[m], block_of[m + 1]
            rows, cols = caps[m + 1] + 1, caps[m] + 1
            if abs(m + 1) == abs(m) + 1:
                t1 = rho_step_up(abs(m), rows, cols)
                t3 = rho3_step_up(abs(m), rows, cols)
            else:  # |m| decreases by one going to m + 1 (negative m side)
                t1 = rho_step_up(abs(m + 1), cols, rows).T.tocsr()
                t3 = rho3_step_up(abs(m + 1), cols, rows).T.tocsr()
            coup = -b6 * params.f_perp * (sp.kron(t3, t1) + sp.kron(t1, t3))
            coup = coup.tocsr()[sel[m + 1]][:, sel[m]]
            hblocks[hi][lo] = coup
            hblocks[lo][hi] = coup.T.tocsr()

    h = sp.bmat(hblocks, format="csr")
    b = sp.bmat(bblocks, format="csr")
    return GeneralizedPair(
        h=h, b=b, basis=enumerate_basis(trunc), b_length=b_length, params=params
    )


@dataclass(frozen=True)
class BoundStates:
    """Converged eigenpairs of one shift-invert run, energies ascending."""

    energies: np.ndarray
    lam: np.ndarray
    b_length: float
    basis_size: int
    converged: bool
    shift_energy: float
    params: FieldParams = field(repr=False)


def solve_bound_states(
    params: FieldParams,
    trunc: TruncationScheme,
    count: int,
    *,
    n_target: int | None = None,
    b_length: float | None = None,
    shift_energy: float | None = None,
) -> BoundStates:
    """Lowest `count` states near a target energy by shift-invert Lanczos.

    Parameters
    ----------
    params, trunc
        Fields and basis cutoff, passed to assemble_matrices.
    count : int
        Number of eigenpairs requested.
    n_target : int, optional
        Principal quantum number of the manifold of interest.  Sets the
        default dilation b = sqrt(n_target) and the default shift slightly
        below -1/(2 n_target^2).
    b_length, shift_energy : float, optional
        Explicit overrides of the dilation parameter and the energy (in
        hartree) around which eigenvalues are sought.

    Notes
    -----
    The spectral transformation is performed in lambda, where the bound
    spectrum is discrete; returned energies are E = -(1 + lambda)/(2 b^4).
    Energies above the Stark saddle -2 sqrt(f) are not resolved resonances
    and should not be trusted.
    """
    if n_target is None and (b_length is None or shift_energy is None):
        raise ValueError("provide n_target or both b_length and shift_energy")
    if b_length is None:
        b_length = math.sqrt(n_target)
    if shift_energy is None:
        shift_energy = -1.05 / (2.0 * n_target * n_target)
    pair = assemble_matrices(params, trunc, b_length)
    if not 1 <= count <= pair.size - 1:
        raise ValueError(f"count must be in 1..{pair.size - 1}, got {count}")

    sigma = pair.energy_to_lam(shift_energy)
    converged = True
    try:
        lam = eigsh(
            pair.h,
            k=count,
            M=pair.b,
            sigma=sigma,
            which="LM",
            return_eigenvectors=False,
        )
    except ArpackNoConvergence as err:
        lam = err.eigenvalues
        converged = False
        if lam is None or len(lam) == 0:
            raise NumericalError(
                f"shift-invert iteration found no eigenvalues near E={shift_energy}"
            ) from err
    energies = np.sort(pair.lam_to_energy(lam))
    return BoundStates(
        energies=energies,
        lam=np.sort(np.asarray(lam)),
        b_length=b_length,
        basis_size=pair.size,
        converged=converged,
        shift_energy=shift_energy,
        params=params,
    )


def convergence_scan(
    params: FieldParams,
    n_target: int,
    count: int,
    quanta_list: list[int],
    *,
    b_list: list[float] | None = None,
    m_pad: int = 2,
) -> list[BoundStates]:
    """Re-solve with growing basis cutoffs (and optionally several b).

    Returns one BoundStates per (max_quanta, b) combination, in scan order.
    Successive energy drifts tell how many digits are converged; the spacing
    between the two largest cutoffs is the usual convergence estimate.
    """
    if b_list is None:
        b_list = [math.sqrt(n_target)]
    out = []
    for quanta in quanta_list:
        trunc = TruncationScheme(
            max_quanta=quanta,
            m_min=-(n_target - 1) - m_pad,
            m_max=(n_target - 1) + m_pad,
        )
        for b_len in b_list:
            out.append(
                solve_bound_states(
                    params, trunc, count, n_target=n_target, b_length=b_len
                )
            )
    return out

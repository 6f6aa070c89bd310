"""Radial matrix elements of the two-dimensional harmonic oscillator.

Basis functions are the unit-frequency radial eigenfunctions

    R_{N,a}(rho) = sqrt(2 N! / (N+a)!) rho^a e^{-rho^2/2} L_N^a(rho^2)

with radial quantum number N >= 0 and angular index a = |m| >= 0, normalized
as integral R^2 rho drho = 1.  Even powers of rho act within one angular
index, odd powers connect a to a +/- 1.  All elements below follow from the
Laguerre recurrences and are exact; products such as rho^4 are formed on
enlarged matrices before truncation so no band is clipped.
"""

from __future__ import annotations

import numpy as np
import scipy.sparse as sp


def rho2_matrix(alpha: int, size: int) -> sp.csr_matrix:
    """<N'|rho^2|N> at angular index alpha: tridiagonal.

    Diagonal 2N + alpha + 1, off-diagonal -sqrt((N+1)(N+alpha+1)).
    """
    if alpha < 0 or size < 1:
        raise ValueError(f"need alpha >= 0 and size >= 1, got {alpha}, {size}")
    nvals = np.arange(size)
    diag = 2.0 * nvals + alpha + 1.0
    off = -np.sqrt((nvals[:-1] + 1.0) * (nvals[:-1] + alpha + 1.0))
    return sp.diags([off, diag, off], [-1, 0, 1], format="csr")


def rho4_matrix(alpha: int, size: int) -> sp.csr_matrix:
    """<N'|rho^4|N> at angular index alpha: pentadiagonal, exact."""
    big = rho2_matrix(alpha, size + 2)
    return (big @ big)[:size, :size].tocsr()


def rho_step_up(alpha: int, rows: int, cols: int) -> sp.csr_matrix:
    """<N', alpha+1|rho|N, alpha>, shape (rows, cols).

    Nonzero for N' = N (value sqrt(N+alpha+1)) and N' = N-1 (value -sqrt(N)).
    """
    if alpha < 0 or rows < 1 or cols < 1:
        raise ValueError(f"need alpha >= 0 and positive shape, got {alpha}, {rows}, {cols}")
    mat = sp.lil_matrix((rows, cols))
    for n in range(cols):
        if n < rows:
            mat[n, n] = np.sqrt(n + alpha + 1.0)
        if 0 <= n - 1 < rows:
            mat[n - 1, n] = -np.sqrt(n)
    return mat.tocsr()


def rho3_step_up(alpha: int, rows: int, cols: int) -> sp.csr_matrix:
    """<N', alpha+1|rho^3|N, alpha>, shape (rows, cols), exact banded product."""
    big = max(rows, cols) + 2
    prod = rho2_matrix(alpha + 1, big) @ rho_step_up(alpha, big, big)
    return prod[:rows, :cols].tocsr()

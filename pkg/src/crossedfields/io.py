"""Deterministic CSV and JSON writers for run artifacts.

All floats are written with 12 significant digits in locale-independent
formatting so that identical inputs give byte-identical files.
"""

from __future__ import annotations

import csv
import json
from typing import Iterable

import numpy as np

from .classical import SectionSet
from .fields import FieldParams, energy_to_cm1
from .levelstats import BrodyFit, SpacingHistogram
from .perturbation import EbetaScan, GapMinimum

__all__ = [
    "fmt",
    "write_scan_csv",
    "write_levels_csv",
    "write_gaps_csv",
    "write_psos_csv",
    "write_histogram_csv",
    "write_fit_json",
    "write_manifest",
]


def fmt(x) -> str:
    """Format one float with 12 significant digits."""
    return format(float(x), ".12g")


def _write_rows(path, header: list[str], rows: Iterable[list]) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([c if isinstance(c, str) else fmt(c) for c in row])


def write_scan_csv(path, n: int, scan: EbetaScan) -> None:
    """Energy-angle table: one row per (beta, level)."""
    def rows():
        for k, beta in enumerate(scan.betas):
            bdeg = np.rad2deg(beta)
            for i, e in enumerate(scan.energies[k]):
                yield [n, bdeg, scan.gamma, scan.f, i, e, energy_to_cm1(e)]

    _write_rows(
        path,
        ["n", "beta_deg", "gamma_au", "f_au", "level_index", "energy_au", "energy_cm1"],
        rows(),
    )


def write_levels_csv(
    path,
    energies: np.ndarray,
    params: FieldParams,
    *,
    b_length: float | None = None,
    basis_size: int | None = None,
    converged: bool = True,
) -> None:
    """Plain level list, optionally with exact-solver bookkeeping columns."""
    exact_cols = b_length is not None
    header = ["level_index", "energy_au", "energy_cm1", "gamma_au", "f_au", "beta_deg"]
    if exact_cols:
        header += ["b", "basis_size", "converged"]

    def rows():
        for i, e in enumerate(energies):
            row = [i, e, energy_to_cm1(e), params.gamma, params.f, np.rad2deg(params.beta)]
            if exact_cols:
                row += [b_length, str(basis_size), "true" if converged else "false"]
            yield row

    _write_rows(path, header, rows())


def write_gaps_csv(path, n: int, minima: list[GapMinimum]) -> None:
    _write_rows(
        path,
        ["n", "lower_level", "beta_deg", "gap_au", "gap_cm1"],
        (
            [n, m.lower_level, np.rad2deg(m.beta), m.gap, energy_to_cm1(m.gap)]
            for m in minima
        ),
    )


def write_psos_csv(path, section: SectionSet) -> None:
    """One row per section crossing, orbits in seed order."""
    def rows():
        for sid, orb in enumerate(section.orbits):
            for t, phi, jz in zip(orb.t, orb.phi1, orb.j1z):
                yield [sid, orb.branch, t, phi, jz]

    _write_rows(path, ["seed_id", "branch", "t", "phi1", "J1z"], rows())


def write_histogram_csv(path, hist: SpacingHistogram) -> None:
    _write_rows(
        path,
        ["s_bin_center", "density", "count"],
        (
            [c, d, str(int(k))]
            for c, d, k in zip(hist.centers, hist.density, hist.counts)
        ),
    )


def write_fit_json(path, fit: BrodyFit, window: dict, unfolding: dict) -> None:
    payload = {
        "q": float(fit.q),
        "q_err": float(fit.q_err),
        "alpha": float(fit.alpha),
        "log_likelihood": float(fit.log_likelihood),
        "n_samples": int(fit.n_samples),
        "window": window,
        "unfolding": unfolding,
    }
    with open(path, "w") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")


def write_manifest(path, payload: dict) -> None:
    """Run manifest; the caller assembles parameters, conversions, versions."""
    with open(path, "w") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True, default=str)
        fh.write("\n")

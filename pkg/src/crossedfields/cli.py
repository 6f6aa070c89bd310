"""Command-line front end for all engines.

Every run writes columnar CSV plus a JSON manifest recording parameters,
unit conversions, and tolerances.  Parameters can come from a JSON config
file (--config); explicit flags win over config values.  Field strengths
are given either in laboratory units (--B tesla, --F kV/cm, the default)
or directly in atomic units (--gamma, --f) with --units au; the scaled
commands (psos, lyap, nns in scaled mode) take the dimensionless n^3 gamma
and n^4 f directly.

Exit codes: 0 success, 2 usage or invalid configuration, 3 numerical
failure, 4 insufficient data.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import __version__
from . import classical as cl
from . import io as cfio
from . import levelstats as ls
from .errors import DegenerateFrameError, InsufficientDataError, NumericalError
from .exact import TruncationScheme, solve_bound_states
from .fields import (
    FieldParams,
    TESLA_PER_AU,
    VOLT_PER_CM_PER_AU,
    energy_to_cm1,
    f_from_kv_per_cm,
    gamma_from_tesla,
    stark_saddle_energy,
)
from .perturbation import (
    conventional_spectrum,
    ebeta_scan,
    min_gap_analysis,
)

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_NUMERICAL = 3
EXIT_INSUFFICIENT = 4


class UsageError(Exception):
    pass


def _parse_grid(text: str) -> np.ndarray:
    """Angle grid in degrees: 'a:b:step', comma list, or a single value."""
    if ":" in text:
        parts = text.split(":")
        if len(parts) != 3:
            raise UsageError(f"grid must be start:stop:step, got {text!r}")
        a, b, s = (float(p) for p in parts)
        if s <= 0 or b < a:
            raise UsageError(f"bad grid {text!r}")
        return np.arange(a, b + 0.5 * s, s)
    return np.array([float(p) for p in text.split(",")])


def _resolve_fields(args) -> tuple[float, float, dict]:
    """Return (gamma, f) in au plus a conversion log for the manifest."""
    if args.units == "lab":
        if args.gamma is not None or args.f is not None:
            raise UsageError("--gamma/--f require --units au")
        if args.B is None or args.F is None:
            raise UsageError("lab units need --B (tesla) and --F (kV/cm)")
        gamma = gamma_from_tesla(args.B)
        f = f_from_kv_per_cm(args.F)
        conv = {
            "B_tesla": args.B,
            "F_kV_per_cm": args.F,
            "gamma_au": gamma,
            "f_au": f,
            "tesla_per_au": TESLA_PER_AU,
            "volt_per_cm_per_au": VOLT_PER_CM_PER_AU,
        }
    else:
        if args.B is not None or args.F is not None:
            raise UsageError("--B/--F require --units lab")
        if args.gamma is None or args.f is None:
            raise UsageError("au units need --gamma and --f")
        gamma, f = args.gamma, args.f
        conv = {"gamma_au": gamma, "f_au": f}
    return gamma, f, conv


def _manifest(args, command: str, conversions: dict, outputs: list[str], **extra) -> dict:
    payload = {
        "command": command,
        "version": __version__,
        "units": getattr(args, "units", "scaled"),
        "conversions": conversions,
        "outputs": outputs,
    }
    payload.update(extra)
    return payload


def _out(args, name: str) -> Path:
    d = Path(args.out)
    d.mkdir(parents=True, exist_ok=True)
    return d / name


def _cmd_ptx(args) -> int:
    gamma, f, conv = _resolve_fields(args)
    betas = np.deg2rad(_parse_grid(args.beta))
    scan = ebeta_scan(args.n, gamma, f, betas)
    csv_path = _out(args, f"ptx_n{args.n}.csv")
    cfio.write_scan_csv(csv_path, args.n, scan)
    man_path = _out(args, f"ptx_n{args.n}_manifest.json")
    cfio.write_manifest(
        man_path,
        _manifest(args, "ptx", conv, [csv_path.name], n=args.n, beta_deg=args.beta),
    )
    print(f"wrote {csv_path} ({len(betas)} angles x {args.n**2} levels)")
    return EXIT_OK


def _cmd_pt12(args) -> int:
    gamma, f, conv = _resolve_fields(args)
    betas = np.deg2rad(_parse_grid(args.beta))
    rows = []
    for beta in betas:
        p = FieldParams(gamma=gamma, f=f, beta=float(beta))
        e1 = np.sort(conventional_spectrum(args.n, p, order=1))
        e2 = np.sort(conventional_spectrum(args.n, p, order=2))
        bdeg = np.rad2deg(beta)
        for i, (a, b) in enumerate(zip(e1, e2)):
            rows.append([args.n, bdeg, i, a, b, energy_to_cm1(b)])
    csv_path = _out(args, f"pt12_n{args.n}.csv")
    cfio._write_rows(
        csv_path,
        ["n", "beta_deg", "level_index", "energy_order1_au", "energy_order2_au", "energy_order2_cm1"],
        rows,
    )
    man_path = _out(args, f"pt12_n{args.n}_manifest.json")
    cfio.write_manifest(
        man_path,
        _manifest(args, "pt12", conv, [csv_path.name], n=args.n, beta_deg=args.beta),
    )
    print(f"wrote {csv_path}")
    return EXIT_OK


def _cmd_exact(args) -> int:
    gamma, f, conv = _resolve_fields(args)
    p = FieldParams(gamma=gamma, f=f, beta=np.deg2rad(args.beta_deg))
    trunc = TruncationScheme.for_manifold(
        args.n_target, extra_quanta=args.extra_quanta, m_pad=args.m_pad
    )
    count = args.count if args.count else args.n_target**2
    states = solve_bound_states(p, trunc, count, n_target=args.n_target)
    csv_path = _out(args, f"exact_n{args.n_target}.csv")
    cfio.write_levels_csv(
        csv_path,
        states.energies,
        p,
        b_length=states.b_length,
        basis_size=states.basis_size,
        converged=states.converged,
    )
    man_path = _out(args, f"exact_n{args.n_target}_manifest.json")
    cfio.write_manifest(
        man_path,
        _manifest(
            args,
            "exact",
            conv,
            [csv_path.name],
            n_target=args.n_target,
            beta_deg=args.beta_deg,
            basis_size=states.basis_size,
            b=states.b_length,
            shift_energy=states.shift_energy,
            converged=states.converged,
        ),
    )
    if not states.converged:
        print("warning: eigensolver returned fewer states than requested", file=sys.stderr)
    print(f"wrote {csv_path} ({len(states.energies)} states)")
    return EXIT_OK


def _cmd_ebeta_gaps(args) -> int:
    gamma, f, conv = _resolve_fields(args)
    betas = np.deg2rad(_parse_grid(args.beta))
    scan = ebeta_scan(args.n, gamma, f, betas)
    minima = min_gap_analysis(scan)
    csv_path = _out(args, f"gaps_n{args.n}.csv")
    cfio.write_gaps_csv(csv_path, args.n, minima)
    man_path = _out(args, f"gaps_n{args.n}_manifest.json")
    cfio.write_manifest(
        man_path,
        _manifest(
            args, "ebeta-gaps", conv, [csv_path.name], n=args.n, beta_deg=args.beta,
            minima_found=len(minima),
        ),
    )
    print(f"wrote {csv_path} ({len(minima)} gap minima)")
    return EXIT_OK


def _cmd_psos(args) -> int:
    p = cl.ScaledParams(args.sg, args.sf, np.deg2rad(args.beta_deg))
    nj, nphi = (int(x) for x in args.grid.split("x"))
    seeds = cl.default_seed_grid(nj, nphi)
    section = cl.psos(
        p, args.se, seeds=seeds, max_crossings=args.max_crossings, t_max=args.t_max
    )
    csv_path = _out(args, f"psos_beta{args.beta_deg:g}.csv")
    cfio.write_psos_csv(csv_path, section)
    man_path = _out(args, f"psos_beta{args.beta_deg:g}_manifest.json")
    cfio.write_manifest(
        man_path,
        _manifest(
            args,
            "psos",
            {"sg": args.sg, "sf": args.sf, "se": args.se},
            [csv_path.name],
            beta_deg=args.beta_deg,
            seed_grid=args.grid,
            max_crossings=args.max_crossings,
            orbits=len(section.orbits),
            skipped_seeds=section.skipped_seeds,
        ),
    )
    print(f"wrote {csv_path} ({len(section.orbits)} orbits, "
          f"{section.skipped_seeds} seeds outside the energy shell)")
    return EXIT_OK


def _cmd_lyap(args) -> int:
    p = cl.ScaledParams(args.sg, args.sf, np.deg2rad(args.beta_deg))
    fr1, fr2 = cl.frames(p)
    nj, nphi = (int(x) for x in args.grid.split("x"))
    seeds = cl.default_seed_grid(nj, nphi)
    rows = []
    for j1z, phi1 in seeds:
        for branch, j2z in enumerate(cl.section_seed_roots(p, args.se, j1z, phi1)):
            st = cl.from_action_angle(j1z, phi1, j2z, 0.0, fr1, fr2)
            ind = cl.chaos_indicator(st, p, total_time=args.total_time)
            rows.append([j1z, phi1, str(branch), j2z, ind.lam])
    csv_path = _out(args, f"lyap_beta{args.beta_deg:g}.csv")
    cfio._write_rows(
        csv_path, ["seed_J1z", "seed_phi1", "branch", "J2z", "lambda"], rows
    )
    man_path = _out(args, f"lyap_beta{args.beta_deg:g}_manifest.json")
    cfio.write_manifest(
        man_path,
        _manifest(
            args,
            "lyap",
            {"sg": args.sg, "sf": args.sf, "se": args.se},
            [csv_path.name],
            beta_deg=args.beta_deg,
            total_time=args.total_time,
            trajectories=len(rows),
        ),
    )
    print(f"wrote {csv_path} ({len(rows)} trajectories)")
    return EXIT_OK


def _cmd_nns(args) -> int:
    n_range = range(args.n_min, args.n_max + 1)
    if args.sg is not None:
        if args.sf is None:
            raise UsageError("scaled mode needs both --sg and --sf")
        result = ls.nns_pipeline_scaled(
            args.sg,
            args.sf,
            np.deg2rad(args.beta_deg),
            n_range,
            args.se,
            degree=args.degree,
            bin_width=args.bin_width,
            window_first=not args.unfold_first,
        )
        conv = {"sg": args.sg, "sf": args.sf, "se": args.se}
    else:
        gamma, f, conv = _resolve_fields(args)
        p = FieldParams(gamma=gamma, f=f, beta=np.deg2rad(args.beta_deg))
        result = ls.nns_pipeline(
            p,
            n_range,
            args.se,
            degree=args.degree,
            bin_width=args.bin_width,
            window_first=not args.unfold_first,
        )
    hist_path = _out(args, f"nns_beta{args.beta_deg:g}_hist.csv")
    cfio.write_histogram_csv(hist_path, result.histogram)
    fit_path = _out(args, f"nns_beta{args.beta_deg:g}_fit.json")
    cfio.write_fit_json(
        fit_path,
        result.fit,
        window={"se_target": args.se, "half_width_factor": 0.1},
        unfolding={
            "method": "staircase-polynomial",
            "degree": args.degree,
            "window_first": not args.unfold_first,
        },
    )
    man_path = _out(args, f"nns_beta{args.beta_deg:g}_manifest.json")
    cfio.write_manifest(
        man_path,
        _manifest(
            args,
            "nns",
            conv,
            [hist_path.name, fit_path.name],
            beta_deg=args.beta_deg,
            n_min=args.n_min,
            n_max=args.n_max,
            q=result.fit.q,
            n_spacings=result.fit.n_samples,
        ),
    )
    print(f"wrote {hist_path} and {fit_path}  (q={result.fit.q:.3f} "
          f"from {result.fit.n_samples} spacings)")
    return EXIT_OK


def _cmd_saddle(args) -> int:
    if args.F is not None:
        f = f_from_kv_per_cm(args.F)
        conv = {"F_kV_per_cm": args.F, "f_au": f}
    elif args.f is not None:
        f = args.f
        conv = {"f_au": f}
    else:
        raise UsageError("saddle needs --F (kV/cm) or --f (au)")
    e = stark_saddle_energy(f)
    payload = _manifest(
        args, "saddle", conv, [], energy_au=e, energy_cm1=energy_to_cm1(e)
    )
    man_path = _out(args, "saddle.json")
    cfio.write_manifest(man_path, payload)
    print(f"saddle energy: {cfio.fmt(e)} au = {cfio.fmt(energy_to_cm1(e))} cm^-1")
    return EXIT_OK


def _add_field_flags(sub):
    sub.add_argument("--units", choices=("lab", "au"), default="lab")
    sub.add_argument("--B", type=float, default=None, help="magnetic field (tesla)")
    sub.add_argument("--F", type=float, default=None, help="electric field (kV/cm)")
    sub.add_argument("--gamma", type=float, default=None, help="magnetic strength (au)")
    sub.add_argument("--f", type=float, default=None, help="electric strength (au)")


def _add_scaled_flags(sub):
    sub.add_argument("--sg", type=float, required=True, help="scaled n^3 gamma")
    sub.add_argument("--sf", type=float, required=True, help="scaled n^4 f")
    sub.add_argument("--se", type=float, default=-0.5, help="scaled energy n^2 E")
    sub.add_argument("--beta-deg", type=float, required=True)


def build_parser() -> tuple[argparse.ArgumentParser, dict]:
    parser = argparse.ArgumentParser(
        prog="crossedfields",
        description="Rydberg hydrogen in crossed magnetic and electric fields",
    )
    parser.add_argument("--config", default=None, help="JSON config file; flags win")
    subs = parser.add_subparsers(dest="command", required=True)
    tbl = {}

    s = subs.add_parser("ptx", help="extended-PT energy-angle scan")
    _add_field_flags(s)
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--beta", required=True, help="deg: a:b:step or comma list")
    s.add_argument("--out", default=".")
    s.set_defaults(func=_cmd_ptx)
    tbl["ptx"] = s

    s = subs.add_parser("pt12", help="conventional PT energies, orders 1 and 2")
    _add_field_flags(s)
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--beta", required=True)
    s.add_argument("--out", default=".")
    s.set_defaults(func=_cmd_pt12)
    tbl["pt12"] = s

    s = subs.add_parser("exact", help="bound states by exact diagonalization")
    _add_field_flags(s)
    s.add_argument("--n-target", type=int, required=True)
    s.add_argument("--beta-deg", type=float, default=0.0)
    s.add_argument("--count", type=int, default=0, help="states (default n_target^2)")
    s.add_argument("--extra-quanta", type=int, default=30)
    s.add_argument("--m-pad", type=int, default=2)
    s.add_argument("--out", default=".")
    s.set_defaults(func=_cmd_exact)
    tbl["exact"] = s

    s = subs.add_parser("ebeta-gaps", help="avoided-crossing minima of an angle scan")
    _add_field_flags(s)
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--beta", required=True)
    s.add_argument("--out", default=".")
    s.set_defaults(func=_cmd_ebeta_gaps)
    tbl["ebeta-gaps"] = s

    s = subs.add_parser("psos", help="Poincare surface of section at phi2=0")
    _add_scaled_flags(s)
    s.add_argument("--grid", default="10x10", help="seed grid, e.g. 20x20")
    s.add_argument("--max-crossings", type=int, default=150)
    s.add_argument("--t-max", type=float, default=None)
    s.add_argument("--out", default=".")
    s.set_defaults(func=_cmd_psos)
    tbl["psos"] = s

    s = subs.add_parser("lyap", help="finite-time Lyapunov exponents on a seed grid")
    _add_scaled_flags(s)
    s.add_argument("--grid", default="5x5")
    s.add_argument("--total-time", type=float, default=2000.0)
    s.add_argument("--out", default=".")
    s.set_defaults(func=_cmd_lyap)
    tbl["lyap"] = s

    s = subs.add_parser("nns", help="nearest-neighbor spacing statistics")
    _add_field_flags(s)
    s.add_argument("--sg", type=float, default=None, help="scaled n^3 gamma (scaled mode)")
    s.add_argument("--sf", type=float, default=None, help="scaled n^4 f (scaled mode)")
    s.add_argument("--se", type=float, default=-0.5)
    s.add_argument("--beta-deg", type=float, required=True)
    s.add_argument("--n-min", type=int, default=50)
    s.add_argument("--n-max", type=int, default=60)
    s.add_argument("--bin-width", type=float, default=0.25)
    s.add_argument("--degree", type=int, default=3)
    s.add_argument("--unfold-first", action="store_true",
                   help="unfold the full manifold before windowing")
    s.add_argument("--out", default=".")
    s.set_defaults(func=_cmd_nns)
    tbl["nns"] = s

    s = subs.add_parser("saddle", help="Stark saddle-point energy")
    s.add_argument("--F", type=float, default=None, help="electric field (kV/cm)")
    s.add_argument("--f", type=float, default=None, help="electric strength (au)")
    s.add_argument("--out", default=".")
    s.set_defaults(func=_cmd_saddle)
    tbl["saddle"] = s

    return parser, tbl


def _apply_config(parser, tbl, argv) -> None:
    """Load --config JSON (flat or one level of sections) as defaults."""
    path = None
    for i, a in enumerate(argv):
        if a == "--config" and i + 1 < len(argv):
            path = argv[i + 1]
        elif a.startswith("--config="):
            path = a.split("=", 1)[1]
    if path is None:
        return
    try:
        with open(path) as fh:
            cfg = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise UsageError(f"cannot read config {path}: {exc}")
    flat = {}
    for key, val in cfg.items():
        if isinstance(val, dict):
            flat.update(val)
        else:
            flat[key] = val
    known = set()
    for sub in tbl.values():
        dests = {a.dest for a in sub._actions}
        hits = {k.replace("-", "_"): v for k, v in flat.items() if k.replace("-", "_") in dests}
        known.update(hits)
        if hits:
            sub.set_defaults(**hits)
            # required flags satisfied by the config must not be demanded again
            for a in sub._actions:
                if a.dest in hits and a.required:
                    a.required = False
    unknown = {k for k in flat if k.replace("-", "_") not in known}
    if unknown:
        raise UsageError(f"unknown config keys: {sorted(unknown)}")


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser, tbl = build_parser()
    try:
        _apply_config(parser, tbl, argv)
        args = parser.parse_args(argv)
        return args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except InsufficientDataError as exc:
        print(f"insufficient data: {exc}", file=sys.stderr)
        return EXIT_INSUFFICIENT
    except (NumericalError, DegenerateFrameError) as exc:
        print(f"numerical error: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())

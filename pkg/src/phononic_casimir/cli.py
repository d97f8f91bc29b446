"""Command-line front end: ``materials``, ``point`` and ``sweep``.

Exit codes: 0 success, 1 numerical failure, 2 usage or validation error.
"""
from __future__ import annotations

import argparse
import csv
import json
import math
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from . import closedforms as cf
from .constants import HBAR, KB
from .lifshitz import LayerStack, energy_m_quantum, energy_perfect_reflector, energy_total
from .materials import (SPEED_MODES, ElasticMaterial, MaterialDB, MaterialError, MissingC11Error,
                        default_db, load_materials, sound_speeds)
from .numerics import ConvergenceError

EXIT_OK, EXIT_NUMERIC, EXIT_USAGE = 0, 1, 2

UNITS = {
    "d": "m", "T": "K",
    "e_m": "J/m^2", "e_ln": "J/m^2", "e_total": "J/m^2", "e_pr": "J/m^2",
    "e_ln_qm": "J/m^2", "e_ln_T": "J/m^2", "e_m_qm": "J/m^2", "e_m_T": "J/m^2",
    "e_em_qm": "J/m^2", "e_em_T": "J/m^2",
    "b": "1", "ratio": "1", "gamma": "1", "pressure": "Pa", "young": "Pa",
    "status": "",
}
QUANTITIES = ("e_m", "e_ln", "e_total", "e_pr", "e_ln_qm", "e_ln_T", "e_m_qm", "e_m_T",
              "e_em_qm", "e_em_T", "ratio", "gamma", "pressure", "young")
_NUMERIC = {"e_m", "e_ln", "e_total"}
_CLOSED_KEY = {"ratio": "ratio_estimate"}


class UsageError(Exception):
    pass


@dataclass(frozen=True)
class SweepRequest:
    plate: ElasticMaterial
    gap: ElasticMaterial
    d_values: tuple
    temperatures: tuple
    quantities: tuple = QUANTITIES
    mode: str = "c11"
    young_bulk: Optional[float] = None

    def __post_init__(self):
        if not 1 <= len(self.d_values) <= 10**6:
            raise UsageError("number of separations must lie in [1, 1e6]")
        if any(not (d > 0 and math.isfinite(d)) for d in self.d_values):
            raise UsageError("separations must be positive and finite")
        if any(not (T >= 0 and math.isfinite(T)) for T in self.temperatures):
            raise UsageError("temperatures must be non-negative and finite")
        unknown = [q for q in self.quantities if q not in QUANTITIES]
        if unknown:
            raise UsageError(f"unknown quantities {', '.join(unknown)}; choose from {', '.join(QUANTITIES)}")
        if self.young_bulk is not None and not self.young_bulk > 0:
            raise UsageError("--young-bulk must be positive")

    @property
    def e_bulk(self) -> float:
        return self.young_bulk if self.young_bulk is not None else self.gap.young_modulus()


@dataclass
class Row:
    d: float
    T: float
    values: dict = field(default_factory=dict)
    meta: dict = field(default_factory=dict)
    error: Optional[str] = None
    partial: Optional[float] = None
    partial_error: Optional[float] = None


def evaluate(req: SweepRequest, d: float, T: float) -> Row:
    """All requested quantities at one (d, T); numerical failures land in ``Row.error``."""
    row = Row(d, T)
    stack = LayerStack(req.plate, req.gap, d, T, req.mode)
    try:
        closed = cf.closed_form_set(req.gap, req.plate, d, T, req.mode).as_dict()
        if _NUMERIC & set(req.quantities):
            br = energy_total(stack)
            row.meta = br.meta
            numeric = {"e_m": br.e_m, "e_ln": br.e_ln, "e_total": br.e_total}
        else:
            numeric = {}
    except ConvergenceError as exc:
        row.error, row.partial, row.partial_error = f"ConvergenceError: {exc}", exc.value, exc.error
        return row
    except ArithmeticError as exc:
        row.error = f"{type(exc).__name__}: {exc}"
        return row
    for q in req.quantities:
        if q in numeric:
            row.values[q] = numeric[q]
        elif q == "young":
            row.values[q] = cf.apparent_young_modulus(req.e_bulk, req.gap, req.plate, d, T)
        else:
            row.values[q] = closed[_CLOSED_KEY.get(q, q)]
    return row


def _fmt(x) -> str:
    return repr(float(x))


# --- argument handling ---------------------------------------------------

def _positive_float(text: str) -> float:
    try:
        value = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
    if not (value > 0 and math.isfinite(value)):
        raise argparse.ArgumentTypeError(f"must be positive and finite: {text!r}")
    return value


def _temperatures(text: str) -> tuple:
    out = []
    for part in text.split(","):
        try:
            value = float(part)
        except ValueError:
            raise argparse.ArgumentTypeError(f"not a temperature: {part!r}") from None
        if not (value >= 0 and math.isfinite(value)):
            raise argparse.ArgumentTypeError(f"temperature must be >= 0: {part!r}")
        out.append(value)
    return tuple(out)


def _quantities(text: str) -> tuple:
    return tuple(q.strip() for q in text.split(",") if q.strip())


def _common(p: argparse.ArgumentParser):
    p.add_argument("--plate", required=True, help="plate material (both substrates)")
    p.add_argument("--gap", required=True, help="gap material")
    p.add_argument("--temp", type=_temperatures, default=(300.0,),
                   help="temperature in K, or a comma-separated list (sweep)")
    p.add_argument("--quantities", type=_quantities, default=QUANTITIES,
                   help="comma-separated subset of " + ",".join(QUANTITIES))
    p.add_argument("--materials-file", help="JSON materials file merged over the built-in table")
    p.add_argument("--speeds", choices=SPEED_MODES, default="c11", help="longitudinal speed convention")
    p.add_argument("--young-bulk", type=_positive_float,
                   help="bulk Young's modulus in Pa (default: isotropic value of the gap)")
    p.add_argument("--output", default="-", help="output path, '-' for stdout")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="phononic-casimir",
                                     description="Phononic Casimir energies between elastic plates.")
    sub = parser.add_subparsers(dest="command", required=True)

    pm = sub.add_parser("materials", help="list, show or validate materials")
    msub = pm.add_subparsers(dest="action", required=True)
    pl = msub.add_parser("list")
    pl.add_argument("--materials-file")
    ps = msub.add_parser("show")
    ps.add_argument("name")
    ps.add_argument("--materials-file")
    pv = msub.add_parser("validate")
    pv.add_argument("file")

    pp = sub.add_parser("point", help="evaluate one (d, T) point")
    _common(pp)
    pp.add_argument("--d", type=_positive_float, required=True, help="separation in m")
    pp.add_argument("--check", action="store_true", help="compare numeric paths with closed forms")

    pw = sub.add_parser("sweep", help="tabulate quantities over a grid of separations")
    _common(pw)
    pw.add_argument("--d-min", type=_positive_float, required=True)
    pw.add_argument("--d-max", type=_positive_float, required=True)
    pw.add_argument("--points", type=int, default=50)
    pw.add_argument("--log", action="store_true", help="logarithmic spacing in d")
    pw.add_argument("--jobs", type=int, default=1, help="worker processes")
    return parser


def d_grid(d_min: float, d_max: float, points: int, log: bool) -> np.ndarray:
    if not 2 <= points <= 10**6:
        raise UsageError("--points must lie in [2, 1e6]")
    if not d_max > d_min:
        raise UsageError("--d-max must exceed --d-min")
    return np.geomspace(d_min, d_max, points) if log else np.linspace(d_min, d_max, points)


def _resolve(db: MaterialDB, name: str) -> ElasticMaterial:
    try:
        return db[name]
    except KeyError as exc:
        raise UsageError(exc.args[0]) from None


def _request(args, d_values) -> SweepRequest:
    db = default_db(args.materials_file)
    plate, gap = _resolve(db, args.plate), _resolve(db, args.gap)
    for mat in (plate, gap):
        try:
            sound_speeds(mat, args.speeds)
        except MissingC11Error as exc:
            raise UsageError(str(exc)) from None
    return SweepRequest(plate, gap, tuple(float(d) for d in d_values), args.temp,
                        args.quantities, args.speeds, args.young_bulk)


class _Out:
    def __init__(self, path: str):
        self.path = path

    def __enter__(self):
        self.fh = sys.stdout if self.path == "-" else open(self.path, "w", encoding="utf-8", newline="")
        return self.fh

    def __exit__(self, *exc):
        if self.fh is not sys.stdout:
            self.fh.close()


# --- commands ------------------------------------------------------------

def cmd_materials(args) -> int:
    if args.action == "validate":
        try:
            mats = load_materials(args.file)
        except (OSError, MaterialError) as exc:
            print(str(exc), file=sys.stderr)
            return EXIT_USAGE
        print(f"{args.file}: {len(mats)} valid record(s)")
        return EXIT_OK
    db = default_db(args.materials_file)
    if args.action == "show":
        mat = _resolve(db, args.name)
        print(_describe(mat))
        return EXIT_OK
    header = f"{'name':<10}{'rho':>10}{'lambda':>10}{'mu':>10}{'C11':>10}{'eps0':>8}" \
             f"{'c_l(lame)':>12}{'c_l(c11)':>12}{'c_t':>10}"
    print("# rho kg/m^3; lambda, mu, C11 GPa; speeds m/s")
    print(header)
    for mat in db:
        lame = sound_speeds(mat, "lame")
        c11 = f"{sound_speeds(mat, 'c11').c_l:12.2f}" if mat.c11 is not None else f"{'-':>12}"
        c11_mod = f"{mat.c11 / 1e9:10.2f}" if mat.c11 is not None else f"{'-':>10}"
        eps = "inf" if mat.is_conductor else f"{mat.eps0:g}"
        print(f"{mat.name:<10}{mat.rho:10.1f}{mat.lam / 1e9:10.2f}{mat.mu / 1e9:10.2f}{c11_mod}"
              f"{eps:>8}{lame.c_l:12.2f}{c11}{lame.c_t:10.2f}")
    return EXIT_OK


def _describe(mat: ElasticMaterial) -> str:
    lame = sound_speeds(mat, "lame")
    lines = [
        f"name: {mat.name}",
        f"rho: {mat.rho:g} kg/m^3",
        f"lambda: {mat.lam / 1e9:g} GPa",
        f"mu: {mat.mu / 1e9:g} GPa",
        f"C11: {mat.c11 / 1e9:g} GPa" if mat.c11 is not None else "C11: -",
        f"eps0: {'inf' if mat.is_conductor else format(mat.eps0, 'g')}",
        f"c_l(lame): {lame.c_l:.2f} m/s",
    ]
    if mat.c11 is not None:
        lines.append(f"c_l(c11): {sound_speeds(mat, 'c11').c_l:.2f} m/s")
    lines.append(f"c_t: {lame.c_t:.2f} m/s")
    return "\n".join(lines)


def _checks(req: SweepRequest, row: Row) -> dict:
    """Relative deviations between numeric paths and their closed forms."""
    d, T = row.d, row.T
    out = {}
    e_pr = cf.e_perfect(sound_speeds(req.gap, req.mode), d)
    out["perfect_reflector"] = abs(energy_perfect_reflector(req.gap, d, req.mode) / e_pr - 1)
    qm = cf.e_m_quantum(req.gap, req.plate, d)
    out["m_quantum"] = 0.0 if qm == 0 else abs(energy_m_quantum(LayerStack(req.plate, req.gap, d, T, req.mode)) / qm - 1)
    c_t0 = sound_speeds(req.gap, req.mode).c_t
    e_m = row.values.get("e_m")
    if e_m is not None and 2 * math.pi * KB * T * d / (HBAR * c_t0) > 8:
        mt = cf.e_m_thermal(req.gap, req.plate, d, T)
        out["m_thermal"] = 0.0 if mt == 0 else abs(e_m / mt - 1)
    else:
        # outside the high-temperature regime the thermal form is not a target
        out["m_thermal"] = None
    return out


def cmd_point(args) -> int:
    req = _request(args, (args.d,))
    if len(req.temperatures) != 1:
        raise UsageError("point takes a single --temp")
    row = evaluate(req, args.d, req.temperatures[0])
    record = {
        "inputs": {"plate": req.plate.name, "gap": req.gap.name, "d": args.d,
                   "T": row.T, "speeds": req.mode},
        "units": {q: UNITS[q] for q in ("d", "T") + tuple(req.quantities)},
        "values": row.values,
        "meta": row.meta,
    }
    code = EXIT_OK
    if row.error:
        record["error"] = row.error
        record["partial"] = row.partial
        record["error_estimate"] = row.partial_error
        code = EXIT_NUMERIC
    elif args.check:
        try:
            record["check"] = _checks(req, row)
        except ArithmeticError as exc:
            record["check_error"] = f"{type(exc).__name__}: {exc}"
            code = EXIT_NUMERIC
    with _Out(args.output) as fh:
        json.dump(record, fh, indent=2, allow_nan=True, default=float)
        fh.write("\n")
    return code


def _eval_star(job):
    return evaluate(*job)


def cmd_sweep(args) -> int:
    grid = d_grid(args.d_min, args.d_max, args.points, args.log)
    req = _request(args, grid)
    if args.jobs < 1:
        raise UsageError("--jobs must be >= 1")
    jobs = [(req, float(d), T) for T in req.temperatures for d in grid]
    if args.jobs == 1:
        rows = [evaluate(*job) for job in jobs]
    else:
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            rows = list(pool.map(_eval_star, jobs, chunksize=max(1, len(jobs) // (4 * args.jobs))))
    columns = ("d", "T") + tuple(req.quantities) + ("status",)
    failed = False
    with _Out(args.output) as fh:
        fh.write(f"# plate: {req.plate.name}\n# gap: {req.gap.name}\n# speeds: {req.mode}\n")
        for col in columns:
            fh.write(f"# {col}: {UNITS[col] or '-'}\n")
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(columns)
        for row in rows:
            if row.error:
                failed = True
                vals = ["nan"] * len(req.quantities)
                status = "error: " + row.error.splitlines()[0]
            else:
                vals = [_fmt(row.values[q]) for q in req.quantities]
                status = "ok"
            writer.writerow([_fmt(row.d), _fmt(row.T)] + vals + [status])
    return EXIT_NUMERIC if failed else EXIT_OK


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    handler = {"materials": cmd_materials, "point": cmd_point, "sweep": cmd_sweep}[args.command]
    try:
        return handler(args)
    except (UsageError, MaterialError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())

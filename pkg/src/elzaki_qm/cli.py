"""Command-line interface: ``elzaki-qm <command> [flags]``.

Commands:
    spectrum      closed-form energies, optionally checked by the eigensolver
    wavefunction  normalised R(r) sampled on a grid
    transform     symbolic Elzaki image of an expression, with numeric samples
    verify        pass/fail report of the verification suites
    appendix      worked problems (bessel, shm, shift)

Output is a JSON object ``{"schema": 1, "meta": {...}, "rows": [...]}`` or CSV
with ``# key=value`` metadata lines, a header row and one line per row. The
default format is json unless ``ELZAKI_QM_DEFAULT_FORMAT`` says otherwise.
Exit codes: 0 success, 1 verification failure, 2 usage or parse error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import re
import sys
import warnings

import numpy as np

from . import checks
from .elzaki import (
    elzaki_quad,
    elzaki_transform,
    infinite_square_well_levels,
    parse_expr,
    shifted_transform,
    shm_image,
    solve_bessel_zeroth,
    solve_shm,
)
from .elzaki.appendix import bessel_image, value_and_slope_at_zero
from .elzaki.table import relative_gap
from .errors import DomainError, ElzakiError, GridTooCoarseWarning, ParseError
from .oracle import RadialGrid, eigensolve_radial
from .potentials import (
    Coulomb,
    Harmonic,
    Mie,
    Pseudoharmonic,
    UnitSystem,
    _cutoff,
    energy,
    normalize,
    radial_wavefunction,
)

SCHEMA = 1
FORMAT_ENV = "ELZAKI_QM_DEFAULT_FORMAT"
POTENTIALS = ("coulomb", "mie", "kratzer-fues", "modified-kratzer", "harmonic", "pseudoharmonic")
EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    """Bad flags or values; reported with exit code 2."""


# ---------------------------------------------------------------------------
# parsing helpers
# ---------------------------------------------------------------------------
def parse_range(text: str) -> list[int]:
    """``"3"`` or ``"lo..hi"`` (inclusive) as a list of integers."""
    try:
        if ".." in text:
            lo, hi = (int(p) for p in text.split("..", 1))
        else:
            lo = hi = int(text)
    except ValueError:
        raise UsageError(f"expected an integer or lo..hi, got {text!r}") from None
    if hi < lo:
        raise UsageError(f"empty range {text!r}")
    return list(range(lo, hi + 1))


def parse_units(text: str) -> UnitSystem:
    values = {"hbar": 1.0, "M": 1.0}
    for item in filter(None, (p.strip() for p in text.split(","))):
        key, _, val = item.partition("=")
        key = {"mass": "M", "m": "M"}.get(key.strip(), key.strip())
        if key not in values or not val:
            raise UsageError(f"unknown unit override {item!r}; use hbar=...,M=...")
        try:
            values[key] = float(val)
        except ValueError:
            raise UsageError(f"bad number in unit override {item!r}") from None
    try:
        return UnitSystem(values["hbar"], values["M"])
    except DomainError as err:
        raise UsageError(str(err)) from None


def parse_grid(text: str) -> RadialGrid:
    parts = text.split(",")
    if len(parts) != 3:
        raise UsageError("--grid takes rmin,rmax,points")
    try:
        return RadialGrid(float(parts[0]), float(parts[1]), int(parts[2]))
    except ValueError as err:
        raise UsageError(f"bad --grid: {err}") from None


def parse_floats(text: str) -> list[float]:
    try:
        return [float(p) for p in text.split(",") if p.strip()]
    except ValueError:
        raise UsageError(f"expected comma-separated numbers, got {text!r}") from None


def _need(args, *names):
    missing = [f"--{n}" for n in names if getattr(args, n) is None]
    if missing:
        raise UsageError(f"potential {args.potential} needs {' '.join(missing)}")
    return [getattr(args, n) for n in names]


def build_potential(args, defaults: bool = False):
    """Potential from the flags; with ``defaults`` missing parameters take O(1) values."""
    name = args.potential
    if name is None:
        raise UsageError("--potential is required")
    if defaults:
        fill = {"Z": 1.0, "a": 0.0, "b": -1.0, "c": 0.0, "D0": 1.0, "r0": 1.0, "omega": 1.0, "De": 1.0, "re": 1.0}
        for key, val in fill.items():
            if getattr(args, key, None) is None:
                setattr(args, key, val)
    try:
        if name == "coulomb":
            (Z,) = _need(args, "Z")
            return Coulomb(Z)
        if name == "mie":
            a, b = _need(args, "a", "b")
            return Mie(a, b, args.c or 0.0)
        if name == "kratzer-fues":
            return Mie.kratzer_fues(*_need(args, "D0", "r0"))
        if name == "modified-kratzer":
            return Mie.modified_kratzer(*_need(args, "D0", "r0"))
        if name == "harmonic":
            return Harmonic(*_need(args, "omega"))
        if args.a1 is not None:
            return Pseudoharmonic(args.a1, args.a2 or 0.0, args.a3 or 0.0)
        if args.De is not None and args.re is not None:
            return Pseudoharmonic.from_diatomic(args.De, args.re)
        raise UsageError("potential pseudoharmonic needs --a1 [--a2 --a3] or --De --re")
    except DomainError as err:
        raise UsageError(str(err)) from None


# ---------------------------------------------------------------------------
# output
# ---------------------------------------------------------------------------
def _clean(x):
    if isinstance(x, (float, np.floating)):
        x = float(x)
        return x if math.isfinite(x) else None
    if isinstance(x, (np.integer,)):
        return int(x)
    if isinstance(x, dict):
        return {k: _clean(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_clean(v) for v in x]
    return x


def render(meta: dict, rows: list[dict], fmt: str) -> str:
    meta, rows = _clean(meta), _clean(rows)
    if fmt == "json":
        return json.dumps({"schema": SCHEMA, "meta": meta, "rows": rows}, indent=2) + "\n"
    buf = io.StringIO()
    buf.write(f"# schema={SCHEMA}\n")
    for key, val in meta.items():
        text = val if isinstance(val, str) else json.dumps(val, separators=(",", ":"))
        buf.write(f"# {key}={text}\n")
    columns: list[str] = []
    for row in rows:
        columns += [k for k in row if k not in columns]
    if not columns:
        return buf.getvalue()
    writer = csv.DictWriter(buf, fieldnames=columns, lineterminator="\n", restval="")
    writer.writeheader()
    for row in rows:
        writer.writerow({k: _csv_cell(v) for k, v in row.items()})
    return buf.getvalue()


def _csv_cell(v):
    if v is None:
        return ""
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return repr(v)
    if isinstance(v, (list, dict)):
        return json.dumps(v, separators=(",", ":"))
    return v


def emit(args, meta: dict, rows: list[dict]) -> None:
    text = render(meta, rows, args.format)
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _in_x(expr) -> str:
    return re.sub(r"\bt\b", "x", str(expr))


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------
def cmd_spectrum(args) -> int:
    pot = build_potential(args)
    units = parse_units(args.units)
    grid = parse_grid(args.grid) if args.grid else None
    ns, ls, Ns = parse_range(args.n), parse_range(args.l), parse_range(args.N)
    rows, ok, failed = [], 0, 0
    for N in Ns:
        for l in ls:
            numeric, numeric_error = None, None
            if args.verify:
                try:
                    with warnings.catch_warnings():
                        warnings.simplefilter("ignore", GridTooCoarseWarning)
                        numeric = eigensolve_radial(pot, l, N, units, grid, count=max(ns) + 1)
                except ElzakiError as err:
                    numeric_error = f"{type(err).__name__}: {err}"
            for n in ns:
                row = {"n": n, "l": l, "N": N}
                try:
                    row["E_closed"] = energy(pot, (n, l, N), units)
                except ElzakiError as err:
                    row["E_closed"] = None
                    row["error"] = f"{type(err).__name__}: {err}"
                    rows.append(row)
                    continue
                ok += 1
                if args.verify:
                    if numeric is None:
                        row.update(E_numeric=None, abs_diff=None, passed=False, error=numeric_error)
                        failed += 1
                    else:
                        diff = abs(float(numeric.eigenvalues[n]) - row["E_closed"])
                        passed = diff <= args.tolerance
                        failed += not passed
                        row.update(
                            E_numeric=float(numeric.eigenvalues[n]),
                            abs_diff=diff,
                            convergence_estimate=float(numeric.convergence_estimate[n]),
                            passed=passed,
                        )
                rows.append(row)
    meta = {"command": "spectrum", "potential": args.potential, "parameters": repr(pot), "hbar": units.hbar, "M": units.mass}
    if args.verify:
        meta["tolerance"] = args.tolerance
    emit(args, meta, rows)
    if ok == 0 or failed:
        return EXIT_FAIL
    return EXIT_OK


def cmd_wavefunction(args) -> int:
    pot = build_potential(args)
    units = parse_units(args.units)
    n, l, N = (parse_range(x) for x in (args.n, args.l, args.N))
    if len(n) != 1 or len(l) != 1 or len(N) != 1:
        raise UsageError("wavefunction takes a single n, l and N")
    n, l, N = n[0], l[0], N[0]
    R = radial_wavefunction(pot, (n, l, N), units)
    C = normalize(R, N)
    R = R.scaled(C)
    if args.grid:
        grid = parse_grid(args.grid)
        rs = grid.nodes()
    else:
        # extend until the normalised tail is far below 1e-10
        r_max = _cutoff(lambda r: np.abs(R(r)), R.length_scale())
        rs = np.linspace(1e-4, r_max, 1000)
    values = R(rs)
    rows = [{"r": float(r), "R": float(v)} for r, v in zip(rs, values)]
    meta = {
        "command": "wavefunction",
        "potential": args.potential,
        "parameters": repr(pot),
        "n": n,
        "l": l,
        "N": N,
        "energy": R.energy,
        "normalization": C,
        "hbar": units.hbar,
        "M": units.mass,
    }
    emit(args, meta, rows)
    return EXIT_OK


def _quadrature(f, u: float):
    if f.has_impulse:
        return None
    breaks = sorted({t.delay for t in f.terms if t.step})
    return elzaki_quad(f, u, breakpoints=breaks)


def cmd_transform(args) -> int:
    f = parse_expr(args.expression)
    T = elzaki_transform(f)
    rows = []
    for u in parse_floats(args.at) if args.at else []:
        value = T.evaluate(u)
        quad = _quadrature(f, u)
        rows.append({"u": u, "symbolic": value, "quadrature": quad, "rel_diff": None if quad is None else relative_gap(value, quad)})
    meta = {
        "command": "transform",
        "input": args.expression,
        "expression": str(f),
        "image": str(T),
        "image_prefix": T.to_prefix(),
        "convergence_radius": T.radius(),
    }
    emit(args, meta, rows)
    return EXIT_OK


def cmd_verify(args) -> int:
    suites = tuple(s.strip() for s in args.suite.split(",")) if args.suite else checks.SUITES
    unknown = [s for s in suites if s not in checks.SUITES]
    if unknown:
        raise UsageError(f"unknown suite(s) {', '.join(unknown)}; choose from {', '.join(checks.SUITES)}")
    potentials = None
    if args.potential:
        potentials = {args.potential: build_potential(args, defaults=True)}
    units = parse_units(args.units)
    tolerance = checks.SPECTRUM_TOLERANCE if args.tolerance is None else args.tolerance
    results = checks.run_checks(suites, potentials, tolerance, units)
    rows = [c.as_row() for c in results]
    failed = sum(not c.passed for c in results)
    meta = {"command": "verify", "suites": list(suites), "checks": len(results), "failed": failed, "passed": failed == 0}
    emit(args, meta, rows)
    return EXIT_FAIL if failed else EXIT_OK


def cmd_appendix(args) -> int:
    xs = parse_floats(args.at) if args.at else None
    if args.which == "bessel":
        a = 1.0 if args.a is None else args.a
        y = solve_bessel_zeroth(a)
        xs = xs or list(checks.BESSEL_SAMPLES)
        rows = [{"x": x, "y": float(y(x)), "residual": checks.bessel_residual(y, a, x)} for x in xs]
        meta = {
            "command": "appendix bessel",
            "equation": f"x y'' + y' + {a * a:g} x y = 0, y(0) = 1",
            "image": str(bessel_image(a)),
            "solution": _in_x(y),
            "residual_tolerance": 1e-8,
        }
        emit(args, meta, rows)
        return EXIT_OK if all(r["residual"] <= 1e-8 for r in rows) else EXIT_FAIL
    if args.which == "shm":
        omega = 1.0 if args.omega is None else args.omega
        y = solve_shm(omega, args.y0, args.yp0)
        v, s = value_and_slope_at_zero(y)
        xs = xs or [0.0, 0.25, 0.5, 1.0, 2.0]
        rows = []
        for x in xs:
            h = 1e-3
            vals = np.asarray(y(x + h * np.arange(-2, 3)), dtype=float)
            d2 = (-vals[0] + 16.0 * vals[1] - 30.0 * vals[2] + 16.0 * vals[3] - vals[4]) / (12.0 * h * h)
            rows.append({"x": x, "y": float(vals[2]), "residual": abs(d2 + omega * omega * vals[2])})
        levels = infinite_square_well_levels(args.width, args.levels)
        meta = {
            "command": "appendix shm",
            "equation": f"y'' + {omega * omega:g} y = 0, y(0) = {args.y0:g}, y'(0) = {args.yp0:g}",
            "image": str(shm_image(omega, args.y0, args.yp0)),
            "solution": _in_x(y),
            "y(0)": v,
            "y'(0)": s,
            "well_width": args.width,
            "well_levels": [{"m": L.m, "k": L.k, "E": L.energy} for L in levels],
        }
        emit(args, meta, rows)
        ok = abs(v - args.y0) <= 1e-12 and abs(s - args.yp0) <= 1e-12
        return EXIT_OK if ok else EXIT_FAIL
    a = 1.0 if args.a is None else args.a
    f = parse_expr(args.f)
    T = elzaki_transform(f)
    S = shifted_transform(T, a)
    damped = parse_expr(f"exp({-a!r}*t)") * f
    rows = []
    for u in xs or [0.1, 0.3, 0.5]:
        value = S.evaluate(u)
        quad = _quadrature(damped, u)
        rows.append({"u": u, "symbolic": value, "quadrature": quad, "rel_diff": None if quad is None else relative_gap(value, quad)})
    meta = {"command": "appendix shift", "f": str(f), "a": a, "image": str(T), "shifted_image": str(S)}
    emit(args, meta, rows)
    ok = all(r["rel_diff"] is None or r["rel_diff"] <= 1e-6 for r in rows)
    return EXIT_OK if ok else EXIT_FAIL


# ---------------------------------------------------------------------------
# argument parser
# ---------------------------------------------------------------------------
def _add_output(p: argparse.ArgumentParser) -> None:
    default = os.environ.get(FORMAT_ENV, "json").lower()
    if default not in ("json", "csv"):
        default = "json"
    p.add_argument("--format", choices=("json", "csv"), default=default, help=f"output format (env {FORMAT_ENV})")
    p.add_argument("--out", help="write to this file instead of stdout")


def _add_potential(p: argparse.ArgumentParser) -> None:
    p.add_argument("--potential", choices=POTENTIALS)
    for name in ("Z", "a", "b", "c", "D0", "r0", "omega", "a1", "a2", "a3", "De", "re"):
        p.add_argument(f"--{name}", type=float)
    p.add_argument("--units", default="hbar=1,M=1", help="unit overrides, e.g. hbar=1,M=1 (the default)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="elzaki-qm", description="Elzaki-transform bound states and checks.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("spectrum", help="closed-form energies")
    _add_potential(p)
    p.add_argument("--N", default="3", help="dimension, single or lo..hi")
    p.add_argument("--l", default="0", help="angular momentum, single or lo..hi")
    p.add_argument("--n", default="0", help="radial quantum number, single or lo..hi")
    p.add_argument("--grid", help="rmin,rmax,points for the eigensolver")
    p.add_argument("--verify", action="store_true", help="add the numerical eigensolver column")
    p.add_argument("--tolerance", type=float, default=checks.SPECTRUM_TOLERANCE)
    _add_output(p)
    p.set_defaults(func=cmd_spectrum)

    p = sub.add_parser("wavefunction", help="normalised radial function on a grid")
    _add_potential(p)
    p.add_argument("--N", default="3")
    p.add_argument("--l", default="0")
    p.add_argument("--n", default="0")
    p.add_argument("--grid", help="rmin,rmax,points (default: 1e-4 to the decay cutoff, 1000 points)")
    _add_output(p)
    p.set_defaults(func=cmd_wavefunction)

    p = sub.add_parser("transform", help="Elzaki image of an expression in t")
    p.add_argument("expression")
    p.add_argument("--at", help="comma-separated u values to evaluate")
    _add_output(p)
    p.set_defaults(func=cmd_transform)

    p = sub.add_parser("verify", help="run the verification suites")
    _add_potential(p)
    p.add_argument("--suite", help=f"comma-separated subset of {', '.join(checks.SUITES)}")
    p.add_argument("--tolerance", type=float, help="absolute tolerance of the spectrum checks")
    _add_output(p)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("appendix", help="worked problems")
    p.add_argument("which", choices=("bessel", "shm", "shift"))
    p.add_argument("--a", type=float, help="Bessel scale or shift rate (default 1)")
    p.add_argument("--omega", type=float, help="oscillator frequency (default 1)")
    p.add_argument("--y0", type=float, default=1.0)
    p.add_argument("--yp0", type=float, default=0.0)
    p.add_argument("--f", default="t", help="function to shift")
    p.add_argument("--width", type=float, default=1.0, help="infinite well width")
    p.add_argument("--levels", type=int, default=3, help="number of well levels")
    p.add_argument("--at", help="comma-separated sample points")
    _add_output(p)
    p.set_defaults(func=cmd_appendix)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code not in (0, None) else EXIT_OK
    try:
        return args.func(args)
    except ParseError as err:
        print(f"error: {err}", file=sys.stderr)
        if hasattr(args, "expression"):
            print(f"  {args.expression}\n  {' ' * err.position}^", file=sys.stderr)
        return EXIT_USAGE
    except (UsageError, DomainError, ElzakiError) as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())

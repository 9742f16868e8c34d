"""Reproducible command-line runs: scans, minima tables, and bound tables.

A run is described by a single JSON config (strictly validated, unknown keys
rejected) naming the system, working precision, order list, energy window,
and bisection tolerance.  Three commands consume it:

* ``oppq scan``      — sample every order's energy function on a grid and
  write one plot CSV per order (columns E, value, log10_value);
* ``oppq minimize``  — localize every well in the window at every order and
  write a minima table (bounds columns left empty);
* ``oppq bound``     — additionally estimate (or accept) an upper bound B_U
  on the limiting minimum, extract the two-sided energy interval it induces
  at each order, and write a bounds table plus a JSON audit ledger.

When no manual bound is supplied, ``bound`` re-estimates B_U at every order
from the minima sequence observed so far (staged updates), so late orders
benefit from tighter empirical bounds exactly as the sequences converge.

All numerics serialize as decimal strings at full working precision; output
files are byte-reproducible for a fixed config (wall times appear only in
the ledger).  A config may be given as a file path or as the name of a
shipped preset (see ``--list-presets``).
"""
from __future__ import annotations

import argparse
import csv
import json
import platform
import sys
import time
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

import gmpy2
from gmpy2 import log10, mpfr

from . import __version__, kernels, mpnum, oppq
from .mer import QzmSystem, Recurrence1D
from .oppq import (
    BoundReport,
    Lambda1D,
    LambdaMulti,
    NotConverged,
    NoUpperCrossing,
    OrderRecord,
    estimate_BU,
    extract_bounds,
    find_minimum,
)
from .refweight import harmonic_weight_moments

_SYSTEMS = ("harmonic", "qzm", "custom1d")
_TOP_KEYS = {
    "system",
    "B",
    "Z",
    "eps0",
    "recurrence",
    "precision",
    "orders",
    "window",
    "tol_exponent",
    "b_u",
    "scan_points",
    "out_dir",
    "emit",
}
_EMIT_KEYS = {"tables", "plots", "ledger"}
_RECURRENCE_KEYS = {"missing_order", "terms"}


class ConfigError(ValueError):
    """A config document failed validation; the message names the field."""

    def __init__(self, fieldname: str, message: str):
        super().__init__(f"config field '{fieldname}': {message}")
        self.fieldname = fieldname


def _decimal(fieldname: str, value) -> str:
    if isinstance(value, bool) or not isinstance(value, (str, int)):
        raise ConfigError(fieldname, f"expected a decimal string or integer, got {value!r}")
    text = str(value).strip()
    try:
        mpfr(text)
    except ValueError:
        raise ConfigError(fieldname, f"not a decimal number: {text!r}") from None
    return text


@dataclass
class RunConfig:
    """Validated run description (numeric fields kept as decimal strings and
    converted under the active precision at use time)."""

    system: str
    precision: int
    orders: list
    window: tuple  # (e_lo, e_hi) decimal strings
    tol_exponent: int
    B: str = None
    Z: str = "1"
    eps0: str = None
    recurrence: dict = None
    b_u: str = None
    scan_points: int = 200
    out_dir: str = "."
    emit: dict = field(default_factory=lambda: {"tables": True, "plots": True, "ledger": True})

    @classmethod
    def from_dict(cls, doc: dict, source: str = "<config>") -> "RunConfig":
        if not isinstance(doc, dict):
            raise ConfigError("<document>", f"{source}: top level must be a JSON object")
        unknown = set(doc) - _TOP_KEYS
        if unknown:
            raise ConfigError(sorted(unknown)[0], "unknown key (rejected; check spelling)")

        system = doc.get("system")
        if system not in _SYSTEMS:
            raise ConfigError("system", f"must be one of {_SYSTEMS}, got {system!r}")

        precision = doc.get("precision")
        if not isinstance(precision, int) or isinstance(precision, bool) or precision < 30:
            raise ConfigError("precision", f"must be an integer ≥ 30, got {precision!r}")

        orders = doc.get("orders")
        if (
            not isinstance(orders, list)
            or not orders
            or not all(isinstance(o, int) and not isinstance(o, bool) and o >= 0 for o in orders)
        ):
            raise ConfigError("orders", "must be a non-empty list of integers ≥ 0")
        if any(b <= a for a, b in zip(orders, orders[1:])):
            raise ConfigError("orders", "must be strictly ascending")

        window = doc.get("window")
        if not isinstance(window, list) or len(window) != 2:
            raise ConfigError("window", "must be a two-element list [e_lo, e_hi]")
        e_lo = _decimal("window[0]", window[0])
        e_hi = _decimal("window[1]", window[1])
        if not mpfr(e_lo) < mpfr(e_hi):
            raise ConfigError("window", f"requires e_lo < e_hi, got [{e_lo}, {e_hi}]")

        tol_exponent = doc.get("tol_exponent")
        if (
            not isinstance(tol_exponent, int)
            or isinstance(tol_exponent, bool)
            or not 7 <= tol_exponent <= 20
        ):
            raise ConfigError("tol_exponent", f"must be an integer in [7, 20], got {tol_exponent!r}")

        kwargs = dict(
            system=system,
            precision=precision,
            orders=list(orders),
            window=(e_lo, e_hi),
            tol_exponent=tol_exponent,
        )

        if system == "qzm":
            for name in ("B", "eps0"):
                if name not in doc:
                    raise ConfigError(name, "required for the qzm system")
            kwargs["B"] = _decimal("B", doc["B"])
            kwargs["Z"] = _decimal("Z", doc.get("Z", "1"))
            kwargs["eps0"] = _decimal("eps0", doc["eps0"])
            if not mpfr(e_lo) >= mpfr(kwargs["eps0"]):
                raise ConfigError(
                    "window", f"qzm requires e_lo ≥ eps0, got e_lo={e_lo} < eps0={kwargs['eps0']}"
                )
            if "recurrence" in doc:
                raise ConfigError("recurrence", "only valid for the custom1d system")
        elif system == "custom1d":
            rec = doc.get("recurrence")
            if not isinstance(rec, dict):
                raise ConfigError("recurrence", "required object for the custom1d system")
            unknown = set(rec) - _RECURRENCE_KEYS
            if unknown:
                raise ConfigError(f"recurrence.{sorted(unknown)[0]}", "unknown key")
            mo = rec.get("missing_order")
            if not isinstance(mo, int) or isinstance(mo, bool) or mo < 0:
                raise ConfigError("recurrence.missing_order", "must be an integer ≥ 0")
            terms = rec.get("terms")
            if not isinstance(terms, list) or not terms:
                raise ConfigError("recurrence.terms", "must be a non-empty list of lag tables")
            for k, table in enumerate(terms):
                if not isinstance(table, list) or not table:
                    raise ConfigError(f"recurrence.terms[{k}]", "must be a non-empty list of rows")
                for i, row in enumerate(table):
                    if not isinstance(row, list) or not row:
                        raise ConfigError(
                            f"recurrence.terms[{k}][{i}]", "must be a non-empty coefficient list"
                        )
                    for j, cval in enumerate(row):
                        _decimal(f"recurrence.terms[{k}][{i}][{j}]", cval)
            kwargs["recurrence"] = {"missing_order": mo, "terms": terms}
            for name in ("B", "Z", "eps0"):
                if name in doc:
                    raise ConfigError(name, "only valid for the qzm system")
        else:
            for name in ("B", "Z", "eps0", "recurrence"):
                if name in doc:
                    raise ConfigError(name, f"not valid for the {system} system")

        if "b_u" in doc and doc["b_u"] is not None:
            kwargs["b_u"] = _decimal("b_u", doc["b_u"])
        if "scan_points" in doc:
            sp = doc["scan_points"]
            if not isinstance(sp, int) or isinstance(sp, bool) or sp < 2:
                raise ConfigError("scan_points", f"must be an integer ≥ 2, got {sp!r}")
            kwargs["scan_points"] = sp
        if "out_dir" in doc:
            if not isinstance(doc["out_dir"], str) or not doc["out_dir"]:
                raise ConfigError("out_dir", "must be a non-empty string")
            kwargs["out_dir"] = doc["out_dir"]
        if "emit" in doc:
            emit = doc["emit"]
            if not isinstance(emit, dict):
                raise ConfigError("emit", "must be an object of booleans")
            unknown = set(emit) - _EMIT_KEYS
            if unknown:
                raise ConfigError(f"emit.{sorted(unknown)[0]}", "unknown key")
            merged = {"tables": True, "plots": True, "ledger": True}
            for key, val in emit.items():
                if not isinstance(val, bool):
                    raise ConfigError(f"emit.{key}", "must be a boolean")
                merged[key] = val
            kwargs["emit"] = merged

        return cls(**kwargs)

    def to_echo(self) -> dict:
        """The validated document, for the audit ledger."""
        doc = {
            "system": self.system,
            "precision": self.precision,
            "orders": list(self.orders),
            "window": list(self.window),
            "tol_exponent": self.tol_exponent,
            "scan_points": self.scan_points,
            "out_dir": self.out_dir,
            "emit": dict(self.emit),
        }
        if self.system == "qzm":
            doc.update(B=self.B, Z=self.Z, eps0=self.eps0)
        if self.system == "custom1d":
            doc["recurrence"] = self.recurrence
        if self.b_u is not None:
            doc["b_u"] = self.b_u
        return doc

    @property
    def tol(self) -> mpfr:
        return mpfr(10) ** (-self.tol_exponent)


# ---------------------------------------------------------------------------
# Presets


def available_presets() -> list:
    """Names of the shipped run configurations."""
    root = resources.files("oppqbm.presets")
    return sorted(p.name[:-5] for p in root.iterdir() if p.name.endswith(".json"))


def load_preset(name: str) -> dict:
    """The raw JSON document of a shipped preset."""
    ref = resources.files("oppqbm.presets").joinpath(f"{name}.json")
    if not ref.is_file():
        raise ConfigError("<preset>", f"no preset named {name!r}; see --list-presets")
    return json.loads(ref.read_text(encoding="utf-8"))


def load_config(spec: str) -> RunConfig:
    """Load a config from a JSON file path, or fall back to a preset name."""
    path = Path(spec)
    if path.is_file():
        try:
            doc = json.loads(path.read_text(encoding="utf-8"))
        except json.JSONDecodeError as exc:
            raise ConfigError("<document>", f"{spec}: invalid JSON at line {exc.lineno}: {exc.msg}")
        return RunConfig.from_dict(doc, source=spec)
    if spec.endswith(".json") or "/" in spec:
        raise ConfigError("<document>", f"no such config file: {spec}")
    return RunConfig.from_dict(load_preset(spec), source=f"preset {spec}")


# ---------------------------------------------------------------------------
# Run orchestration


def _energy_function(config: RunConfig, order: int):
    if config.system == "harmonic":
        rec = Recurrence1D.harmonic()
        return Lambda1D(rec, harmonic_weight_moments(2 * order), order)
    if config.system == "custom1d":
        terms = tuple(
            tuple(tuple(c for c in row) for row in table) for table in config.recurrence["terms"]
        )
        rec = Recurrence1D(missing_order=config.recurrence["missing_order"], terms=terms)
        # custom one-dimensional systems share the half-line Gaussian weight
        return Lambda1D(rec, harmonic_weight_moments(2 * order), order)
    system = QzmSystem(B=config.B, Z=config.Z, eps0=config.eps0)
    return LambdaMulti(system, order)


def _effective_window(config: RunConfig, fn) -> tuple:
    lo = mpfr(config.window[0])
    hi = mpfr(config.window[1])
    floor = getattr(fn, "domain_floor", None)
    if floor is not None and floor > lo:
        lo = floor
    return lo, hi


def _grid(lo, hi, n: int) -> list:
    span = hi - lo
    return [lo + span * k / (n - 1) for k in range(n)]


def _find_wells(fn, config: RunConfig) -> list:
    """Bracket every derivative sign change (− → +) on the scan grid; a grid
    point with an exactly zero derivative is itself a converged minimum."""
    lo, hi = _effective_window(config, fn)
    grid = _grid(lo, hi, config.scan_points)
    samples = [fn.evaluate(e) for e in grid]
    wells = []
    for k, ev in enumerate(samples):
        if ev.derivative == 0:
            wells.append(oppq.Minimum(ev.energy, ev.value, mpfr(0), ev))
        elif k + 1 < len(samples) and ev.derivative < 0 and samples[k + 1].derivative > 0:
            wells.append(find_minimum(fn, (grid[k], grid[k + 1]), config.tol))
    return wells


def _minimize_order(fn, config: RunConfig, order: int) -> list:
    started = time.perf_counter()
    records = []
    for well, minimum in enumerate(_find_wells(fn, config)):
        records.append(
            OrderRecord(
                order=order,
                well=well,
                e_min=minimum.energy,
                s_min=minimum.value,
                width=minimum.width,
                residual=minimum.evaluation.residual,
            )
        )
    elapsed = time.perf_counter() - started
    for rec in records:
        rec.wall_time = elapsed / len(records)
    return records


def _run_minimize(config: RunConfig, out) -> tuple:
    """Minimize every order; returns (report, {order: energy function})."""
    report = BoundReport()
    functions = {}
    for order in config.orders:
        fn = _energy_function(config, order)
        functions[order] = fn
        records = _minimize_order(fn, config, order)
        if not records:
            print(
                f"order {order}: no derivative sign change in the window — "
                "widen the window or raise scan_points",
                file=sys.stderr,
            )
            continue
        for rec in records:
            print(
                f"order {rec.order} well {rec.well}: "
                f"E_min={mpnum.decimal_str(rec.e_min, 25)} "
                f"S_min={mpnum.decimal_str(rec.s_min, 25)}",
                file=out,
            )
        report.records.extend(records)
    report.flag_monotonicity()
    return report, functions


# ---------------------------------------------------------------------------
# Emission


def _fmt(value) -> str:
    return "" if value is None else mpnum.decimal_str(value)


_TABLE_HEADER = [
    "system",
    "order",
    "well",
    "e_min",
    "s_min",
    "width",
    "e_l",
    "e_u",
    "b_u",
    "eps0",
    "precision",
    "residual",
    "monotone",
]


def _write_table(path: Path, config: RunConfig, report: BoundReport) -> None:
    eps0 = mpnum.decimal_str(mpfr(config.eps0)) if config.system == "qzm" else ""
    with path.open("w", encoding="utf-8", newline="") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(_TABLE_HEADER)
        for rec in report.records:
            writer.writerow(
                [
                    config.system,
                    rec.order,
                    rec.well,
                    _fmt(rec.e_min),
                    _fmt(rec.s_min),
                    _fmt(rec.width),
                    _fmt(rec.e_l),
                    _fmt(rec.e_u),
                    _fmt(rec.b_u),
                    eps0,
                    config.precision,
                    _fmt(rec.residual),
                    "" if rec.monotone is None else ("true" if rec.monotone else "false"),
                ]
            )


def _write_scan(path: Path, pairs) -> None:
    with path.open("w", encoding="utf-8", newline="") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(["E", "value", "log10_value"])
        for energy, value in pairs:
            writer.writerow(
                [mpnum.decimal_str(energy), mpnum.decimal_str(value), mpnum.decimal_str(log10(value))]
            )


def _write_ledger(path: Path, config: RunConfig, report: BoundReport, total_seconds: float) -> None:
    rows = []
    for rec in report.records:
        rows.append(
            {
                "order": rec.order,
                "well": rec.well,
                "e_min": _fmt(rec.e_min),
                "s_min": _fmt(rec.s_min),
                "width": _fmt(rec.width),
                "e_l": _fmt(rec.e_l),
                "e_u": _fmt(rec.e_u),
                "b_u": _fmt(rec.b_u),
                "residual": _fmt(rec.residual),
                "monotone": rec.monotone,
                "wall_time_seconds": rec.wall_time,
            }
        )
    doc = {
        "config": config.to_echo(),
        "system": config.system,
        "precision": config.precision,
        "sequence": [_fmt(s) for s in report.sequence(well=0)],
        "b_u": _fmt(report.b_u),
        "rows": rows,
        "versions": {
            "package": __version__,
            "python": platform.python_version(),
            "gmpy2": gmpy2.version(),
            "kernel_backend": kernels.BACKEND,
        },
        "wall_time_seconds": total_seconds,
    }
    path.write_text(json.dumps(doc, indent=2, ensure_ascii=False) + "\n", encoding="utf-8")


# ---------------------------------------------------------------------------
# Commands


def cmd_scan(config: RunConfig, out=None) -> list:
    """Sample every order over the window; one plot CSV per order."""
    out_dir = Path(config.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    written = []
    for order in config.orders:
        fn = _energy_function(config, order)
        lo, hi = _effective_window(config, fn)
        pairs = oppq.scan(fn, _grid(lo, hi, config.scan_points))
        print(f"order {order}: scanned {len(pairs)} points", file=out)
        if config.emit["plots"]:
            path = out_dir / f"scan_{config.system}_{order}.csv"
            _write_scan(path, pairs)
            written.append(path)
    return written


def cmd_minimize(config: RunConfig, out=None) -> BoundReport:
    """Localize every well at every order; write the minima table."""
    out_dir = Path(config.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    report, _ = _run_minimize(config, out)
    if config.emit["tables"]:
        _write_table(out_dir / f"minima_{config.system}.csv", config, report)
    return report


def cmd_bound(config: RunConfig, out=None) -> BoundReport:
    """Minimize, fix an upper bound B_U, and extract per-order intervals.

    With a manual ``b_u`` every order uses it directly; otherwise B_U is
    re-estimated from the minima sequence available at each order (staged
    updates), and orders whose prefix has not converged yet carry no bounds."""
    started = time.perf_counter()
    out_dir = Path(config.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    report, functions = _run_minimize(config, out)

    manual = mpfr(config.b_u) if config.b_u is not None else None
    by_well = {}
    for rec in report.records:
        by_well.setdefault(rec.well, []).append(rec)
    for well, records in sorted(by_well.items()):
        sequence = []
        for rec in records:
            sequence.append(rec.s_min)
            if manual is not None:
                stage_bu = manual
            else:
                try:
                    stage_bu = estimate_BU(sequence)
                except (NotConverged, ValueError):
                    print(
                        f"order {rec.order} well {well}: sequence not converged yet — "
                        "no bounds at this stage",
                        file=out,
                    )
                    continue
            rec.b_u = stage_bu
            report.b_u = stage_bu
            fn = functions[rec.order]
            window = _effective_window(config, fn)
            try:
                rec.e_l, rec.e_u = extract_bounds(
                    fn, rec.e_min, stage_bu, window=window, tol=config.tol
                )
            except (NoUpperCrossing, ValueError) as exc:
                print(f"order {rec.order} well {well}: {exc}", file=sys.stderr)
                continue
            print(
                f"order {rec.order} well {well}: "
                f"E_L={mpnum.decimal_str(rec.e_l, 25)} E_U={mpnum.decimal_str(rec.e_u, 25)}",
                file=out,
            )
    if manual is None and report.b_u is None and report.records:
        sequence = report.sequence(well=0)
        if len(sequence) >= 2:
            raise NotConverged(sequence, oppq.UpperBoundPolicy().theta)
        raise ValueError(
            "automatic B_U needs at least 3 orders; supply a manual bound with --bu"
        )
    report.validate_intervals()
    if config.emit["tables"]:
        _write_table(out_dir / f"bounds_{config.system}.csv", config, report)
    if config.emit["ledger"]:
        _write_ledger(
            out_dir / f"ledger_{config.system}.json",
            config,
            report,
            time.perf_counter() - started,
        )
    return report


# ---------------------------------------------------------------------------
# Entry point


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="oppq",
        description="Eigenenergy estimates and rigorous bounds from moment recurrences.",
    )
    parser.add_argument("--list-presets", action="store_true", help="list shipped presets and exit")
    sub = parser.add_subparsers(dest="command")
    for name, blurb in (
        ("scan", "sample the energy functions over the window"),
        ("minimize", "localize minima at every order"),
        ("bound", "extract two-sided energy bounds"),
    ):
        cmd = sub.add_parser(name, help=blurb)
        cmd.add_argument("--config", required=True, help="JSON config path or preset name")
        cmd.add_argument("--precision", type=int, help="override working precision (digits)")
        cmd.add_argument("--bu", help="override the upper bound B_U (decimal string)")
        cmd.add_argument("--out", help="override the output directory")
    return parser


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    if args.list_presets:
        for name in available_presets():
            print(name)
        return 0
    if not args.command:
        _build_parser().print_usage(sys.stderr)
        return 2
    try:
        config = load_config(args.config)
        if args.precision is not None:
            if args.precision < 30:
                raise ConfigError("precision", "must be ≥ 30")
            config.precision = args.precision
        if args.bu is not None:
            config.b_u = _decimal("b_u", args.bu)
        if args.out is not None:
            config.out_dir = args.out
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2

    mpnum.set_precision(config.precision)
    try:
        if args.command == "scan":
            cmd_scan(config)
        elif args.command == "minimize":
            cmd_minimize(config)
        else:
            cmd_bound(config)
    except NotConverged as exc:
        print(f"error: {exc}", file=sys.stderr)
        print("observed sequence:", file=sys.stderr)
        for value in exc.sequence:
            print(f"  {mpnum.decimal_str(value)}", file=sys.stderr)
        print("pass a manual bound with --bu", file=sys.stderr)
        return 3
    except (ArithmeticError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())

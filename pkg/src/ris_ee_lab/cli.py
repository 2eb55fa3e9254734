"""Command-line experiment harness.

Subcommands: ``run`` (one scenario with its full trace), ``sweep-power`` and
``sweep-elements`` (Monte Carlo sweeps over a transmit-budget or element-count
axis), and ``oracle`` (exhaustive reference at small element counts).

Configs are flat JSON objects whose keys mirror SystemConfig fields; ``--set
KEY=VALUE`` overrides individual fields (flag > file > default).  Results go
to CSV with the version comment ``# ris-ee-lab v1``, one summary row per cell
(ao_iteration = 0, wall-clock runtime_ms) plus one row per trace half-step
(ao_iteration >= 1, runtime_ms = 0).  Rows are canonically sorted by
(axis_value, method, seed, ao_iteration), so identical inputs give identical
bytes except for the runtime column.  Sweeps flush after every finished cell
and skip cells whose summary row is already on disk, making long sweeps
resumable.  dBW values are converted to watts at this boundary only.

Exit codes: 0 success, 1 usage/config error, 2 infeasible or enumeration cap,
3 numerical/solver failure.
"""
from __future__ import annotations

import argparse
import csv
import json
import math
import os
import re
import sys
import time
from concurrent.futures import ThreadPoolExecutor, as_completed
from dataclasses import dataclass, fields as dataclass_fields, replace

from .ao import AO_METHODS, AoOptions, run_ao
from .baselines import all_off_ris, brute_force_ee, brute_force_g
from .channel import draw_channel
from .config import SystemConfig
from .errors import (
    AllInfeasible,
    CapExceeded,
    Infeasible,
    NoFeasibleRounding,
    NoFeasibleStart,
    RelaxationInfeasible,
    RisEeError,
    SingularChannel,
    SolverFailure,
)
from .model import effective_channel, metrics, t_coefficients
from .power_alloc import alloc_problem, dinkelbach

__all__ = [
    "COLUMNS",
    "CSV_VERSION",
    "ResultRow",
    "SweepSpec",
    "cmd_oracle",
    "cmd_run",
    "cmd_sweep",
    "load_config",
    "main",
    "read_rows",
    "write_rows",
]

CSV_VERSION = "# ris-ee-lab v1"
COLUMNS = (
    "seed",
    "axis_value",
    "method",
    "ao_iteration",
    "se",
    "ee",
    "tx_power_w",
    "on_count",
    "runtime_ms",
    "feasible",
)

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_INFEASIBLE = 2
EXIT_SOLVER = 3
_INFEASIBLE_ERRORS = (
    Infeasible,
    NoFeasibleStart,
    CapExceeded,
    AllInfeasible,
    RelaxationInfeasible,
    NoFeasibleRounding,
)
_SOLVER_ERRORS = (SolverFailure, SingularChannel)

_AXES = ("pmax_dbw", "ris_elements")
_CONFIG_FIELDS = {f.name for f in dataclass_fields(SystemConfig)}


@dataclass(frozen=True)
class ResultRow:
    """One CSV record; ao_iteration 0 is the summary, >= 1 a trace half-step."""

    seed: int
    axis_value: float
    method: str
    ao_iteration: int
    se: float
    ee: float
    tx_power_w: float
    on_count: int
    runtime_ms: float
    feasible: bool

    def key(self):
        return (self.axis_value, self.method, self.seed, self.ao_iteration)

    def to_csv(self) -> list[str]:
        return [
            str(self.seed),
            repr(self.axis_value),
            self.method,
            str(self.ao_iteration),
            repr(self.se),
            repr(self.ee),
            repr(self.tx_power_w),
            str(self.on_count),
            repr(self.runtime_ms),
            "true" if self.feasible else "false",
        ]

    @classmethod
    def from_csv(cls, record: list[str]) -> "ResultRow":
        return cls(
            seed=int(record[0]),
            axis_value=float(record[1]),
            method=record[2],
            ao_iteration=int(record[3]),
            se=float(record[4]),
            ee=float(record[5]),
            tx_power_w=float(record[6]),
            on_count=int(record[7]),
            runtime_ms=float(record[8]),
            feasible=record[9] == "true",
        )


@dataclass(frozen=True)
class SweepSpec:
    """One Monte Carlo sweep: an axis, its values, methods, and seed count."""

    axis: str
    values: tuple[float, ...]
    methods: tuple[str, ...]
    num_seeds: int
    base: SystemConfig
    output: str

    def __post_init__(self) -> None:
        if self.axis not in _AXES:
            raise ValueError(f"axis must be one of {_AXES}, got {self.axis!r}")
        if not self.values:
            raise ValueError("values must be non-empty")
        if not self.methods:
            raise ValueError("methods must be non-empty")
        unknown = sorted(set(self.methods) - set(AO_METHODS))
        if unknown:
            raise ValueError(f"unknown methods: {', '.join(unknown)}")
        if self.num_seeds < 1:
            raise ValueError("num_seeds must be positive")


def _read_config_dict(path: str) -> dict:
    with open(path, encoding="utf-8") as fh:
        text = fh.read()
    if not text.strip():
        return {}
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ValueError(f"{path}: invalid JSON at line {exc.lineno}: {exc.msg}") from exc
    if not isinstance(data, dict):
        raise ValueError(f"{path}: config must be a JSON object of scenario fields")
    return data


def _parse_overrides(items) -> dict:
    out = {}
    for item in items or ():
        key, sep, raw = item.partition("=")
        if not sep or not key:
            raise ValueError(f"--set expects KEY=VALUE, got {item!r}")
        try:
            out[key] = json.loads(raw)
        except json.JSONDecodeError:
            out[key] = raw
    return out


def load_config(path: str, overrides=()) -> SystemConfig:
    """JSON file -> SystemConfig with defaults for absent keys; ``overrides``
    are KEY=VALUE strings that win over file values."""
    data = _read_config_dict(path)
    data.update(_parse_overrides(overrides))
    unknown = sorted(set(data) - _CONFIG_FIELDS)
    if unknown:
        raise ValueError(f"unknown config keys: {', '.join(unknown)}")
    coerced = {k: tuple(v) if isinstance(v, list) else v for k, v in data.items()}
    return SystemConfig(**coerced)


def _axis_dbw(cfg: SystemConfig) -> float:
    return 10.0 * math.log10(cfg.Pmax)


def _cell_config(base: SystemConfig, axis: str, value: float) -> SystemConfig:
    if axis == "pmax_dbw":
        return replace(base, Pmax=10.0 ** (value / 10.0))
    count = int(value)
    side = math.isqrt(max(count, 0))
    if value != count or side * side != count:
        raise ValueError(f"ris_elements values must be square element counts, got {value!r}")
    return replace(base, N1=side, N2=side)


def _cell_rows(cfg: SystemConfig, method: str, seed: int, axis_value: float):
    """Evaluate one (config, method, seed) cell; raises on failure."""
    start = time.perf_counter()
    report = run_ao(cfg, draw_channel(cfg, seed), AoOptions(method=method, seed=seed))
    elapsed_ms = (time.perf_counter() - start) * 1e3
    rows = [
        ResultRow(seed, axis_value, method, 0, report.se, report.ee,
                  report.tx_power, report.on_count, elapsed_ms, report.feasible)
    ]
    rows += [
        ResultRow(seed, axis_value, method, i, pt.se, pt.ee, pt.tx_power, pt.on_count, 0.0, True)
        for i, pt in enumerate(report.trace, start=1)
    ]
    return report, rows


def _cell_rows_safe(cfg: SystemConfig, method: str, seed: int, axis_value: float):
    """Sweep variant: failures become a single feasible=false summary row."""
    start = time.perf_counter()
    try:
        return _cell_rows(cfg, method, seed, axis_value)[1]
    except RisEeError:
        elapsed_ms = (time.perf_counter() - start) * 1e3
        return [ResultRow(seed, axis_value, method, 0, 0.0, 0.0, 0.0, 0, elapsed_ms, False)]


def write_rows(path: str, rows) -> None:
    ordered = sorted(rows, key=ResultRow.key)
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(CSV_VERSION + "\n")
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(COLUMNS)
        writer.writerows(row.to_csv() for row in ordered)


def read_rows(path: str) -> list[ResultRow]:
    with open(path, encoding="utf-8", newline="") as fh:
        first = fh.readline().rstrip("\n")
        if first != CSV_VERSION:
            raise ValueError(f"{path}: expected version header {CSV_VERSION!r}, found {first!r}")
        reader = csv.reader(fh)
        header = tuple(next(reader, ()))
        if header != COLUMNS:
            raise ValueError(f"{path}: unexpected columns {header}")
        return [ResultRow.from_csv(record) for record in reader if record]


def _worker_count() -> int:
    env = os.environ.get("RIS_EE_THREADS")
    if env is not None:
        count = int(env)
        if count < 1:
            raise ValueError("RIS_EE_THREADS must be a positive integer")
        return count
    return min(8, os.cpu_count() or 1)


def cmd_run(cfg: SystemConfig, method: str, seed: int):
    """One scenario: the report plus its summary-and-trace row block."""
    return _cell_rows(cfg, method, seed, _axis_dbw(cfg))


def cmd_sweep(spec: SweepSpec) -> list[ResultRow]:
    """Evaluate every (value, method, seed) cell, flushing after each one.

    Cells whose summary row already exists in the output file are skipped, so
    an interrupted sweep resumes where it stopped.
    """
    existing = read_rows(spec.output) if os.path.exists(spec.output) else []
    done = {(r.axis_value, r.method, r.seed) for r in existing if r.ao_iteration == 0}
    cells = [
        (float(value), method, seed)
        for value in spec.values
        for method in spec.methods
        for seed in range(spec.num_seeds)
    ]
    pending = [cell for cell in cells if cell not in done]
    # drop stragglers (e.g. trace rows without a summary) of cells being redone
    pending_keys = set(pending)
    rows = [r for r in existing if (r.axis_value, r.method, r.seed) not in pending_keys]
    configs = {value: _cell_config(spec.base, spec.axis, value) for value in {c[0] for c in pending}}
    if not pending:
        write_rows(spec.output, rows)
        return rows
    with ThreadPoolExecutor(max_workers=_worker_count()) as pool:
        futures = {
            pool.submit(_cell_rows_safe, configs[value], method, seed, value): (value, method, seed)
            for value, method, seed in pending
        }
        for future in as_completed(futures):
            rows.extend(future.result())
            write_rows(spec.output, rows)
    return rows


def cmd_oracle(cfg: SystemConfig, seed: int, mode: str) -> ResultRow:
    """Exhaustive reference row.  Mode ``ee`` maximizes energy efficiency with
    per-state optimal allocations; mode ``g`` minimizes the switching-plus-
    transmit cost at the allocation computed for the all-off state."""
    chan = draw_channel(cfg, seed)
    start = time.perf_counter()
    if mode == "g":
        ris0 = all_off_ris(chan.N)
        t0 = t_coefficients(effective_channel(chan, ris0))
        alloc = dinkelbach(alloc_problem(cfg, t0, 0))
        best = brute_force_g(cfg, chan, alloc.p).best_q
        p = alloc.p
    else:
        best = brute_force_ee(cfg, chan).best_q
        t_best = t_coefficients(effective_channel(chan, best))
        p = dinkelbach(alloc_problem(cfg, t_best, best.on_count)).p
    t = t_coefficients(effective_channel(chan, best))
    report = metrics(cfg, best, p, t)
    elapsed_ms = (time.perf_counter() - start) * 1e3
    return ResultRow(
        seed, _axis_dbw(cfg), f"oracle_{mode}", 0,
        report.se, report.ee, report.tx_power, report.on_count, elapsed_ms, report.feasible,
    )


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def __init__(self, *args, **kwargs):
        super().__init__(*args, **kwargs)
        # accept "-5,0,5"-style value lists, which the stock matcher would
        # read as an option string (no option here starts with a digit)
        self._negative_number_matcher = re.compile(r"^-\d|^-\.\d")

    def error(self, message):  # argparse would exit(2); the contract wants 1
        raise _UsageError(message)


def _parse_values(text: str) -> tuple[float, ...]:
    try:
        return tuple(float(part) for part in text.split(",") if part.strip())
    except ValueError as exc:
        raise ValueError(f"--values must be comma-separated numbers, got {text!r}") from exc


def _build_parser() -> _Parser:
    parser = _Parser(prog="ris-ee-lab", description="Energy-efficiency experiments for a 1-bit RIS downlink")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--config", required=True, help="JSON scenario file; empty file = reference defaults")
        p.add_argument("--set", action="append", default=[], metavar="KEY=VALUE",
                       help="override one config field (flag > file > default)")
        p.add_argument("--out", required=True, help="output CSV path")

    run_p = sub.add_parser("run", help="one scenario with its full iteration trace")
    common(run_p)
    run_p.add_argument("--method", required=True, choices=AO_METHODS)
    run_p.add_argument("--seed", type=int, default=0)

    for name, axis in (("sweep-power", "pmax_dbw"), ("sweep-elements", "ris_elements")):
        p = sub.add_parser(name, help=f"Monte Carlo sweep over the {axis} axis")
        common(p)
        p.add_argument("--values", required=True,
                       help="comma-separated axis values (dBW, or square element counts)")
        p.add_argument("--seeds", type=int, default=5, help="number of seeds (0..n-1)")
        p.add_argument("--methods", default=",".join(AO_METHODS), help="comma-separated method list")
        p.set_defaults(axis=axis)

    oracle_p = sub.add_parser("oracle", help="exhaustive reference (small element counts only)")
    common(oracle_p)
    oracle_p.add_argument("--mode", required=True, choices=("g", "ee"))
    oracle_p.add_argument("--seed", type=int, default=0)
    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except _UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    try:
        cfg = load_config(args.config, args.set)
        if args.command == "run":
            report, rows = cmd_run(cfg, args.method, args.seed)
            write_rows(args.out, rows)
            print(f"wrote {args.out}: method={args.method} seed={args.seed} "
                  f"se={report.se:.6g} ee={report.ee:.6g} iterations={report.iterations}")
        elif args.command in ("sweep-power", "sweep-elements"):
            spec = SweepSpec(
                axis=args.axis,
                values=_parse_values(args.values),
                methods=tuple(m for m in args.methods.split(",") if m.strip()),
                num_seeds=args.seeds,
                base=cfg,
                output=args.out,
            )
            rows = cmd_sweep(spec)
            cells = sum(1 for r in rows if r.ao_iteration == 0)
            print(f"wrote {args.out}: {cells} result cells")
        else:
            row = cmd_oracle(cfg, args.seed, args.mode)
            write_rows(args.out, [row])
            print(f"wrote {args.out}: mode={args.mode} seed={args.seed} ee={row.ee:.6g}")
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except _INFEASIBLE_ERRORS as exc:
        print(f"infeasible: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except _SOLVER_ERRORS as exc:
        print(f"solver failure: {exc}", file=sys.stderr)
        return EXIT_SOLVER
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())

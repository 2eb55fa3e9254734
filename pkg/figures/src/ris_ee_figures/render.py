"""Static figure rendering for ris-ee-lab result CSVs.

Reads the versioned CSV schema (``# ris-ee-lab v1``) and draws one figure
per call: spectral efficiency on the top axes, energy efficiency on the
bottom, one series per method showing the mean over seeds with a shaded
min-max band.  All science numbers come from the CSV; the only arithmetic
here is mean/min/max aggregation (plus forward-filling converged traces, so
short trajectories hold their final value over the shared iteration axis).
Rendering is deterministic for identical inputs: fixed style seed, fixed
fonts-as-text SVG output with the creation date stripped.
"""
from __future__ import annotations

import csv
from dataclasses import dataclass, field
from pathlib import Path

import matplotlib
import numpy as np

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402  (backend must be pinned first)

SCHEMA_VERSION = "# ris-ee-lab v1"
KINDS = ("convergence", "vs_power", "vs_elements")
REQUIRED_COLUMNS = (
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

DEFAULT_STYLES = {
    "sdp": {"color": "#1f77b4", "marker": "o"},
    "gradient": {"color": "#d62728", "marker": "s"},
    "successive": {"color": "#2ca02c", "marker": "^"},
    "random": {"color": "#9467bd", "marker": "v"},
    "all_off": {"color": "#7f7f7f", "marker": "x"},
}
_FALLBACK_COLORS = ("#17becf", "#bcbd22", "#e377c2", "#8c564b", "#ff7f0e")

_XLABEL = {
    "convergence": "AO iteration",
    "vs_power": "BS transmit power [dBW]",
    "vs_elements": "RIS elements",
}

_RC = {
    "svg.hashsalt": "ris-ee-figures",
    "svg.fonttype": "none",
    "figure.dpi": 110,
    "savefig.dpi": 110,
}


@dataclass(frozen=True)
class FigureSpec:
    """One figure request: input CSVs, kind, output image, method styles."""

    inputs: tuple[str, ...]
    kind: str
    output: str
    styles: dict = field(default_factory=lambda: dict(DEFAULT_STYLES))

    def __post_init__(self) -> None:
        object.__setattr__(self, "inputs", tuple(self.inputs))
        if not self.inputs:
            raise ValueError("at least one input CSV is required")
        if self.kind not in KINDS:
            raise ValueError(f"unknown figure kind {self.kind!r}: expected one of {KINDS}")
        suffix = Path(self.output).suffix.lower()
        if suffix not in (".svg", ".png"):
            raise ValueError(f"unsupported output format {suffix!r}: use .svg or .png")


@dataclass(frozen=True)
class Series:
    """Aggregated per-method curve: mean with min-max envelope."""

    x: np.ndarray
    se_mean: np.ndarray
    se_lo: np.ndarray
    se_hi: np.ndarray
    ee_mean: np.ndarray
    ee_lo: np.ndarray
    ee_hi: np.ndarray


def read_rows(path: str) -> list[dict]:
    """Parse one result CSV, checking the schema version and column set."""
    with open(path, encoding="utf-8", newline="") as fh:
        first = fh.readline().rstrip("\n")
        if first != SCHEMA_VERSION:
            raise ValueError(
                f"{path}: expected schema version {SCHEMA_VERSION!r}, found {first!r}"
            )
        reader = csv.DictReader(fh)
        names = reader.fieldnames or ()
        for column in REQUIRED_COLUMNS:
            if column not in names:
                raise ValueError(f"{path}: missing column {column!r}")
        rows = []
        for record in reader:
            rows.append(
                {
                    "seed": int(record["seed"]),
                    "axis_value": float(record["axis_value"]),
                    "method": record["method"],
                    "ao_iteration": int(record["ao_iteration"]),
                    "se": float(record["se"]),
                    "ee": float(record["ee"]),
                    "feasible": record["feasible"].strip().lower() == "true",
                }
            )
    return rows


def _convergence_series(rows: list[dict]) -> dict[str, Series]:
    """Per-method trace aggregation over seeds on a shared iteration axis."""
    axes = sorted({r["axis_value"] for r in rows})
    if len(axes) > 1:
        raise ValueError(
            f"convergence input mixes {len(axes)} axis values {axes}: pass a single scenario"
        )
    series: dict[str, Series] = {}
    for method in sorted({r["method"] for r in rows}):
        by_seed: dict[int, dict[int, tuple[float, float]]] = {}
        for r in rows:
            if r["method"] == method:
                by_seed.setdefault(r["seed"], {})[r["ao_iteration"]] = (r["se"], r["ee"])
        n_iters = max(max(trace) for trace in by_seed.values())
        x = np.arange(1, n_iters + 1)
        se_rows, ee_rows = [], []
        for trace in by_seed.values():
            last = trace[min(trace)]
            se_row, ee_row = [], []
            for i in x:
                last = trace.get(int(i), last)
                se_row.append(last[0])
                ee_row.append(last[1])
            se_rows.append(se_row)
            ee_rows.append(ee_row)
        se = np.asarray(se_rows)
        ee = np.asarray(ee_rows)
        series[method] = Series(
            x=x,
            se_mean=se.mean(axis=0), se_lo=se.min(axis=0), se_hi=se.max(axis=0),
            ee_mean=ee.mean(axis=0), ee_lo=ee.min(axis=0), ee_hi=ee.max(axis=0),
        )
    return series


def _summary_series(rows: list[dict]) -> dict[str, Series]:
    """Per-method sweep aggregation over seeds at each axis value."""
    series: dict[str, Series] = {}
    for method in sorted({r["method"] for r in rows}):
        cells: dict[float, list[tuple[float, float]]] = {}
        for r in rows:
            if r["method"] == method:
                cells.setdefault(r["axis_value"], []).append((r["se"], r["ee"]))
        x = np.asarray(sorted(cells))
        se = [np.asarray([v[0] for v in cells[val]]) for val in x]
        ee = [np.asarray([v[1] for v in cells[val]]) for val in x]
        series[method] = Series(
            x=x,
            se_mean=np.asarray([v.mean() for v in se]),
            se_lo=np.asarray([v.min() for v in se]),
            se_hi=np.asarray([v.max() for v in se]),
            ee_mean=np.asarray([v.mean() for v in ee]),
            ee_lo=np.asarray([v.min() for v in ee]),
            ee_hi=np.asarray([v.max() for v in ee]),
        )
    return series


def aggregate(rows: list[dict], kind: str) -> dict[str, Series]:
    """Mean/min/max series per method for the requested figure kind.

    Infeasible rows are dropped first (a failed sweep cell reports zeros that
    would corrupt the mean); convergence uses the trace rows, the sweep kinds
    the summary rows.
    """
    feasible = [r for r in rows if r["feasible"]]
    if kind == "convergence":
        kept = [r for r in feasible if r["ao_iteration"] >= 1]
    else:
        kept = [r for r in feasible if r["ao_iteration"] == 0]
    if not kept:
        raise ValueError(f"{kind}: no feasible series in the input rows")
    if kind == "convergence":
        return _convergence_series(kept)
    return _summary_series(kept)


def _method_order(series: dict[str, Series]) -> list[str]:
    known = [m for m in DEFAULT_STYLES if m in series]
    extra = sorted(m for m in series if m not in DEFAULT_STYLES)
    return known + extra


def render(spec: FigureSpec) -> str:
    """Render one figure (SE on top, EE below) and return the output path."""
    rows: list[dict] = []
    for path in spec.inputs:
        rows.extend(read_rows(path))
    series = aggregate(rows, spec.kind)
    with plt.rc_context(_RC):
        fig, (ax_se, ax_ee) = plt.subplots(2, 1, sharex=True, figsize=(6.4, 6.4))
        for slot, method in enumerate(_method_order(series)):
            s = series[method]
            style = dict(
                spec.styles.get(
                    method, {"color": _FALLBACK_COLORS[slot % len(_FALLBACK_COLORS)]}
                )
            )
            color = style["color"]
            for ax, mean, lo, hi in (
                (ax_se, s.se_mean, s.se_lo, s.se_hi),
                (ax_ee, s.ee_mean, s.ee_lo, s.ee_hi),
            ):
                ax.plot(s.x, mean, label=method, lw=1.6, ms=4.5, **style)
                ax.fill_between(s.x, lo, hi, color=color, alpha=0.18, lw=0)
        ax_se.set_ylabel("SE [bps/Hz]")
        ax_ee.set_ylabel("EE [bits/Joule]")
        ax_ee.set_xlabel(_XLABEL[spec.kind])
        ax_se.legend(loc="best", fontsize=9)
        for ax in (ax_se, ax_ee):
            ax.grid(True, alpha=0.3)
        fig.tight_layout()
        if Path(spec.output).suffix.lower() == ".svg":
            fig.savefig(spec.output, metadata={"Date": None})
        else:
            fig.savefig(spec.output)
        plt.close(fig)
    return spec.output

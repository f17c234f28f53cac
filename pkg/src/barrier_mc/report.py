"""Result rows, CSV files and log-log plots."""
from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, fields
from typing import Optional

HEADER = ("experiment", "kind", "x", "y", "t", "s", "lambda", "delta", "M", "n", "estimate",
          "std_error", "seed", "workers", "wall_time_s", "verdict")
VERDICTS = ("PASS", "FAIL", "INCONCLUSIVE", "N/A")


class SchemaError(Exception):
    """A CSV that does not follow :data:`HEADER`."""


@dataclass
class ResultRow:
    experiment: str
    kind: str
    x: Optional[float] = None
    y: Optional[float] = None
    t: Optional[float] = None
    s: Optional[float] = None
    lam: Optional[float] = None
    delta: Optional[float] = None
    M: Optional[float] = None
    n: Optional[int] = None
    estimate: Optional[float] = None
    std_error: Optional[float] = None
    seed: Optional[int] = None
    workers: Optional[int] = None
    wall_time_s: Optional[float] = None
    verdict: str = "N/A"

    def cells(self):
        return [_fmt(getattr(self, f.name)) for f in fields(self)]


def _fmt(v):
    if v is None:
        return ""
    if isinstance(v, str):
        return v
    if isinstance(v, bool):
        return "1" if v else "0"
    if isinstance(v, int):
        return str(v)
    v = float(v)
    if math.isnan(v):
        return "nan"
    if math.isinf(v):
        return "inf" if v > 0 else "-inf"
    # 17 significant digits round-trip every double
    return f"{v:.17g}"


def render_csv(rows):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(HEADER)
    for r in rows:
        w.writerow(r.cells())
    return buf.getvalue()


def write_csv(rows, path):
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(render_csv(rows))


def read_csv(path):
    """Rows as dicts of strings, keyed by :data:`HEADER`."""
    with open(path, encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise SchemaError(f"{path} is empty") from None
        if tuple(header) != HEADER:
            raise SchemaError(f"{path} header does not match the result schema")
        out = []
        for i, rec in enumerate(reader, 2):
            if len(rec) != len(HEADER):
                raise SchemaError(f"{path} line {i} has {len(rec)} fields, expected {len(HEADER)}")
            row = dict(zip(HEADER, rec))
            if row["verdict"] not in VERDICTS:
                raise SchemaError(f"{path} line {i} has unknown verdict {row['verdict']!r}")
            out.append(row)
    return out


def _num(v):
    return float(v) if v not in ("", None) else math.nan


def plot_rows(rows, path, title=None):
    """Log-log plot of the scaling rows of one experiment, written as SVG.

    Survival probabilities are plotted against ``t`` with a guide of slope -1;
    repulsion rows against ``s`` with a guide of slope -1/2. Other kinds get
    their estimates with 3-sigma bars against the row index. ``rows`` may be
    :class:`ResultRow` objects or dicts read back from a CSV, so the figure is
    a pure function of the CSV content.
    """
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    recs = [r if isinstance(r, dict) else dict(zip(HEADER, r.cells())) for r in rows]
    by_t = [r for r in recs if r["kind"].endswith("survival") or r["kind"] == "bound_scan/ratio"]
    by_s = [r for r in recs if r["kind"] == "repulsion"]
    with plt.rc_context({"svg.hashsalt": "barrier-mc", "svg.fonttype": "path",
                         "font.size": 9, "axes.grid": True, "grid.alpha": 0.3}):
        fig, ax = plt.subplots(figsize=(5.0, 3.6))
        if by_t or by_s:
            sel, axis, slope = (by_t, "t", -1.0) if by_t else (by_s, "s", -0.5)
            groups = {}
            for r in sel:
                key = (r["kind"], r["x"], r["y"])
                groups.setdefault(key, []).append(r)
            for (kind, x, y), grp in sorted(groups.items()):
                xs = [_num(r[axis]) for r in grp]
                ys = [_num(r["estimate"]) for r in grp]
                es = [3 * _num(r["std_error"]) for r in grp]
                ax.errorbar(xs, ys, yerr=es, fmt="o", ms=4, capsize=2,
                            label=f"{kind} x={x} y={y}")
            pts = [(_num(r[axis]), _num(r["estimate"])) for r in sel
                   if _num(r["estimate"]) > 0 and _num(r[axis]) > 0]
            if pts:
                x0, y0 = pts[0]
                x1 = max(p[0] for p in pts)
                gx = [x0, x1]
                ax.plot(gx, [y0 * (g / x0) ** slope for g in gx], "k--", lw=0.8,
                        label=f"slope {slope:g}")
                ax.set_xscale("log")
                ax.set_yscale("log")
            ax.set_xlabel(axis)
            ax.set_ylabel("estimate")
            ax.legend(fontsize=7)
        else:
            xs = list(range(len(recs)))
            ax.errorbar(xs, [_num(r["estimate"]) for r in recs],
                        yerr=[3 * _num(r["std_error"]) if r["std_error"] else 0 for r in recs],
                        fmt="o", ms=4, capsize=2)
            ax.set_xticks(xs)
            ax.set_xticklabels([r["kind"] for r in recs], rotation=60, ha="right", fontsize=6)
            ax.set_ylabel("estimate")
        if title:
            ax.set_title(title)
        fig.tight_layout()
        fig.savefig(path, format="svg", metadata={"Date": None})
        plt.close(fig)

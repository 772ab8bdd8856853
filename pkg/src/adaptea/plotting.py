"""Static SVG line charts of traces, sweeps and rate profiles.

Charts are drawn on a bare :class:`matplotlib.figure.Figure` with the SVG
canvas, so no display or pyplot state is involved. Output is byte-stable:
text stays text, the id salt is fixed and no timestamp is embedded. Each data
series is an SVG group with id ``series-<i>``.
"""
from __future__ import annotations

import io as _io
from pathlib import Path

import matplotlib
from matplotlib.backends.backend_svg import FigureCanvasSVG
from matplotlib.figure import Figure

from . import io

SCHEMAS = {
    "trace": ["t", "k", "r"],
    "sweep": ["variant", "lambda", "mean", "std", "min", "max", "reps", "found"],
    "relative": ["variant", "lambda", "ratio"],
    "rate-profile": ["variant", "d", "r"],
    "scaling": ["variant", "n", "lambda", "mean", "std", "reps", "found"],
}
PLOT_KINDS = tuple(SCHEMAS)

_RC = {"svg.fonttype": "none", "svg.hashsalt": "adaptea", "font.size": 9}


class SchemaError(ValueError):
    pass


def check_schema(kind: str, columns: list[str]) -> None:
    if kind not in SCHEMAS:
        raise ValueError(f"unknown plot kind {kind!r}; choose from {PLOT_KINDS}")
    expected = SCHEMAS[kind]
    missing = [c for c in expected if c not in columns]
    extra = [c for c in columns if c not in expected]
    if missing or extra:
        raise SchemaError(
            f"CSV does not match the {kind!r} schema: missing {missing}, unexpected {extra}"
        )


def _group(rows, key):
    out: dict[str, list[dict]] = {}
    for row in rows:
        out.setdefault(row[key], []).append(row)
    return out


def _series(kind, rows):
    """``(label, xs, ys)`` per series, plus axis labels and scales."""
    if kind == "trace":
        xs = [int(r["t"]) for r in rows]
        ys = [int(r["k"]) for r in rows]
        return [(None, xs, ys)], "generation", "fitness distance", "linear"
    if kind == "rate-profile":
        series = []
        for label, group in _group(rows, "variant").items():
            pts = sorted((int(r["d"]), float(r["r"])) for r in group)
            series.append((label, [p[0] for p in pts], [p[1] for p in pts]))
        return series, "fitness distance", "mutation strength r", "log"
    if kind == "scaling":
        series = []
        for label, group in _group(rows, "variant").items():
            pts = sorted((int(r["n"]), float(r["mean"])) for r in group)
            series.append((label, [p[0] for p in pts], [p[1] for p in pts]))
        return series, "n", "mean generations", "log"
    ycol, ylabel = ("ratio", "relative runtime") if kind == "relative" else ("mean", "mean generations")
    series = []
    for label, group in _group(rows, "variant").items():
        pts = sorted((int(r["lambda"]), float(r[ycol])) for r in group)
        series.append((label, [p[0] for p in pts], [p[1] for p in pts]))
    return series, "lambda", ylabel, "linear"


def render_svg(kind: str, rows: list[dict], header=()) -> str:
    series, xlabel, ylabel, yscale = _series(kind, rows)
    with matplotlib.rc_context(_RC):
        fig = Figure(figsize=(6.4, 4.0))
        canvas = FigureCanvasSVG(fig)
        ax = fig.add_subplot()
        for i, (label, xs, ys) in enumerate(series):
            style = dict(marker="o", markersize=2, linestyle="none") if kind == "rate-profile" else {}
            (line,) = ax.plot(xs, ys, label=label, **style)
            line.set_gid(f"series-{i}")
        ax.set_xlabel(xlabel)
        ax.set_ylabel(ylabel)
        ax.set_yscale(yscale)
        if kind == "scaling":
            ax.set_xscale("log")
        if kind == "relative":
            ax.axhline(1.0, color="0.6", linewidth=0.8, linestyle="--")
        if any(label is not None for label, _, _ in series):
            ax.legend()
        fig.tight_layout()
        buf = _io.StringIO()
        canvas.print_svg(buf, metadata={"Date": None})
    return _with_header(buf.getvalue(), header)


def _with_header(svg: str, header) -> str:
    lines = [line.replace("--", "- -") for line in header]
    comment = "<!--\n" + "\n".join(lines) + "\n-->\n"
    decl, sep, rest = svg.partition("\n")
    if decl.startswith("<?xml"):
        return decl + sep + comment + rest
    return comment + svg


def emit_plot(results_csv, kind: str, out_path) -> Path:
    """Render ``results_csv`` as a ``kind`` chart into ``out_path``.

    Raises on an unknown kind, a schema mismatch (naming the missing and
    unexpected columns) or a CSV without data rows; nothing is written then.
    """
    header, columns, rows = io.read_csv(results_csv)
    if not columns or not rows:
        raise ValueError(f"{results_csv}: no data rows to plot")
    check_schema(kind, columns)
    header = list(header) + [f"plot: kind={kind} source={Path(results_csv).name}"]
    svg = render_svg(kind, rows, header)
    out = Path(out_path)
    out.write_text(svg)
    return out

"""Parameter-evolution series and scatterplot matrices as CSV / standalone SVG."""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass
from xml.sax.saxutils import escape, quoteattr

import numpy as np

from .dataset import Dataset
from .errors import IterationOutOfRange, UnknownParameter
from .trace import STAT_NAMES

CLASS_COLORS = {0: "#d62728", 1: "#1f77b4"}
RUN_COLORS = ("#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b",
              "#e377c2", "#7f7f7f", "#bcbd22", "#17becf")


@dataclass(frozen=True)
class SeriesPoint:
    run_id: str
    x: float
    y: float


def evolution_series(traces, parameter_name: str) -> list[SeriesPoint]:
    """One point per iteration; x is cumulative all-threads time at the iteration's end."""
    if parameter_name not in STAT_NAMES:
        raise UnknownParameter(f"unknown parameter {parameter_name!r}; known: {list(STAT_NAMES)}")
    points = []
    for t in traces:
        x = 0.0
        for rec in t.records:
            x += rec.all_threads_time
            points.append(SeriesPoint(t.run_id, x, rec.stat(parameter_name)))
    return points


def series_to_csv(points) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["run_id", "x", "y"])
    for p in points:
        w.writerow([p.run_id, repr(p.x), repr(p.y)])
    return buf.getvalue()


def series_from_csv(text: str) -> list[SeriesPoint]:
    reader = csv.reader(io.StringIO(text))
    next(reader)
    return [SeriesPoint(r[0], float(r[1]), float(r[2])) for r in reader if r]


# ---------------------------------------------------------------- svg helpers

def _fmt(v: float) -> str:
    return f"{v:.2f}"


def _tick(v: float) -> str:
    if v == 0:
        return "0"
    if abs(v) >= 1e4 or abs(v) < 1e-2:
        return f"{v:.2e}"
    return f"{v:.4g}"


class _Scale:
    def __init__(self, lo, hi, a, b, log=False):
        self.log = log
        if log:
            lo, hi = math.log10(lo), math.log10(hi)
        if hi <= lo:
            lo, hi = lo - 0.5, hi + 0.5
        self.lo, self.hi, self.a, self.b = lo, hi, a, b

    def __call__(self, v):
        if self.log:
            v = math.log10(v)
        return self.a + (v - self.lo) / (self.hi - self.lo) * (self.b - self.a)


def _svg(width, height, body) -> str:
    head = (f'<?xml version="1.0" encoding="UTF-8"?>\n'
            f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" '
            f'width="{width}" height="{height}" viewBox="0 0 {width} {height}" '
            f'font-family="sans-serif">\n'
            f'<rect x="0" y="0" width="{width}" height="{height}" fill="white"/>\n')
    return head + "\n".join(body) + "\n</svg>\n"


def evolution_svg(traces, parameter_name: str, log_x: bool = False, title: str | None = None,
                  width: int = 720, height: int = 440) -> str:
    """Line chart of one statistic per run with a marker at every iteration end."""
    traces = list(traces)
    points = evolution_series(traces, parameter_name)
    left, right, top, bottom = 80, width - 170, 40, height - 50
    body = []
    title = title if title is not None else f"{parameter_name} evolution"
    body.append(f'<text x="{width / 2:.0f}" y="22" text-anchor="middle" font-size="15">'
                f'{escape(title)}</text>')
    body.append(f'<rect x="{left}" y="{top}" width="{right - left}" height="{bottom - top}" '
                f'fill="none" stroke="black"/>')
    if points:
        xs = np.array([p.x for p in points])
        ys = np.array([p.y for p in points])
        sx = _Scale(float(xs.min()), float(xs.max()), left, right, log=log_x)
        sy = _Scale(0.0 if ys.min() >= 0 else float(ys.min()), float(ys.max()), bottom, top)
        for frac in np.linspace(0, 1, 5):
            yv = sy.lo + frac * (sy.hi - sy.lo)
            yp = sy(yv)
            body.append(f'<line x1="{left - 4}" y1="{_fmt(yp)}" x2="{left}" y2="{_fmt(yp)}" stroke="black"/>')
            body.append(f'<text x="{left - 6}" y="{_fmt(yp + 4)}" text-anchor="end" font-size="10">'
                        f'{_tick(yv)}</text>')
            xv = sx.lo + frac * (sx.hi - sx.lo)
            xp = sx.a + frac * (sx.b - sx.a)
            label = _tick(10 ** xv if log_x else xv)
            body.append(f'<line x1="{_fmt(xp)}" y1="{bottom}" x2="{_fmt(xp)}" y2="{bottom + 4}" stroke="black"/>')
            body.append(f'<text x="{_fmt(xp)}" y="{bottom + 16}" text-anchor="middle" font-size="10">'
                        f'{label}</text>')
        for i, t in enumerate(traces):
            color = RUN_COLORS[i % len(RUN_COLORS)]
            run_pts = [p for p in points if p.run_id == t.run_id]
            coords = " ".join(f"{_fmt(sx(p.x))},{_fmt(sy(p.y))}" for p in run_pts)
            body.append(f'<g class="run" data-run={quoteattr(t.run_id)}>')
            body.append(f'<polyline points="{coords}" fill="none" stroke="{color}" stroke-width="1.5"/>')
            for p in run_pts:
                body.append(f'<circle cx="{_fmt(sx(p.x))}" cy="{_fmt(sy(p.y))}" r="3" fill="{color}"/>')
            body.append("</g>")
            ly = top + 14 * i + 8
            body.append(f'<text x="{right + 10}" y="{ly}" font-size="10" fill="{color}">'
                        f'{escape(t.run_id)}</text>')
    xlabel = "cumulative all-threads time [s]" + (" (log)" if log_x else "")
    body.append(f'<text x="{(left + right) / 2:.0f}" y="{height - 12}" text-anchor="middle" '
                f'font-size="12">{escape(xlabel)}</text>')
    body.append(f'<text x="16" y="{(top + bottom) / 2:.0f}" text-anchor="middle" font-size="12" '
                f'transform="rotate(-90 16 {(top + bottom) / 2:.0f})">{escape(parameter_name)}</text>')
    return _svg(width, height, body)


def scatter_matrix(ds: Dataset, iteration: int = 1, panel: int = 110, pad: int = 8) -> str:
    """P x P grid of pairwise scatterplots for one iteration's parameters, colored by label."""
    k = ds.spec.iterations
    if not 1 <= iteration <= k:
        raise IterationOutOfRange(f"iteration {iteration} outside 1..{k}")
    names = ds.spec.param_names
    P = len(names)
    X = ds.X
    cols = X[:, (iteration - 1) * P: iteration * P] if len(ds) else np.zeros((0, P))
    labels = [ex.label for ex in ds.examples]

    margin_l, margin_t, margin_b = 40, 40, 60
    size = P * panel
    width, height = margin_l + size + 20, margin_t + size + margin_b
    body = [f'<text x="{width / 2:.0f}" y="22" text-anchor="middle" font-size="14">'
            f'{escape(f"{ds.spec.set_id} parameters, iteration {iteration} (n={len(ds)})")}</text>']

    lo = cols.min(axis=0) if len(ds) else np.zeros(P)
    hi = cols.max(axis=0) if len(ds) else np.ones(P)
    for r in range(P):
        for c in range(P):
            x0 = margin_l + c * panel
            y0 = margin_t + r * panel
            sx = _Scale(float(lo[c]), float(hi[c]), x0 + pad, x0 + panel - pad)
            sy = _Scale(float(lo[r]), float(hi[r]), y0 + panel - pad, y0 + pad)
            body.append(f'<g class="panel" data-row="{r}" data-col="{c}" '
                        f'data-x={quoteattr(names[c])} data-y={quoteattr(names[r])}>')
            body.append(f'<rect x="{x0}" y="{y0}" width="{panel}" height="{panel}" '
                        f'fill="{"#f4f4f4" if r == c else "none"}" stroke="#888"/>')
            if r == c:
                body.append(f'<text x="{x0 + panel / 2:.0f}" y="{y0 + 14}" text-anchor="middle" '
                            f'font-size="9" fill="#444">{escape(names[r])}</text>')
            for i in range(len(ds)):
                body.append(f'<circle class="point label-{labels[i]}" cx="{_fmt(sx(cols[i, c]))}" '
                            f'cy="{_fmt(sy(cols[i, r]))}" r="2" fill="{CLASS_COLORS[labels[i]]}" '
                            f'fill-opacity="0.7"/>')
            body.append("</g>")
        # axis labels: columns along the bottom, rows down the left
        xb = margin_l + r * panel + panel / 2
        body.append(f'<text class="xlabel" x="{xb:.0f}" y="{margin_t + size + 16}" text-anchor="middle" '
                    f'font-size="10">{escape(names[r])}</text>')
        yl = margin_t + r * panel + panel / 2
        body.append(f'<text class="ylabel" x="14" y="{yl:.0f}" text-anchor="middle" font-size="10" '
                    f'transform="rotate(-90 14 {yl:.0f})">{escape(names[r])}</text>')
    ly = margin_t + size + 40
    for label, text in ((1, "terminating (1)"), (0, "not terminating (0)")):
        lx = margin_l + (0 if label == 1 else 160)
        body.append(f'<circle cx="{lx + 5}" cy="{ly - 4}" r="4" fill="{CLASS_COLORS[label]}"/>')
        body.append(f'<text x="{lx + 14}" y="{ly}" font-size="11">{text}</text>')
    return _svg(width, height, body)

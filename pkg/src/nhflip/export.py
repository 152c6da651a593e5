"""CSV, text and SVG writers. CSV is the authoritative output; numbers use
17 significant digits so files round-trip exactly and compare byte for byte."""

from __future__ import annotations

import html
from pathlib import Path
from typing import Mapping, Sequence

import numpy as np

from .observables import ObservableSeries


def fmt(x) -> str:
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        return f"{float(x):.17g}"
    return str(x)


def write_csv(path: Path, header: Sequence[str], columns: Sequence[np.ndarray]) -> None:
    rows = np.column_stack([np.asarray(c, dtype=float) for c in columns])
    with open(path, "w", newline="\n") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(f"{v:.17g}" for v in row) + "\n")


def series_columns(series: ObservableSeries, amplitudes: np.ndarray | None = None):
    n = series.P_n.shape[1]
    header = ["t"] + [f"P_{i + 1}" for i in range(n)]
    cols = [series.t] + [series.P_n[:, i] for i in range(n)]
    if series.P_c is not None:
        header.append("P_c")
        cols.append(series.P_c)
    header += ["P_tot", "F"]
    cols += [series.P_tot, series.F]
    if amplitudes is not None:
        for i in range(n):
            header += [f"Re_c{i + 1}", f"Im_c{i + 1}"]
            cols += [amplitudes[:, i].real, amplitudes[:, i].imag]
    return header, cols


def write_series_csv(path: Path, series: ObservableSeries, amplitudes: np.ndarray | None = None) -> None:
    header, cols = series_columns(series, amplitudes)
    write_csv(path, header, cols)


def write_matrix_csv(path: Path, matrix: np.ndarray) -> None:
    """Complex matrix as rows of interleaved (re, im) pairs."""
    n = matrix.shape[1]
    header = [f"{part}_{m + 1}" for m in range(n) for part in ("re", "im")]
    cols = []
    for m in range(n):
        cols += [matrix[:, m].real, matrix[:, m].imag]
    write_csv(path, header, cols)


def write_key_values(path: Path, items: Mapping[str, object]) -> None:
    with open(path, "w", newline="\n") as fh:
        for key, value in items.items():
            fh.write(f"{key}: {fmt(value)}\n")


_COLORS = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#e377c2", "#7f7f7f")


def _ticks(lo: float, hi: float, n: int = 5) -> np.ndarray:
    if hi <= lo:
        return np.array([lo])
    raw = (hi - lo) / n
    mag = 10 ** np.floor(np.log10(raw))
    step = min((m * mag for m in (1, 2, 2.5, 5, 10) if m * mag >= raw), default=raw)
    start = np.ceil(lo / step) * step
    return np.arange(start, hi + 0.5 * step, step)


def line_plot(
    path: Path,
    x: np.ndarray,
    series: Mapping[str, np.ndarray],
    title: str = "",
    xlabel: str = "",
    ylabel: str = "",
    width: int = 640,
    height: int = 400,
) -> None:
    """Standalone SVG line chart (fixed viewBox, one polyline per series)."""
    left, right, top, bottom = 70, 130, 40, 50
    pw, ph = width - left - right, height - top - bottom
    x = np.asarray(x, dtype=float)
    ys = [np.asarray(v, dtype=float) for v in series.values()]
    x0, x1 = float(x.min()), float(x.max())
    y0 = min(float(np.nanmin(y)) for y in ys)
    y1 = max(float(np.nanmax(y)) for y in ys)
    if y1 - y0 < 1e-12:
        y0, y1 = y0 - 0.5, y1 + 0.5
    pad = 0.05 * (y1 - y0)
    y0, y1 = y0 - pad, y1 + pad
    if x1 == x0:
        x1 = x0 + 1.0

    def sx(v):
        return left + (v - x0) / (x1 - x0) * pw

    def sy(v):
        return top + (y1 - v) / (y1 - y0) * ph

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 {width} {height}" '
        f'width="{width}" height="{height}" font-family="sans-serif" font-size="12">',
        f'<rect x="0" y="0" width="{width}" height="{height}" fill="white"/>',
        f'<rect x="{left}" y="{top}" width="{pw}" height="{ph}" fill="none" stroke="black"/>',
    ]
    for tx in _ticks(x0, x1):
        px = sx(tx)
        out.append(f'<line x1="{px:.2f}" y1="{top + ph}" x2="{px:.2f}" y2="{top + ph + 5}" stroke="black"/>')
        out.append(f'<text x="{px:.2f}" y="{top + ph + 18}" text-anchor="middle">{tx:g}</text>')
    for ty in _ticks(y0, y1):
        py = sy(ty)
        out.append(f'<line x1="{left - 5}" y1="{py:.2f}" x2="{left}" y2="{py:.2f}" stroke="black"/>')
        out.append(f'<text x="{left - 8}" y="{py + 4:.2f}" text-anchor="end">{ty:.3g}</text>')
    for i, (label, y) in enumerate(zip(series.keys(), ys)):
        color = _COLORS[i % len(_COLORS)]
        pts = " ".join(f"{sx(a):.2f},{sy(b):.2f}" for a, b in zip(x, y) if np.isfinite(b))
        out.append(f'<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{pts}"/>')
        ly = top + 15 + 18 * i
        out.append(f'<line x1="{left + pw + 10}" y1="{ly}" x2="{left + pw + 30}" y2="{ly}" stroke="{color}" stroke-width="2"/>')
        out.append(f'<text x="{left + pw + 35}" y="{ly + 4}">{html.escape(label)}</text>')
    if title:
        out.append(f'<text x="{width / 2:.1f}" y="22" text-anchor="middle" font-size="14">{html.escape(title)}</text>')
    if xlabel:
        out.append(f'<text x="{left + pw / 2:.1f}" y="{height - 10}" text-anchor="middle">{html.escape(xlabel)}</text>')
    if ylabel:
        out.append(
            f'<text x="16" y="{top + ph / 2:.1f}" text-anchor="middle" '
            f'transform="rotate(-90 16 {top + ph / 2:.1f})">{html.escape(ylabel)}</text>'
        )
    out.append("</svg>")
    Path(path).write_text("\n".join(out) + "\n")

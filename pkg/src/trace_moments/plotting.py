"""Histogram-versus-density overlays.

Two outputs share one data path: a self-contained gnuplot script with the
histogram and curve inlined, and a matplotlib figure written to disk.
matplotlib is imported lazily with the non-interactive Agg backend.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from . import distributions
from .core import EnsembleParams
from .verify import Histogram, histogram

__all__ = ["Overlay", "trace_overlays", "gnuplot_script", "save_figure"]


@dataclass(frozen=True)
class Overlay:
    """One panel: an empirical histogram and the closed-form density on a grid."""

    label: str
    hist: Histogram
    x: tuple
    density: tuple


def _curve(log_pdf: Callable[[float], float], lo: float, hi: float, points: int = 200):
    xs = np.linspace(lo, hi, points)
    ys = []
    for x in xs:
        try:
            ys.append(math.exp(log_pdf(float(x))))
        except ValueError:
            ys.append(0.0)
    return tuple(xs.tolist()), tuple(ys)


def trace_overlays(params: EnsembleParams, t1, t2, bins: int = 50) -> list:
    """Overlays for ``t1`` against its normal law and ``t2`` against its gamma law."""
    t1 = np.asarray(t1, dtype=float)
    t2 = np.asarray(t2, dtype=float)
    h1 = histogram(t1, bins=bins)
    h2 = histogram(t2, bins=bins)
    x1, y1 = _curve(lambda x: distributions.log_q_t1(params, x), h1.edges[0], h1.edges[-1])
    lo2 = max(h2.edges[0], 1e-9 * max(h2.edges[-1], 1.0))
    x2, y2 = _curve(lambda x: distributions.log_q_t2(params, x), lo2, h2.edges[-1])
    return [Overlay("t1", h1, x1, y1), Overlay("t2", h2, x2, y2)]


def gnuplot_script(params: EnsembleParams, overlays: Sequence[Overlay]) -> str:
    """Plain-text gnuplot program drawing every overlay in a vertical multiplot."""
    title = f"N={params.n_dim}, beta={params.beta!r}"
    lines = [
        "# histogram of sampled traces against the closed-form density",
        "set terminal pngcairo size 900,%d" % (380 * len(overlays)),
        "set output 'overlay.png'",
        f"set multiplot layout {len(overlays)},1 title '{title}'",
        "set style fill solid 0.4 noborder",
    ]
    for i, ov in enumerate(overlays):
        hist_name, curve_name = f"$hist{i}", f"$curve{i}"
        lines.append(f"{hist_name} << EOD")
        dens = ov.hist.density()
        edges = ov.hist.edges
        for a, b, d in zip(edges[:-1], edges[1:], dens):
            lines.append(f"{repr(0.5 * (a + b))} {repr(float(d))} {repr(b - a)}")
        lines.append("EOD")
        lines.append(f"{curve_name} << EOD")
        for x, y in zip(ov.x, ov.density):
            lines.append(f"{repr(x)} {repr(y)}")
        lines.append("EOD")
        lines.append(f"set xlabel '{ov.label}'")
        lines.append("set ylabel 'density'")
        lines.append(
            f"plot {hist_name} using 1:2:3 with boxes title 'sampled', "
            f"{curve_name} using 1:2 with lines lw 2 title 'closed form'"
        )
    lines.append("unset multiplot")
    return "\n".join(lines) + "\n"


def save_figure(params: EnsembleParams, overlays: Sequence[Overlay], path: str) -> None:
    """Render the overlays with matplotlib; the format follows the file suffix."""
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    fig, axes = plt.subplots(len(overlays), 1, figsize=(7, 3.2 * len(overlays)), squeeze=False)
    for ax, ov in zip(axes[:, 0], overlays):
        edges = np.asarray(ov.hist.edges)
        ax.bar(edges[:-1], ov.hist.density(), width=np.diff(edges), align="edge",
               alpha=0.4, label="sampled")
        ax.plot(ov.x, ov.density, lw=2, color="C3", label="closed form")
        ax.set_xlabel(ov.label)
        ax.set_ylabel("density")
        ax.legend(frameon=False)
    fig.suptitle(f"N={params.n_dim}, beta={params.beta:g}")
    fig.tight_layout()
    # drop timestamps so repeated renders are byte-identical
    suffix = path.rsplit(".", 1)[-1].lower()
    meta = {"png": {"Software": None}, "svg": {"Date": None}, "pdf": {"CreationDate": None}}.get(suffix)
    fig.savefig(path, metadata=meta)
    plt.close(fig)

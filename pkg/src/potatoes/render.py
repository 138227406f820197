"""SVG drawings of meshes and PNG growth plots."""
from __future__ import annotations

from xml.sax.saxutils import quoteattr

from .mesh import Mesh

PALETTE = ["#e6550d", "#3182bd", "#31a354", "#756bb1", "#de2d26", "#636363"]
SIZE = 600
MARGIN = 20


def _fmt(v: float) -> str:
    s = f"{v:.3f}".rstrip("0").rstrip(".")
    return "0" if s == "-0" else s


def render_svg(mesh: Mesh, highlights=None, title: str | None = None) -> str:
    """Mesh edges, vertices and optional filled polygons as an SVG 1.1 document.

    Output depends only on the input, so repeated renders are byte-identical.
    """
    xs = [float(p.x) for p in mesh.vertices]
    ys = [float(p.y) for p in mesh.vertices]
    x0, x1, y0, y1 = min(xs), max(xs), min(ys), max(ys)
    span = max(x1 - x0, y1 - y0) or 1.0
    scale = (SIZE - 2 * MARGIN) / span
    width = _fmt((x1 - x0) * scale + 2 * MARGIN)
    height = _fmt((y1 - y0) * scale + 2 * MARGIN)

    def pt(i):
        return _fmt((xs[i] - x0) * scale + MARGIN), _fmt((y1 - ys[i]) * scale + MARGIN)

    out = ['<?xml version="1.0" encoding="UTF-8"?>',
           f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{width}" '
           f'height="{height}" viewBox="0 0 {width} {height}">']
    if title:
        out.append(f"<title>{title}</title>")
    for k, poly in enumerate(highlights or []):
        cyc = poly.vertex_cycle if hasattr(poly, "vertex_cycle") else poly
        pts = " ".join(",".join(pt(i)) for i in cyc)
        color = PALETTE[k % len(PALETTE)]
        out.append(f'<polygon points={quoteattr(pts)} fill="{color}" fill-opacity="0.35" '
                   f'stroke="{color}" stroke-width="3"/>')
    out.append('<g stroke="#222" stroke-width="1">')
    for a, b in mesh.edges:
        (ax, ay), (bx, by) = pt(a), pt(b)
        out.append(f'<line x1="{ax}" y1="{ay}" x2="{bx}" y2="{by}"/>')
    out.append("</g>")
    out.append('<g fill="#000">')
    for i in range(mesh.n):
        cx, cy = pt(i)
        out.append(f'<circle cx="{cx}" cy="{cy}" r="2"/>')
    out.append("</g>")
    out.append("</svg>")
    return "\n".join(out) + "\n"


def plot_growth(estimates: dict, path, title: str = "") -> None:
    """Log-scale count-vs-size plot with the fitted curve for each series."""
    import math

    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    fig, ax = plt.subplots(figsize=(6, 4), dpi=100)
    for k, (label, est) in enumerate(sorted(estimates.items())):
        ns = [n for n, _ in est.series]
        cs = [math.log10(c) for _, c in est.series]
        color = PALETTE[k % len(PALETTE)]
        ax.plot(ns, cs, "o", color=color, label=f"{label} ({est.model.value}: {est.parameter:.4f})")
        if est.model.value == "Exponential":
            slope = math.log10(est.parameter)
            icpt = sum(c - slope * n for n, c in zip(ns, cs)) / len(ns)
            ax.plot(ns, [icpt + slope * n for n in ns], "-", color=color, lw=1)
        else:
            logs = [math.log10(n) for n in ns]
            icpt = sum(c - est.parameter * l for l, c in zip(logs, cs)) / len(ns)
            ax.plot(ns, [icpt + est.parameter * l for l in logs], "-", color=color, lw=1)
            ax.set_xscale("log")
    ax.set_xlabel("size n")
    ax.set_ylabel("log10(count)")
    if title:
        ax.set_title(title)
    ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(path, metadata={"Software": None})
    plt.close(fig)

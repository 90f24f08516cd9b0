"""Optional figure rendering next to the delimited reports.

Matplotlib is imported lazily and only when a figures directory is
requested; CSV stays the machine-readable contract and nothing here feeds
back into any computation.
"""

from __future__ import annotations

import math
from pathlib import Path


def _axes(title: str, xlabel: str, ylabel: str):
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    fig, ax = plt.subplots(figsize=(6.4, 4.0))
    ax.set_title(title)
    ax.set_xlabel(xlabel)
    ax.set_ylabel(ylabel)
    ax.grid(True, alpha=0.3)
    return fig, ax


def _save(fig, outdir: Path, name: str) -> Path:
    outdir.mkdir(parents=True, exist_ok=True)
    path = outdir / name
    fig.savefig(path, dpi=150, bbox_inches="tight")
    import matplotlib.pyplot as plt

    plt.close(fig)
    return path


def render_moments(rows, outdir: Path, stem: str) -> Path:
    fig, ax = _axes("per-prime moments", "p", "M")
    exps = sorted({e for r in rows for e in r.moments})
    for e in exps:
        pts = [(r.p, r.moments[e]) for r in rows if e in r.moments]
        if pts:
            ax.plot(*zip(*pts), ".", ms=3, label=f"|W|^{e}")
    refs = {e: r.references[e] for r in rows for e in r.references}
    for e, ref in sorted(refs.items()):
        ax.axhline(ref, color="k", lw=0.6, ls="--")
    ax.set_xscale("log")
    ax.legend()
    return _save(fig, outdir, f"{stem}_moments.png")


def render_dichotomy(report, outdir: Path, stem: str) -> Path:
    fig, ax = _axes(f"fourth-moment scan ({report.verdict})", "p", "M2")
    ps = [r.p for r in report.rows]
    ms = [r.m2 for r in report.rows]
    colors = ["tab:red" if r.high else "tab:blue" for r in report.rows]
    ax.scatter(ps, ms, s=6, c=colors)
    ax.axhline(2.0, color="k", lw=0.6, ls="--")
    ax.axhline(3.0, color="k", lw=0.6, ls=":")
    ax.set_xscale("log")
    return _save(fig, outdir, f"{stem}_dichotomy.png")


def render_shao(points, outdir: Path, stem: str) -> Path:
    fig, ax = _axes("prime-averaged second moments", "log log x", "S(x)")
    xs = [math.log(math.log(pt.x)) for pt in points]
    ax.plot(xs, [pt.partial_sum for pt in points], "o-", label="S(x)")
    if points:
        k = points[0].kappa
        ax.plot(xs, [(k - 1) * u for u in xs], "--", label=f"(kappa-1) log log x")
    ax.legend()
    return _save(fig, outdir, f"{stem}_shao.png")


def render_sweep(report, outdir: Path, stem: str) -> Path:
    fig, ax = _axes("squarefree-modulus sweep", "x", "normalized ratio")
    for j, marker in ((1, "o"), (2, "s"), (4, "^")):
        ax.plot(report.grid, report.ratios[j], marker + "-", label=f"j={j}")
    ax.set_xscale("log")
    ax.set_yscale("log")
    ax.legend()
    return _save(fig, outdir, f"{stem}_sweep.png")


def render_rmt(rows, outdir: Path, stem: str) -> Path:
    fig, ax = _axes("trace moments: Monte Carlo vs reference", "k", "moment")
    ks = [r["k"] for r in rows]
    ax.errorbar(
        ks,
        [r["mc"] for r in rows],
        yerr=[3 * r["se"] for r in rows],
        fmt="o",
        label="MC (3 SE)",
    )
    ax.plot(ks, [r["reference"] for r in rows], "k_", ms=12, label="reference")
    ax.set_yscale("log")
    ax.legend()
    return _save(fig, outdir, f"{stem}_rmt.png")

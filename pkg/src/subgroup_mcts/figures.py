"""Figure rendering for run and bench reports.

matplotlib is imported lazily with the Agg backend so library users and the
test suite never pay the import unless a figure is actually rendered.
"""

from __future__ import annotations

from pathlib import Path


def _plt():
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt
    return plt


def render_checkpoints(rows: list, path) -> None:
    """Anytime curves: best quality and diversity against iterations done."""
    if not rows:
        return
    plt = _plt()
    iterations = [r["iteration"] for r in rows]
    best = [r["best_phi"] for r in rows]
    div = [r["diversity"] for r in rows]
    fig, ax1 = plt.subplots(figsize=(7, 4))
    ax1.plot(iterations, best, marker="o", color="tab:blue", label="best quality")
    ax1.set_xlabel("iterations")
    ax1.set_ylabel("best quality", color="tab:blue")
    ax2 = ax1.twinx()
    ax2.plot(iterations, div, marker="s", color="tab:orange", label="diversity")
    ax2.set_ylabel("diversity of filtered set", color="tab:orange")
    ax1.set_title("anytime progress")
    fig.tight_layout()
    fig.savefig(Path(path), dpi=120)
    plt.close(fig)


def render_result(entries: list, path) -> None:
    """Quality bar chart of the final filtered result set."""
    if not entries:
        return
    plt = _plt()
    ranks = list(range(1, len(entries) + 1))
    phis = [e.phi for e in entries]
    fig, ax = plt.subplots(figsize=(7, 4))
    ax.bar(ranks, phis, color="tab:blue")
    ax.set_xlabel("rank")
    ax.set_ylabel("quality")
    ax.set_title("result set quality by rank")
    fig.tight_layout()
    fig.savefig(Path(path), dpi=120)
    plt.close(fig)


def render_bench(rows: list, path) -> None:
    """Mean diversity per bench cell, one bar per (data, algo) row."""
    rows = [r for r in rows if r.get("status") == "ok" and r.get("diversity") != ""]
    if not rows:
        return
    plt = _plt()
    labels = [f"{r['data']}\n{r['algo']}" for r in rows]
    values = [float(r["diversity"]) for r in rows]
    fig, ax = plt.subplots(figsize=(max(6, 1.2 * len(rows)), 4))
    ax.bar(range(len(rows)), values, color="tab:green")
    ax.set_xticks(range(len(rows)))
    ax.set_xticklabels(labels, fontsize=7)
    ax.set_ylabel("mean diversity")
    ax.set_title("bench cells")
    fig.tight_layout()
    fig.savefig(Path(path), dpi=120)
    plt.close(fig)

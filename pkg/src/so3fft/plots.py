"""Figure rendering for harness reports.

Figures are written straight to files (Agg backend, no display) next to the
CSV they illustrate: accuracy and timing against band-limit on log-log axes,
and a bar chart for quadrature checks.
"""

from __future__ import annotations

from collections import defaultdict

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

_EPS = 1e-17  # floor so exact zeros survive the log axis


def _grouped(reports):
    groups = defaultdict(list)
    for report in reports:
        groups[(report.reality, report.path)].append(report)
    return groups


def plot_accuracy(reports, path) -> None:
    """Max absolute round-trip error against L, one series per config."""
    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    for (reality, algo), group in sorted(_grouped(reports).items()):
        group = sorted(group, key=lambda r: r.L)
        ax.loglog(
            [r.L for r in group],
            [max(r.max_abs_error, _EPS) for r in group],
            marker="o",
            label=f"{reality}, {algo}",
        )
    ax.set_xlabel("band-limit L")
    ax.set_ylabel("max abs error")
    ax.grid(True, which="both", alpha=0.3)
    ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def plot_timing(reports, path) -> None:
    """Mean transform time against L with an L^3 slope for reference."""
    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    for (reality, algo), group in sorted(_grouped(reports).items()):
        group = sorted(group, key=lambda r: r.L)
        Ls = [r.L for r in group]
        times = [0.5 * (r.forward_seconds + r.inverse_seconds) for r in group]
        ax.loglog(Ls, times, marker="o", label=f"{reality}, {algo}")
        if len(Ls) > 1:
            anchor = times[0]
            ax.loglog(
                Ls,
                [anchor * (L / Ls[0]) ** 3 for L in Ls],
                linestyle="--",
                color="grey",
                alpha=0.6,
                label="L^3 slope" if (reality, algo) == sorted(_grouped(reports))[0] else None,
            )
    ax.set_xlabel("band-limit L")
    ax.set_ylabel("mean transform time [s]")
    ax.grid(True, which="both", alpha=0.3)
    ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def plot_quadrature(report, path) -> None:
    """Bar chart of the three quadrature error metrics."""
    fig, ax = plt.subplots(figsize=(5.0, 3.6))
    labels = ["constant", "random f vs f000", "basis l > 0"]
    values = [
        max(report.const_abs_error, _EPS),
        max(report.random_rel_error, _EPS),
        max(report.basis_max_abs, _EPS),
    ]
    ax.bar(labels, values)
    ax.set_yscale("log")
    ax.set_ylabel("error")
    ax.set_title(f"quadrature checks, L={report.L} M={report.M} N={report.N}")
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)

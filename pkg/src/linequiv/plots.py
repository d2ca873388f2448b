"""Figure rendering for experiment reports.

Renders two PNGs next to the CSV: communication cost against arity, and
per-cell correctness.  Pure presentation; every number comes straight from
the rows the CSV carries.
"""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402  (backend must be pinned first)

_RC = {
    "figure.figsize": (7.0, 4.4),
    "axes.grid": True,
    "grid.alpha": 0.3,
    "font.size": 10,
    "legend.fontsize": 8,
}


def _series(rows):
    """Group completed rows by (family, omega) and sort each by arity."""
    groups: dict = {}
    for row in rows:
        if row.skipped:
            continue
        groups.setdefault((row.family, row.omega), []).append(row)
    for key in groups:
        groups[key].sort(key=lambda r: r.n)
    return dict(sorted(groups.items(), key=lambda kv: (kv[0][0], str(kv[0][1]))))


def plot_bits(rows, path) -> None:
    with plt.rc_context(_RC):
        fig, ax = plt.subplots()
        for (family, omega), series in _series(rows).items():
            ax.plot(
                [r.n for r in series],
                [r.mean_bits for r in series],
                marker="o",
                label=f"{family}, omega={omega}",
            )
        ax.set_xlabel("arity n")
        ax.set_ylabel("mean bits per run")
        ax.set_yscale("log")
        ax.set_title("communication cost")
        ax.legend(loc="best")
        fig.tight_layout()
        fig.savefig(path, dpi=150)
        plt.close(fig)


def plot_correctness(rows, path) -> None:
    with plt.rc_context(_RC):
        fig, ax = plt.subplots()
        labels = []
        values = []
        for (family, omega), series in _series(rows).items():
            for r in series:
                labels.append(f"n={r.n} {family} w={omega}")
                values.append(float(r.correct_frac))
        xs = range(len(labels))
        ax.bar(xs, values, color="#4878a8")
        ax.set_xticks(list(xs))
        ax.set_xticklabels(labels, rotation=60, ha="right", fontsize=7)
        ax.set_ylim(0, 1.05)
        ax.set_ylabel("fraction of correct outcomes")
        ax.set_title("protocol correctness by cell")
        fig.tight_layout()
        fig.savefig(path, dpi=150)
        plt.close(fig)


def render_report(rows, csv_path) -> list[Path]:
    """Render the standard figures alongside a CSV; returns written paths."""
    base = Path(csv_path)
    bits_path = base.with_name(base.stem + "_bits.png")
    correct_path = base.with_name(base.stem + "_correctness.png")
    plot_bits(rows, bits_path)
    plot_correctness(rows, correct_path)
    return [bits_path, correct_path]

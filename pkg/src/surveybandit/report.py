"""CSV writers and matplotlib figures for simulation output."""

from __future__ import annotations

import csv
from pathlib import Path
from typing import Iterable

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

from .simulator import Curves, Trajectory  # noqa: E402

TRAJECTORY_HEADER = ("t", "arm", "survey_len", "cum_survey_len", "reward", "regret", "cum_regret")
AGGREGATE_HEADER = ("t", "mean_cum_regret", "sd_cum_regret", "mean_cum_survey_len", "sd_cum_survey_len")


def _fmt(v) -> str:
    return repr(v) if isinstance(v, float) else str(v)


def _write(path: Path, header: Iterable[str], rows) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([_fmt(v) for v in row])
    return path


def write_trajectory_csv(tr: Trajectory, path: str | Path) -> Path:
    return _write(Path(path), TRAJECTORY_HEADER, tr.rows())


def write_aggregate_csv(curves: Curves, path: str | Path) -> Path:
    return _write(Path(path), AGGREGATE_HEADER, curves.rows())


def plot_curves(curves: Curves, out_dir: str | Path, title: str = "") -> list[Path]:
    """Cumulative regret and cumulative survey length, mean with a +-1 sd band."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    panels = [
        ("regret.png", "Cumulative regret", curves.mean_cum_regret, curves.sd_cum_regret),
        ("survey_length.png", "Cumulative survey length", curves.mean_cum_survey_len, curves.sd_cum_survey_len),
    ]
    paths = []
    for fname, ylabel, mean, sd in panels:
        fig, ax = plt.subplots(figsize=(5, 3.5))
        ax.plot(curves.t, mean, lw=1.5)
        ax.fill_between(curves.t, mean - sd, mean + sd, alpha=0.25, lw=0)
        ax.set_xlabel("time step")
        ax.set_ylabel(ylabel)
        if title:
            ax.set_title(title, fontsize=10)
        ax.grid(True, alpha=0.3)
        fig.tight_layout()
        path = out_dir / fname
        fig.savefig(path, dpi=120)
        plt.close(fig)
        paths.append(path)
    return paths

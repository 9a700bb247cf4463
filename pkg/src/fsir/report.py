"""Result persistence: CSVs with full-precision decimals and rendered
figures alongside them."""

from __future__ import annotations

import os

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np
import pandas as pd

FLOAT_FORMAT = "%.17g"

__all__ = [
    "FLOAT_FORMAT",
    "write_frame",
    "write_run_record",
    "write_roc",
    "plot_roc",
    "plot_losses",
    "plot_table",
]


def write_frame(frame: pd.DataFrame, path) -> None:
    """CSV with '.' decimals, no thousands separators, 17 significant digits."""
    frame.to_csv(path, index=False, float_format=FLOAT_FORMAT)


def write_run_record(record, out_dir) -> None:
    """One directory per run: config echo, summary, and the per-replication
    loss/angle columns."""
    os.makedirs(out_dir, exist_ok=True)
    pd.DataFrame([record.config]).to_csv(
        os.path.join(out_dir, "config.csv"), index=False, float_format=FLOAT_FORMAT
    )
    summary = pd.DataFrame(
        [
            {
                "mean_loss": record.mean,
                "se_loss": record.se,
                "replications": record.losses.size,
                "failed": record.failed,
                "excluded_clients": record.excluded,
                "wall_time_s": record.wall_time,
                "seed": record.seed,
            }
        ]
    )
    write_frame(summary, os.path.join(out_dir, "summary.csv"))
    per_rep = pd.DataFrame(
        {
            "replication": np.arange(record.losses.size),
            "loss": record.losses,
            "angle": record.angles,
        }
    )
    write_frame(per_rep, os.path.join(out_dir, "replications.csv"))
    plot_losses(record.losses, os.path.join(out_dir, "losses.png"))


def write_roc(curve, path) -> None:
    frame = pd.DataFrame(curve.points, columns=["fpr", "tpr"])
    write_frame(frame, path)


def plot_roc(curves: dict, path) -> None:
    """ROC curves of the attack arms on one axis, diagonal for reference."""
    fig, ax = plt.subplots(figsize=(5, 5))
    for name, curve in curves.items():
        ax.plot(curve.points[:, 0], curve.points[:, 1], label=f"{name} (AUC {curve.auc:.3f})")
    ax.plot([0, 1], [0, 1], "k--", linewidth=0.8)
    ax.set_xlabel("false positive rate")
    ax.set_ylabel("true positive rate")
    ax.set_title("Tracing attack")
    ax.legend(loc="lower right")
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def plot_losses(losses: np.ndarray, path) -> None:
    fig, ax = plt.subplots(figsize=(5, 3.5))
    ax.hist(np.asarray(losses, dtype=float), bins=min(30, max(5, losses.size // 5)))
    ax.set_xlabel("projection loss")
    ax.set_ylabel("replications")
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def plot_table(frame: pd.DataFrame, path) -> None:
    """Measured vs reported mean loss against K, one panel per model."""
    models = sorted(frame["model"].unique())
    fig, axes = plt.subplots(1, len(models), figsize=(3.2 * len(models), 3.2), squeeze=False)
    for ax, model in zip(axes[0], models):
        sub = frame[frame["model"] == model]
        for mech, style in (("iid", "o-"), ("vgm", "s-")):
            cell = sub[sub["mechanism"] == mech].sort_values("K")
            if cell.empty:
                continue
            ax.plot(cell["K"], cell["mean"], style, label=f"{mech} measured")
            ax.plot(cell["K"], cell["paper_mean"], style.replace("-", "--"), alpha=0.5,
                    label=f"{mech} reported")
        ax.set_title(f"model {model}")
        ax.set_xlabel("K")
        ax.set_ylabel("mean loss")
    axes[0][0].legend(fontsize=7)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)

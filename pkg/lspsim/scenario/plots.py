"""
Delay and jitter figures from per-packet records.
"""

from __future__ import annotations

import logging
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import pandas as pd  # noqa: E402
from matplotlib.ticker import MaxNLocator  # noqa: E402

from lspsim.errors import OutputError  # noqa: E402

from .report import CSV_COLUMNS  # noqa: E402

logger = logging.getLogger(__name__)


def read_packets_csv(path) -> pd.DataFrame:
    path = Path(path)
    try:
        frame = pd.read_csv(path)
    except (OSError, pd.errors.ParserError, pd.errors.EmptyDataError) as exc:
        raise OutputError(path, str(exc), action="read") from exc
    missing = [column for column in CSV_COLUMNS if column not in frame.columns]
    if missing:
        raise OutputError(path, action="read", reason=f"missing columns {', '.join(missing)}")
    return frame


def _select(frame: pd.DataFrame, flow_id) -> pd.DataFrame:
    if flow_id is None:
        return frame
    return frame[frame["flow_id"].astype(str) == str(flow_id)]


def _render(frame: pd.DataFrame, column: str, path: Path, title: str, y_label: str) -> Path:
    fig, ax = plt.subplots(figsize=(8, 4))
    for flow_id, group in frame.groupby("flow_id", sort=True):
        ax.plot(group["arrived_at"], group[column], marker=".", linewidth=0.8, label=f"flow {flow_id}")
    ax.set_title(title)
    ax.set_xlabel("Arrival time (s)")
    ax.set_ylabel(y_label)
    ax.set_xlim(left=0.0)
    ax.set_ylim(bottom=0.0)
    ax.grid(True, linestyle="--", linewidth=0.5, alpha=0.7)
    ax.xaxis.set_major_locator(MaxNLocator(nbins=8))
    if not frame.empty:
        ax.legend(loc="upper right")
    fig.tight_layout()
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        fig.savefig(path, dpi=150)
    except OSError as exc:
        raise OutputError(path, exc.strerror or str(exc)) from exc
    finally:
        plt.close(fig)
    logger.info("Wrote %s", path)
    return path


def plot_delay(frame: pd.DataFrame, path, flow_id=None) -> Path:
    return _render(_select(frame, flow_id), "delay", Path(path), "End-to-end delay", "Delay (s)")


def plot_jitter(frame: pd.DataFrame, path, flow_id=None) -> Path:
    return _render(_select(frame, flow_id), "jitter", Path(path), "Jitter", "Jitter (s)")

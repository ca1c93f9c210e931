"""Benchmark report rendering: CSV/JSON plus bar-chart figures.

Figures mirror the benchmark views: models compared on one scheme, single
schemes compared on one model, and combined schemes compared on one model.
Blue bars are training accuracy, red bars are testing accuracy, and a
dashed line marks the chance baseline. Rendering is deterministic: fixed
dpi, Agg backend, no timestamps or software metadata in the PNG.
"""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .dataio import canonical_json
from .learn import BenchmarkTable, ModelKind

matplotlib.rcParams["font.size"] = 10
matplotlib.rcParams["font.family"] = "sans-serif"
matplotlib.rcParams["axes.spines.top"] = False
matplotlib.rcParams["axes.spines.right"] = False
matplotlib.rcParams["axes.grid"] = True
matplotlib.rcParams["grid.alpha"] = 0.3
matplotlib.rcParams["grid.linewidth"] = 0.6
matplotlib.rcParams["axes.axisbelow"] = True
matplotlib.rcParams["savefig.dpi"] = 100

__all__ = ["write_delimited", "render_figures", "FIGURE_NAMES"]

FIGURE_NAMES = (
    "accuracy_by_model.png",
    "accuracy_by_scheme.png",
    "accuracy_by_combination.png",
)

_TRAIN_COLOR = "#3465a4"
_TEST_COLOR = "#cc2222"
_MODEL_ORDER = tuple(k.label for k in ModelKind)
_SINGLE_LABELS = ("Ent", "Sha", "Law", "LBP")


def write_delimited(table: BenchmarkTable, out_dir: str | Path) -> tuple[Path, Path]:
    """Write report.csv and report.json under ``out_dir``."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    csv_path = out_dir / "report.csv"
    json_path = out_dir / "report.json"
    csv_path.write_text(table.to_csv(), encoding="utf-8")
    json_path.write_text(canonical_json(table.to_json_dict()), encoding="utf-8")
    return csv_path, json_path


def _grouped_bars(path: Path, labels, train, test, title: str, baseline: float) -> None:
    fig, ax = plt.subplots(figsize=(7.0, 4.2))
    if labels:
        x = np.arange(len(labels))
        ax.bar(x - 0.19, train, width=0.36, color=_TRAIN_COLOR, label="train")
        ax.bar(x + 0.19, test, width=0.36, color=_TEST_COLOR, label="test")
        ax.set_xticks(x)
        ax.set_xticklabels(labels)
    else:
        ax.text(0.5, 0.5, "no rows", ha="center", va="center", transform=ax.transAxes)
    ax.axhline(baseline, color="#555555", linestyle="--", linewidth=1.0, label="chance")
    ax.set_ylim(0.0, 1.05)
    ax.set_ylabel("accuracy")
    ax.set_title(title)
    ax.grid(axis="y", alpha=0.3)
    ax.legend(loc="lower right")
    fig.tight_layout()
    fig.savefig(path, dpi=100, metadata={"Software": None})
    plt.close(fig)


def _pick_model_scheme(table: BenchmarkTable) -> str | None:
    """Scheme shown in the model-comparison figure: the one with most rows."""
    counts: dict[str, int] = {}
    for row in table.rows:
        counts[row.scheme] = counts.get(row.scheme, 0) + 1
    if not counts:
        return None
    if "LawLBP" in counts and counts["LawLBP"] == max(counts.values()):
        return "LawLBP"
    return max(sorted(counts), key=lambda s: counts[s])


def _pick_scheme_model(table: BenchmarkTable) -> str | None:
    """Model shown in the scheme-comparison figures: SVM when present."""
    present = [row.model for row in table.rows]
    if not present:
        return None
    if "SVM" in present:
        return "SVM"
    for label in _MODEL_ORDER:
        if label in present:
            return label
    return present[0]


def render_figures(table: BenchmarkTable, out_dir: str | Path) -> list[Path]:
    """Render the three accuracy figures; returns the written paths."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    written = []

    fixed_scheme = _pick_model_scheme(table)
    rows = [r for r in table.rows if r.scheme == fixed_scheme]
    rows.sort(key=lambda r: _MODEL_ORDER.index(r.model) if r.model in _MODEL_ORDER else 99)
    path = out_dir / FIGURE_NAMES[0]
    _grouped_bars(
        path,
        [r.model for r in rows],
        [r.train_acc for r in rows],
        [r.test_acc for r in rows],
        f"Model benchmark ({fixed_scheme or 'no scheme'})",
        table.baseline,
    )
    written.append(path)

    fixed_model = _pick_scheme_model(table)
    singles = [
        r for r in table.rows if r.model == fixed_model and r.scheme in _SINGLE_LABELS
    ]
    singles.sort(key=lambda r: _SINGLE_LABELS.index(r.scheme))
    path = out_dir / FIGURE_NAMES[1]
    _grouped_bars(
        path,
        [r.scheme for r in singles],
        [r.train_acc for r in singles],
        [r.test_acc for r in singles],
        f"Single schemes ({fixed_model or 'no model'})",
        table.baseline,
    )
    written.append(path)

    combos = [
        r
        for r in table.rows
        if r.model == fixed_model and r.scheme not in _SINGLE_LABELS
    ]
    combos.sort(key=lambda r: r.scheme)
    path = out_dir / FIGURE_NAMES[2]
    _grouped_bars(
        path,
        [r.scheme for r in combos],
        [r.train_acc for r in combos],
        [r.test_acc for r in combos],
        f"Combined schemes ({fixed_model or 'no model'})",
        table.baseline,
    )
    written.append(path)
    return written

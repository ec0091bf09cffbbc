"""
Tabular reports for an ensemble: per-split report, selection frequencies,
subset-size histogram and the VSEPE summary.
"""

import os
from typing import Dict, Mapping, Optional, Sequence

import pandas as pd

from .ensemble import SUMMARY_KEYS, Ensemble, selection_frequency, subset_size_histogram, vsepe_summary

SUMMARY_COLUMNS = ["method", "mccm", *SUMMARY_KEYS, "r2"]


def ensemble_report(ens: Ensemble) -> pd.DataFrame:
    return pd.DataFrame({
        "split_id": [r.split_id for r in ens.results],
        "chosen_size": [r.chosen_size for r in ens.results],
        "train_rss": [r.train_rss for r in ens.results],
        "valid_sse": [r.sse for r in ens.results],
        "weight": ens.weights,
    })


def histogram_frame(ens: Ensemble) -> pd.DataFrame:
    histogram = subset_size_histogram(ens)
    return pd.DataFrame({"size": list(histogram), "count": list(histogram.values())})


def summary_frame(ens: Ensemble, mccm: float, r2: float) -> pd.DataFrame:
    row = {"method": ens.selector, "mccm": mccm, **vsepe_summary(ens), "r2": r2}
    return pd.DataFrame([row], columns=SUMMARY_COLUMNS)


def write_csv(frame: pd.DataFrame, path: str) -> str:
    """Write a frame without its index; returns the path."""
    directory = os.path.dirname(path)
    if directory:
        os.makedirs(directory, exist_ok=True)
    frame.to_csv(path, index=False, lineterminator="\n")
    return path


def write_ensemble_reports(ens: Ensemble, output_dir: str, mccm: float, r2: float,
                           correlated: Optional[Mapping[str, Sequence[str]]] = None,
                           prefix: str = "") -> Dict[str, str]:
    """
    Write the four ensemble reports into ``output_dir``.

    Returns:
        Report name -> file path
    """
    return {
        "ensemble_report": write_csv(ensemble_report(ens), os.path.join(output_dir, f"{prefix}ensemble_report.csv")),
        "selection_frequency": write_csv(
            selection_frequency(ens, correlated=correlated if correlated is not None else {}),
            os.path.join(output_dir, f"{prefix}selection_frequency.csv"),
        ),
        "subset_sizes": write_csv(histogram_frame(ens), os.path.join(output_dir, f"{prefix}subset_sizes.csv")),
        "vsepe_summary": write_csv(summary_frame(ens, mccm, r2), os.path.join(output_dir, f"{prefix}vsepe_summary.csv")),
    }

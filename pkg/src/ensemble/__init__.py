"""
Ensemble package.

Cross-validation splits, per-split model selection by validation error,
inverse-SSE model averaging, ensemble summaries and the parameter sweep.
"""

from .ensemble import (
    SUMMARY_KEYS,
    Ensemble,
    ensemble_weights,
    member_predictions,
    model_averaged_predict,
    r_squared,
    selection_frequency,
    subset_size_histogram,
    vsepe_summary,
)
from .pipeline import (
    SWEEP_COLUMNS,
    CovariateFit,
    CvSettings,
    check_baseline_mccm,
    fit_covariate_model,
    fit_ensemble,
    summary_row,
    sweep,
)
from .reports import (
    SUMMARY_COLUMNS,
    ensemble_report,
    histogram_frame,
    summary_frame,
    write_csv,
    write_ensemble_reports,
)
from .selection import (
    LASSO_LAR,
    PLAIN_LAR,
    SELECTOR_NAMES,
    SelectorConfig,
    SplitResult,
    candidate_trace,
    run_split,
)
from .splits import Split, derive_seed, generate_splits

__version__ = "1.0.0"
__all__ = [
    'SUMMARY_KEYS', 'Ensemble', 'ensemble_weights', 'member_predictions',
    'model_averaged_predict', 'r_squared', 'selection_frequency', 'subset_size_histogram',
    'vsepe_summary', 'SWEEP_COLUMNS', 'CovariateFit', 'CvSettings', 'check_baseline_mccm',
    'fit_covariate_model', 'fit_ensemble', 'summary_row', 'sweep', 'SUMMARY_COLUMNS',
    'ensemble_report', 'histogram_frame', 'summary_frame', 'write_csv',
    'write_ensemble_reports', 'LASSO_LAR', 'PLAIN_LAR', 'SELECTOR_NAMES', 'SelectorConfig',
    'SplitResult', 'candidate_trace', 'run_split', 'Split', 'derive_seed', 'generate_splits',
]

"""oidet: non-parametric OOD detection via an overlap-bound confidence score.

Fit a compact summary of in-distribution samples (mean plus norm-shell
statistics), then score candidates with an upper bound on the overlap index
between the candidate and the fitted distribution. Ships the estimator
variant for overlap measurement, accuracy upper bounds under distribution
shift, detection metrics, and seeded synthetic distributions for testing.
"""

__version__ = "0.1.0"

from .accuracy import (
    AccuracyBoundInput,
    BoundCheck,
    SweepPoint,
    accuracy_upper_bound,
    backdoor_mixture_bound,
    backdoor_sigma_sweep,
    verify_bound_empirically,
)
from .core import (
    NormKind,
    ShellPartition,
    as_matrix,
    as_vector,
    assign_shell,
    norm,
    row_norms,
)
from .detector import (
    ID_LABEL,
    OOD_LABEL,
    IdSummary,
    ScoreReport,
    classify,
    compute_bound,
    contaminated_center,
    fit,
    score,
    score_batch,
    score_mean_only,
    score_shell_only,
    summary_from_dict,
    summary_to_dict,
)
from .estimator import (
    OiEstimate,
    cohen_d_oi,
    estimate_oi,
    oi_oracle_grid_1d,
    oi_oracle_mc,
    oi_oracle_mc_specs,
)
from .io import (
    load_summary,
    read_matrix,
    read_scores,
    save_summary,
    write_matrix,
    write_scores,
)
from .metrics import MetricsReport, auroc, aupr, eval_metrics, tpr95
from .synth import (
    SyntheticSpec,
    density,
    density_at,
    gauss_1d,
    huber_mixture,
    sample,
    sample_with,
    sine_1d,
    spec_from_dict,
    spec_to_dict,
    trunc_gauss_ball,
    uniform_box,
    with_seed,
)
from . import errors

__all__ = [
    "__version__",
    "errors",
    # core
    "NormKind", "ShellPartition", "as_matrix", "as_vector", "assign_shell",
    "norm", "row_norms",
    # detector
    "ID_LABEL", "OOD_LABEL", "IdSummary", "ScoreReport", "classify",
    "compute_bound", "contaminated_center", "fit", "score", "score_batch",
    "score_mean_only", "score_shell_only", "summary_from_dict", "summary_to_dict",
    # estimator
    "OiEstimate", "cohen_d_oi", "estimate_oi", "oi_oracle_grid_1d",
    "oi_oracle_mc", "oi_oracle_mc_specs",
    # accuracy
    "AccuracyBoundInput", "BoundCheck", "SweepPoint", "accuracy_upper_bound",
    "backdoor_mixture_bound", "backdoor_sigma_sweep", "verify_bound_empirically",
    # metrics
    "MetricsReport", "auroc", "aupr", "eval_metrics", "tpr95",
    # synth
    "SyntheticSpec", "density", "density_at", "gauss_1d", "huber_mixture",
    "sample", "sample_with", "sine_1d", "spec_from_dict", "spec_to_dict",
    "trunc_gauss_ball", "uniform_box", "with_seed",
    # io
    "load_summary", "read_matrix", "read_scores", "save_summary",
    "write_matrix", "write_scores",
]

"""Detection-quality metrics over ID and OOD score sets.

AUROC uses exact integer numerators (twice-wins plus ties) so the pairwise
and sort-based paths return bit-identical values; TPR95 uses a nearest-rank
threshold consistent with the score >= T acceptance rule.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import EmptyInput

_PAIRWISE_LIMIT = 1_000_000


@dataclass(frozen=True)
class MetricsReport:
    """AUROC / TPR95 / AUPR over one ID-vs-OOD score comparison."""

    auroc: float
    tpr95: float
    aupr: float
    threshold_at_95: float
    n_id: int
    n_ood: int

    def to_dict(self) -> dict:
        return {
            "auroc": self.auroc,
            "tpr95": self.tpr95,
            "aupr": self.aupr,
            "threshold_at_95": self.threshold_at_95,
            "n_id": self.n_id,
            "n_ood": self.n_ood,
        }


def _scores(name: str, values) -> np.ndarray:
    arr = np.asarray(values, dtype=np.float64).reshape(-1)
    if arr.size == 0:
        raise EmptyInput(f"{name} scores are empty")
    if not np.isfinite(arr).all():
        raise ValueError(f"{name} scores contain NaN or infinite entries")
    return arr


def _auroc_pairwise_num(id_scores: np.ndarray, ood_scores: np.ndarray) -> int:
    # Numerator on the doubled scale: 2*#{id > ood} + #{id == ood}.
    diff_gt = int((id_scores[:, None] > ood_scores[None, :]).sum())
    diff_eq = int((id_scores[:, None] == ood_scores[None, :]).sum())
    return 2 * diff_gt + diff_eq


def _auroc_sorted_num(id_scores: np.ndarray, ood_scores: np.ndarray) -> int:
    # Rank-sum formulation: over the combined sorted order, each tie group
    # occupying 0-based positions [i, j) contributes midrank (i+j+1)/2, so
    # twice the ID rank-sum stays integral; 2U = 2R - n(n+1).
    n = id_scores.size
    combined = np.concatenate([id_scores, ood_scores])
    is_id = np.zeros(combined.size, dtype=bool)
    is_id[:n] = True
    order = np.argsort(combined, kind="stable")
    svals = combined[order]
    sid = is_id[order]
    boundaries = np.flatnonzero(np.diff(svals) != 0) + 1
    starts = np.concatenate([[0], boundaries])
    ends = np.concatenate([boundaries, [combined.size]])
    group = np.zeros(combined.size, dtype=np.int64)
    group[boundaries] = 1
    group = np.cumsum(group)
    twice_mid = starts[group] + ends[group] + 1
    twice_ranksum = int((twice_mid * sid).sum())
    return twice_ranksum - n * (n + 1)


def auroc(id_scores, ood_scores) -> float:
    """Probability a random ID score exceeds a random OOD score, ties half.

    Small problems use the exact pairwise count, large ones the rank-sum
    path; both produce the same integer numerator, hence identical floats.
    """
    ids = _scores("id", id_scores)
    oods = _scores("ood", ood_scores)
    n, m = ids.size, oods.size
    if n * m <= _PAIRWISE_LIMIT:
        num = _auroc_pairwise_num(ids, oods)
    else:
        num = _auroc_sorted_num(ids, oods)
    return num / (2 * n * m)


def tpr95(id_scores, ood_scores) -> tuple[float, float]:
    """OOD detection rate at the threshold accepting >= 95% of ID scores.

    The threshold is the ceil(n/20)-th smallest ID score (nearest-rank lower
    5th percentile); an OOD sample counts as detected only when strictly
    below it, mirroring the score >= T acceptance rule.
    """
    ids = _scores("id", id_scores)
    oods = _scores("ood", ood_scores)
    rank = (ids.size + 19) // 20  # ceil(0.05 * n) in exact integer arithmetic
    threshold = float(np.sort(ids)[rank - 1])
    return float(np.mean(oods < threshold)), threshold


def aupr(id_scores, ood_scores, positive: str = "ood") -> float:
    """Area under precision-recall by step-wise interpolation.

    positive="ood" treats OOD as the detection target, ranking by negated
    confidence; positive="id" ranks by confidence directly.
    """
    ids = _scores("id", id_scores)
    oods = _scores("ood", ood_scores)
    if positive == "ood":
        detect = np.concatenate([-ids, -oods])
        labels = np.concatenate([np.zeros(ids.size, bool), np.ones(oods.size, bool)])
    elif positive == "id":
        detect = np.concatenate([ids, oods])
        labels = np.concatenate([np.ones(ids.size, bool), np.zeros(oods.size, bool)])
    else:
        raise ValueError(f"positive must be 'ood' or 'id', got {positive!r}")
    order = np.argsort(-detect, kind="stable")
    detect = detect[order]
    labels = labels[order]
    total_pos = int(labels.sum())
    # Group ties: thresholds sweep the distinct detection values.
    boundaries = np.flatnonzero(np.diff(detect) != 0) + 1
    ends = np.concatenate([boundaries, [detect.size]])
    cum_tp = np.cumsum(labels)
    tp = cum_tp[ends - 1].astype(np.float64)
    recall = tp / total_pos
    precision = tp / ends
    return float((np.diff(recall, prepend=0.0) * precision).sum())


def eval_metrics(id_scores, ood_scores, aupr_positive: str = "ood") -> MetricsReport:
    """All three metrics in one report."""
    ids = _scores("id", id_scores)
    oods = _scores("ood", ood_scores)
    rate, threshold = tpr95(ids, oods)
    return MetricsReport(
        auroc=auroc(ids, oods),
        tpr95=rate,
        aupr=aupr(ids, oods, positive=aupr_positive),
        threshold_at_95=threshold,
        n_id=ids.size,
        n_ood=oods.size,
    )

"""Overlap-bound confidence scoring against a fitted in-distribution summary.

The score of a candidate set against the fitted samples is an upper bound on
the overlap index of their underlying distributions: one minus a normalized
mean-distance term minus the worst shell-frequency discrepancy term. Scoring
a single sample with it yields a confidence that the sample is
in-distribution.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .core import (
    NormKind,
    ShellPartition,
    as_matrix,
    as_vector,
    assign_shell_norms,
    norm,
    row_norms,
)
from .errors import AllZeroNorms, DimensionMismatch, EmptyPool

DEFAULT_K = 100
RECOMMENDED_K_RANGE = (50, 200)

ID_LABEL = "ID"
OOD_LABEL = "OOD"

_BATCH_CHUNK = 4096

SUMMARY_SCHEMA_VERSION = 1


@dataclass(frozen=True, eq=False)
class IdSummary:
    """Precomputed in-distribution state: mean, shell layout, shell statistics.

    Everything scoring needs is O(k + n) in memory; the fitted samples are
    not retained. Immutable and shareable across threads.
    """

    mean: np.ndarray
    k: int
    partition: ShellPartition
    shell_freq: np.ndarray
    shell_max_norm: np.ndarray
    r_b_id: float
    m: int
    norm_kind: NormKind
    center: np.ndarray | None = None

    @property
    def dim(self) -> int:
        return int(self.mean.shape[0])


@dataclass(frozen=True)
class ScoreReport:
    """Score decomposition for one bound evaluation.

    ``score == (1 - delta_mu_term) + (1 - shell_term) - 1`` exactly, so the
    two single-term ablation scores recombine bit-exactly.
    """

    score: float
    delta_mu_term: float
    shell_term: float
    best_shell: int
    r_b_effective: float


def _freeze(a: np.ndarray) -> np.ndarray:
    a.setflags(write=False)
    return a


def fit(id_samples, k: int = DEFAULT_K, norm_kind: NormKind = NormKind.L2,
        center=None) -> IdSummary:
    """Build an IdSummary from in-distribution samples.

    Radii span [0, max sample norm] in k equal steps; shell frequencies and
    per-shell max norms are stored so later scoring never touches the samples
    again. Deterministic for identical inputs (row order fixed).
    """
    x = as_matrix(id_samples)
    if k < 1:
        raise ValueError(f"shell count must be >= 1, got {k}")
    lo, hi = RECOMMENDED_K_RANGE
    if not lo <= k <= hi:
        warnings.warn(f"k={k} outside recommended [{lo},{hi}]", UserWarning, stacklevel=2)
    c = None
    if center is not None:
        c = _freeze(as_vector(center).copy())
        if c.shape[0] != x.shape[1]:
            raise DimensionMismatch(
                f"center has dimension {c.shape[0]}, samples have {x.shape[1]}")
        x = x - c
    norms = row_norms(x, norm_kind)
    r_b_id = float(norms.max())
    if r_b_id == 0.0:
        raise AllZeroNorms("every centered sample has norm 0; cannot build shells")
    partition = ShellPartition.build(k, r_b_id)
    idx = assign_shell_norms(norms, partition)  # all inside by construction
    m = x.shape[0]
    shell_freq = np.bincount(idx, minlength=k) / m
    shell_max_norm = np.zeros(k, dtype=np.float64)
    np.maximum.at(shell_max_norm, idx, norms)
    return IdSummary(
        mean=_freeze(x.mean(axis=0)),
        k=k,
        partition=partition,
        shell_freq=_freeze(shell_freq),
        shell_max_norm=_freeze(shell_max_norm),
        r_b_id=r_b_id,
        m=m,
        norm_kind=norm_kind,
        center=c,
    )


def compute_bound(plus_samples, summary: IdSummary) -> ScoreReport:
    """Overlap upper bound between a candidate sample set and the fitted set.

    The normalizing radius expands to cover candidates outside the fitted
    ball; shell radii stay frozen at fit time, and candidates beyond the
    fitted ball belong to no shell.
    """
    xp = as_matrix(plus_samples)
    if xp.shape[1] != summary.dim:
        raise DimensionMismatch(
            f"candidates have dimension {xp.shape[1]}, summary has {summary.dim}")
    if summary.center is not None:
        xp = xp - summary.center
    norms = row_norms(xp, summary.norm_kind)
    d = xp.shape[0]
    r_b_eff = max(summary.r_b_id, float(norms.max()))
    idx = assign_shell_norms(norms, summary.partition)
    inside = idx >= 0
    freq_plus = np.bincount(idx[inside], minlength=summary.k) / d
    r_a = summary.shell_max_norm.copy()
    np.maximum.at(r_a, idx[inside], norms[inside])
    mu_plus = xp.mean(axis=0)
    dmu = norm(mu_plus - summary.mean, summary.norm_kind)
    s = (r_b_eff - r_a) * np.abs(freq_plus - summary.shell_freq)
    best = int(np.argmax(s))
    delta_mu_term = dmu / (2.0 * r_b_eff)
    shell_term = float(s[best]) / (2.0 * r_b_eff)
    score = (1.0 - delta_mu_term) + (1.0 - shell_term) - 1.0
    return ScoreReport(
        score=score,
        delta_mu_term=delta_mu_term,
        shell_term=shell_term,
        best_shell=best + 1,
        r_b_effective=r_b_eff,
    )


def score(x, summary: IdSummary) -> ScoreReport:
    """Confidence score of a single sample: compute_bound on the singleton."""
    v = as_vector(x)
    return compute_bound(v.reshape(1, -1), summary)


def _score_chunk(x: np.ndarray, summary: IdSummary) -> list[ScoreReport]:
    # Vectorized across rows; every elementwise step mirrors compute_bound on
    # a one-row matrix so per-row results are bit-identical to score().
    if summary.center is not None:
        x = x - summary.center
    norms = row_norms(x, summary.norm_kind)
    d, k = x.shape[0], summary.k
    r_b_eff = np.maximum(summary.r_b_id, norms)
    idx = assign_shell_norms(norms, summary.partition)
    rows = np.nonzero(idx >= 0)[0]
    cols = idx[rows]
    r_a = np.broadcast_to(summary.shell_max_norm, (d, k)).copy()
    r_a[rows, cols] = np.maximum(r_a[rows, cols], norms[rows])
    fdiff = np.broadcast_to(summary.shell_freq, (d, k)).copy()
    fdiff[rows, cols] = np.abs(1.0 - summary.shell_freq[cols])
    dmu = row_norms(x - summary.mean, summary.norm_kind)
    s = (r_b_eff[:, None] - r_a) * fdiff
    best = np.argmax(s, axis=1)
    two_rb = 2.0 * r_b_eff
    delta_mu_term = dmu / two_rb
    shell_term = s[np.arange(d), best] / two_rb
    scores = (1.0 - delta_mu_term) + (1.0 - shell_term) - 1.0
    return [
        ScoreReport(
            score=float(scores[i]),
            delta_mu_term=float(delta_mu_term[i]),
            shell_term=float(shell_term[i]),
            best_shell=int(best[i]) + 1,
            r_b_effective=float(r_b_eff[i]),
        )
        for i in range(d)
    ]


def score_batch(xs, summary: IdSummary) -> list[ScoreReport]:
    """Score each row independently; element i equals score(xs[i]) exactly."""
    x = np.asarray(xs, dtype=np.float64)
    if x.ndim <= 2 and x.size == 0:
        return []
    x = as_matrix(x)
    if x.shape[1] != summary.dim:
        raise DimensionMismatch(
            f"candidates have dimension {x.shape[1]}, summary has {summary.dim}")
    if not np.isfinite(x).all():
        raise ValueError("sample matrix contains NaN or infinite entries")
    out: list[ScoreReport] = []
    for start in range(0, x.shape[0], _BATCH_CHUNK):
        out.extend(_score_chunk(x[start:start + _BATCH_CHUNK], summary))
    return out


def classify(x, summary: IdSummary, threshold: float) -> str:
    """ID when the confidence score is at or above the threshold, else OOD."""
    return ID_LABEL if score(x, summary).score >= threshold else OOD_LABEL


def score_mean_only(x, summary: IdSummary) -> float:
    """Ablation score keeping only the mean-distance term."""
    return 1.0 - score(x, summary).delta_mu_term


def score_shell_only(x, summary: IdSummary) -> float:
    """Ablation score keeping only the shell-frequency term."""
    return 1.0 - score(x, summary).shell_term


def contaminated_center(pool, sample_count: int, seed: int) -> np.ndarray:
    """Mean of a seeded uniform subsample (without replacement) of the pool.

    Selected row indices are sorted so the reduction order is deterministic
    and selecting the whole pool reproduces the plain pool mean bit-exactly.
    """
    arr = np.asarray(pool, dtype=np.float64)
    if arr.size == 0:
        raise EmptyPool("cannot draw a centering subsample from an empty pool")
    x = as_matrix(arr)
    rows = x.shape[0]
    if not 1 <= sample_count <= rows:
        raise ValueError(f"sample_count must be in [1, {rows}], got {sample_count}")
    rng = np.random.default_rng(seed)
    sel = np.sort(rng.choice(rows, size=sample_count, replace=False))
    return x[sel].mean(axis=0)


def summary_to_dict(s: IdSummary) -> dict:
    """JSON-ready document for an IdSummary (schema version pinned)."""
    doc = {
        "version": SUMMARY_SCHEMA_VERSION,
        "norm_kind": s.norm_kind.value,
        "k": s.k,
        "r_B_id": s.r_b_id,
        "m": s.m,
        "mean": s.mean.tolist(),
        "shell_freq": s.shell_freq.tolist(),
        "shell_max_norm": s.shell_max_norm.tolist(),
    }
    if s.center is not None:
        doc["center"] = s.center.tolist()
    return doc


def summary_from_dict(doc: dict) -> IdSummary:
    from .errors import SchemaVersionMismatch

    version = doc.get("version")
    if version != SUMMARY_SCHEMA_VERSION:
        raise SchemaVersionMismatch(
            f"unsupported summary schema version {version!r} "
            f"(expected {SUMMARY_SCHEMA_VERSION})")
    k = int(doc["k"])
    r_b_id = float(doc["r_B_id"])
    center = doc.get("center")
    return IdSummary(
        mean=_freeze(np.asarray(doc["mean"], dtype=np.float64)),
        k=k,
        partition=ShellPartition.build(k, r_b_id),
        shell_freq=_freeze(np.asarray(doc["shell_freq"], dtype=np.float64)),
        shell_max_norm=_freeze(np.asarray(doc["shell_max_norm"], dtype=np.float64)),
        r_b_id=r_b_id,
        m=int(doc["m"]),
        norm_kind=NormKind.parse(doc["norm_kind"]),
        center=None if center is None else _freeze(np.asarray(center, dtype=np.float64)),
    )

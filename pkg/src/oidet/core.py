"""Core types: feature-vector validation, norms, and concentric shell partitions.

All operations are pure and all containers are immutable after construction,
so everything here is safe to share across threads.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .errors import DimensionMismatch


class NormKind(str, Enum):
    L1 = "l1"
    L2 = "l2"
    LINF = "linf"

    @classmethod
    def parse(cls, text: str) -> "NormKind":
        key = text.strip().lower()
        aliases = {"l1": cls.L1, "1": cls.L1,
                   "l2": cls.L2, "2": cls.L2,
                   "linf": cls.LINF, "inf": cls.LINF, "max": cls.LINF}
        if key not in aliases:
            raise ValueError(f"unknown norm kind {text!r} (expected l1, l2, or linf)")
        return aliases[key]


def as_vector(values) -> np.ndarray:
    """Validate and convert to a 1-D float64 feature vector.

    Entries must be finite and the dimension must be at least 1.
    """
    v = np.asarray(values, dtype=np.float64)
    if v.ndim != 1:
        raise DimensionMismatch(f"expected a 1-D vector, got shape {v.shape}")
    if v.size < 1:
        raise DimensionMismatch("feature vector must have dimension >= 1")
    if not np.isfinite(v).all():
        raise ValueError("feature vector contains NaN or infinite entries")
    return v


def as_matrix(rows, min_rows: int = 1) -> np.ndarray:
    """Validate and convert to a 2-D float64 sample matrix (samples as rows)."""
    m = np.asarray(rows, dtype=np.float64)
    if m.ndim == 1:
        m = m.reshape(1, -1)
    if m.ndim != 2:
        raise DimensionMismatch(f"expected a 2-D sample matrix, got shape {m.shape}")
    if m.shape[0] < min_rows:
        raise DimensionMismatch(f"need at least {min_rows} row(s), got {m.shape[0]}")
    if m.shape[1] < 1:
        raise DimensionMismatch("samples must have dimension >= 1")
    if not np.isfinite(m).all():
        raise ValueError("sample matrix contains NaN or infinite entries")
    return m


def norm(v: np.ndarray, kind: NormKind = NormKind.L2) -> float:
    """Norm of a single vector under the chosen kind."""
    if kind is NormKind.L2:
        return float(np.sqrt((v * v).sum()))
    if kind is NormKind.L1:
        return float(np.abs(v).sum())
    return float(np.abs(v).max())


def row_norms(x: np.ndarray, kind: NormKind = NormKind.L2) -> np.ndarray:
    """Per-row norms of a sample matrix.

    Uses the same reductions as :func:`norm` so a 1-row matrix produces the
    bit-identical value.
    """
    if kind is NormKind.L2:
        return np.sqrt((x * x).sum(axis=1))
    if kind is NormKind.L1:
        return np.abs(x).sum(axis=1)
    return np.abs(x).max(axis=1)


@dataclass(frozen=True, eq=False)
class ShellPartition:
    """``k`` concentric norm shells covering the ball of radius ``r_b``.

    Shell ``j`` (1-based) is the half-open annulus ``[r_{j-1}, r_j)`` with
    ``r_j = j * r_b / k``; the last shell is closed at ``r_b`` so that the
    shells partition the ball exactly. Points with norm above ``r_b`` belong
    to no shell.
    """

    k: int
    r_b: float
    radii: np.ndarray = field(repr=False)

    @classmethod
    def build(cls, k: int, r_b: float) -> "ShellPartition":
        if k < 1:
            raise ValueError(f"shell count must be >= 1, got {k}")
        if not (np.isfinite(r_b) and r_b > 0):
            raise ValueError(f"outer radius must be positive and finite, got {r_b}")
        radii = (np.arange(1, k + 1, dtype=np.float64) * r_b) / k
        radii[-1] = r_b  # guard against rounding in (k * r_b) / k
        if k > 1 and not (np.diff(radii) > 0).all():
            raise ValueError(f"radii are not strictly increasing for k={k}, r_b={r_b}")
        radii.setflags(write=False)
        return cls(k=k, r_b=r_b, radii=radii)


def assign_shell_norms(norms: np.ndarray, partition: ShellPartition) -> np.ndarray:
    """Vectorized shell assignment from precomputed norms.

    Returns 0-based shell indices; -1 marks points outside the partition.
    """
    idx = np.searchsorted(partition.radii, norms, side="right")
    idx = np.minimum(idx, partition.k - 1)
    return np.where(norms > partition.r_b, -1, idx)


def assign_shell(v, partition: ShellPartition, kind: NormKind = NormKind.L2) -> int | None:
    """Shell index (1-based) containing ``v``, or None if ``norm(v) > r_b``."""
    n = norm(as_vector(v), kind)
    idx = int(assign_shell_norms(np.asarray([n]), partition)[0])
    return None if idx < 0 else idx + 1

"""Shared hypothesis strategies and brute-force oracles for the test suite."""

from __future__ import annotations

from fractions import Fraction

import numpy as np
from hypothesis import strategies as st

from oidet.core import NormKind

ALL_NORM_KINDS = (NormKind.L1, NormKind.L2, NormKind.LINF)

finite_floats = st.floats(min_value=-1e6, max_value=1e6,
                          allow_nan=False, allow_infinity=False, width=64)


def st_vector(min_dim: int = 1, max_dim: int = 8):
    return st.lists(finite_floats, min_size=min_dim, max_size=max_dim).map(
        lambda vals: np.asarray(vals, dtype=np.float64))


def st_matrix(min_rows: int = 1, max_rows: int = 12,
              min_cols: int = 1, max_cols: int = 6):
    def build(shape_and_seed):
        rows, cols, seed = shape_and_seed
        rng = np.random.default_rng(seed)
        scale = 10.0 ** rng.integers(-2, 3)
        return rng.standard_normal((rows, cols)) * scale

    return st.tuples(
        st.integers(min_rows, max_rows),
        st.integers(min_cols, max_cols),
        st.integers(0, 2**32 - 1),
    ).map(build)


def st_norm_kind():
    return st.sampled_from(ALL_NORM_KINDS)


def norm_oracle(v: np.ndarray, kind: NormKind) -> float:
    """Scalar-loop norm, independent of the vectorized implementation."""
    if kind is NormKind.L1:
        return float(sum(abs(float(t)) for t in v))
    if kind is NormKind.L2:
        return float(np.sqrt(np.float64(sum(float(t) * float(t) for t in v))))
    return float(max(abs(float(t)) for t in v)) if len(v) else 0.0


def auroc_oracle(id_scores, ood_scores) -> float:
    """Exact rational Mann-Whitney AUROC via brute-force pair counting."""
    num = Fraction(0)
    for i in id_scores:
        for o in ood_scores:
            if i > o:
                num += 1
            elif i == o:
                num += Fraction(1, 2)
    return float(num / (len(id_scores) * len(ood_scores)))

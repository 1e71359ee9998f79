"""Overlap-index estimation between two sample sets, plus ground-truth oracles.

Three estimators live here: the clamped non-parametric bound variant (scaled
by the median norm, cumulative-ball condition functions), the Cohen's-d
Gaussian approximation, and two brute-force oracles (1-D grid integration,
seeded Monte-Carlo importance form) used as ground truth in tests.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import NormKind, ShellPartition, as_matrix, norm, row_norms
from .errors import AllZeroNorms, DimensionMismatch, NotNormalized, ZeroVariance

DEFAULT_GRID_POINTS = 100_001
DEFAULT_MC_DRAWS = 1_000_000


@dataclass(frozen=True)
class OiEstimate:
    """An overlap-index estimate in [0,1] with its method tag.

    r_prime is the scale denominator (median norm) when the method uses one,
    None otherwise.
    """

    value: float
    r_prime: float | None
    method: str


def estimate_oi(a, b, k: int = 100, norm_kind: NormKind = NormKind.L2,
                center_at_merged_mean: bool = True) -> OiEstimate:
    """Clamped overlap bound between two sample sets.

    Uses cumulative-ball condition functions 1{norm(x) <= r_j} over radii
    r_j = j*r_B/k and normalizes both terms by the median norm of the merged
    set (even count takes the lower middle order statistic). Centering at the
    merged mean is on by default to match the estimation protocol.
    """
    xa = as_matrix(a)
    xb = as_matrix(b)
    if xa.shape[1] != xb.shape[1]:
        raise DimensionMismatch(
            f"sample sets have dimensions {xa.shape[1]} and {xb.shape[1]}")
    if center_at_merged_mean:
        center = np.concatenate([xa, xb]).mean(axis=0)
        xa = xa - center
        xb = xb - center
    norms_a = row_norms(xa, norm_kind)
    norms_b = row_norms(xb, norm_kind)
    merged = np.sort(np.concatenate([norms_a, norms_b]))
    r_prime = float(merged[(merged.size - 1) // 2])
    if r_prime == 0.0:
        raise AllZeroNorms("median sample norm is zero; estimate undefined")
    r_b = float(merged[-1])
    radii = ShellPartition.build(k, r_b).radii
    sorted_a = np.sort(norms_a)
    sorted_b = np.sort(norms_b)
    freq_gap = np.abs(
        np.searchsorted(sorted_a, radii, side="right") / norms_a.size
        - np.searchsorted(sorted_b, radii, side="right") / norms_b.size)
    count_le = np.searchsorted(merged, radii, side="right")
    r_a = np.where(count_le > 0, merged[np.maximum(count_le - 1, 0)], 0.0)
    ball_term = float(((r_b - r_a) * freq_gap).max()) / (2.0 * r_prime)
    dmu_term = norm(xa.mean(axis=0) - xb.mean(axis=0), norm_kind) / (2.0 * r_prime)
    return OiEstimate(value=max(0.0, 1.0 - dmu_term - ball_term),
                      r_prime=r_prime, method="clamped_bound")


def cohen_d_oi(a, b) -> OiEstimate:
    """Gaussian-assumption overlap: 2*Phi(-|mu_a - mu_b| / (2*sigma_pooled)).

    Defined on scalars; multivariate inputs are reduced to norms after
    centering at the merged mean (an adapter, since the formula is
    univariate). sigma is the pooled sample standard deviation.
    """
    xa = as_matrix(a)
    xb = as_matrix(b)
    if xa.shape[1] != xb.shape[1]:
        raise DimensionMismatch(
            f"sample sets have dimensions {xa.shape[1]} and {xb.shape[1]}")
    if xa.shape[1] == 1:
        va, vb = xa[:, 0], xb[:, 0]
    else:
        center = np.concatenate([xa, xb]).mean(axis=0)
        va = row_norms(xa - center)
        vb = row_norms(xb - center)
    mu_a, mu_b = float(va.mean()), float(vb.mean())
    dof = va.size + vb.size - 2
    if dof > 0:
        ssd = float(((va - mu_a) ** 2).sum() + ((vb - mu_b) ** 2).sum())
        sigma = math.sqrt(ssd / dof)
    else:
        sigma = 0.0
    if sigma == 0.0:
        if mu_a == mu_b:
            return OiEstimate(value=1.0, r_prime=None, method="cohen_d")
        raise ZeroVariance("pooled standard deviation is zero with distinct means")
    # 2*Phi(-z) == erfc(z / sqrt(2))
    value = math.erfc(abs(mu_a - mu_b) / (2.0 * sigma) / math.sqrt(2.0))
    return OiEstimate(value=value, r_prime=None, method="cohen_d")


def _eval_density(f, x: np.ndarray) -> np.ndarray:
    out = np.asarray(f(x), dtype=np.float64)
    if out.shape != x.shape:
        out = np.asarray([float(f(t)) for t in x], dtype=np.float64)
    return out


def oi_oracle_grid_1d(f, g, lo: float, hi: float,
                      grid_points: int = DEFAULT_GRID_POINTS) -> float:
    """Brute-force 1-D overlap: composite-trapezoid integral of min(f, g).

    Both callables must be densities on [lo, hi]: nonnegative and integrating
    to 1 within 1e-3 on the grid.
    """
    if not hi > lo:
        raise ValueError(f"need hi > lo, got [{lo}, {hi}]")
    if grid_points < 2:
        raise ValueError(f"grid_points must be >= 2, got {grid_points}")
    x = np.linspace(lo, hi, grid_points)
    fv = _eval_density(f, x)
    gv = _eval_density(g, x)
    for name, vals in (("f", fv), ("g", gv)):
        if (vals < 0).any():
            raise NotNormalized(f"density {name} is negative on the grid")
        mass = float(np.trapezoid(vals, x))
        if abs(mass - 1.0) > 1e-3:
            raise NotNormalized(
                f"density {name} integrates to {mass:.6f} on [{lo}, {hi}]")
    return float(np.trapezoid(np.minimum(fv, gv), x))


def oi_oracle_mc(sampler_p, density_p, density_q,
                 n_draws: int = DEFAULT_MC_DRAWS, seed: int = 0) -> float:
    """Monte-Carlo overlap oracle for any dimension.

    Draws x ~ P and averages min(1, f_Q(x)/f_P(x)), an unbiased estimate of
    the overlap integral. Seeded and deterministic; density_p must be
    strictly positive wherever the sampler puts mass.
    """
    if n_draws < 1:
        raise ValueError(f"n_draws must be >= 1, got {n_draws}")
    rng = np.random.default_rng(seed)
    x = np.asarray(sampler_p(n_draws, rng), dtype=np.float64)
    p = np.asarray(density_p(x), dtype=np.float64).reshape(-1)
    q = np.asarray(density_q(x), dtype=np.float64).reshape(-1)
    if p.shape[0] != x.shape[0] or q.shape[0] != x.shape[0]:
        raise ValueError("density callbacks must return one value per draw")
    if (p <= 0).any():
        raise ValueError("density_p must be strictly positive on its own draws")
    return float(np.minimum(1.0, q / p).mean())


def oi_oracle_mc_specs(spec_p, spec_q, n_draws: int = DEFAULT_MC_DRAWS,
                       seed: int = 0) -> float:
    """oi_oracle_mc wired to a pair of synthetic specs."""
    from .synth import density_at, sample_with

    return oi_oracle_mc(
        lambda n, rng: sample_with(spec_p, n, rng),
        lambda x: density_at(spec_p, x),
        lambda x: density_at(spec_q, x),
        n_draws=n_draws, seed=seed)

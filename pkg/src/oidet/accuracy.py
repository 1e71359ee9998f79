"""Accuracy upper bounds under distribution shift, with an empirical harness.

The general bound says a model with training accuracy p on the reference
distribution and accuracy q on the novel part of a shifted distribution has
shifted accuracy at most (p - q) * overlap + q; the mixture specialization
covers test sets that blend a clean fraction sigma with a fully-misclassified
poisoned remainder.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import NormKind, as_matrix
from .detector import compute_bound, fit
from .errors import RangeError

DEFAULT_SIGMA_GRID = tuple(i / 10.0 for i in range(11))


def _check_unit(name: str, value: float) -> float:
    v = float(value)
    if not 0.0 <= v <= 1.0:
        raise RangeError(f"{name} must be in [0, 1], got {value}")
    return v


@dataclass(frozen=True)
class AccuracyBoundInput:
    """Inputs to the shift bound; overlap_bound comes from compute_bound."""

    p: float
    q: float
    overlap_bound: float
    sigma: float | None = None

    def __post_init__(self):
        _check_unit("p", self.p)
        _check_unit("q", self.q)
        if not -0.5 <= self.overlap_bound <= 1.0:
            raise RangeError(
                f"overlap_bound must be in [-0.5, 1], got {self.overlap_bound}")
        if self.sigma is not None:
            _check_unit("sigma", self.sigma)


def accuracy_upper_bound(inp: AccuracyBoundInput) -> float:
    """(p - q) * overlap + q, with the overlap clamped into [0, 1].

    The clamp is needed because the score is a bound, not an overlap: it may
    be negative, while the accuracy algebra treats it as a proportion.
    """
    overlap = min(1.0, max(0.0, inp.overlap_bound))
    return (inp.p - inp.q) * overlap + inp.q


def backdoor_mixture_bound(p: float, sigma: float, delta_mu_term: float,
                           shell_term: float) -> float:
    """p * (1 - (1-sigma)*delta_mu_term - (1-sigma)*shell_term).

    delta_mu_term and shell_term come from a ScoreReport between clean and
    pure-poisoned sample sets; sigma is the clean fraction of the test mix.
    """
    p = _check_unit("p", p)
    sigma = _check_unit("sigma", sigma)
    if not 0.0 <= delta_mu_term <= 1.0:
        raise RangeError(f"delta_mu_term must be in [0, 1], got {delta_mu_term}")
    if not 0.0 <= shell_term <= 0.5:
        raise RangeError(f"shell_term must be in [0, 0.5], got {shell_term}")
    w = 1.0 - sigma
    return p * (1.0 - w * delta_mu_term - w * shell_term)


@dataclass(frozen=True)
class BoundCheck:
    """Empirical-accuracy vs bound comparison for one scenario."""

    acc: float
    bound: float
    p: float
    q: float
    overlap_bound: float
    holds: bool


def _accuracy(classifier, x: np.ndarray, y: np.ndarray) -> float:
    pred = np.asarray(classifier(x))
    if pred.shape != y.shape:
        raise ValueError("classifier must return one label per row")
    return float(np.mean(pred == y))


def verify_bound_empirically(classifier, x_d, y_d, x_dstar, y_dstar,
                             novel_mask=None, k: int = 100,
                             norm_kind: NormKind = NormKind.L2,
                             center=None, slack: float = 0.02) -> BoundCheck:
    """Measure accuracy on a shifted set and check it against the bound.

    p is the classifier's accuracy on the reference samples; q its accuracy
    on the novel rows of the shifted set (novel_mask selects them, default
    all rows; q = 0 when no row is novel). holds allows `slack` for sampling
    error on both sides.
    """
    x_d = as_matrix(x_d)
    y_d = np.asarray(y_d)
    x_dstar = as_matrix(x_dstar)
    y_dstar = np.asarray(y_dstar)
    p = _accuracy(classifier, x_d, y_d)
    if novel_mask is None:
        novel_mask = np.ones(x_dstar.shape[0], dtype=bool)
    else:
        novel_mask = np.asarray(novel_mask, dtype=bool)
    if novel_mask.any():
        q = _accuracy(classifier, x_dstar[novel_mask], y_dstar[novel_mask])
    else:
        q = 0.0
    summary = fit(x_d, k=k, norm_kind=norm_kind, center=center)
    report = compute_bound(x_dstar, summary)
    bound = accuracy_upper_bound(AccuracyBoundInput(p=p, q=q,
                                                    overlap_bound=report.score))
    acc = _accuracy(classifier, x_dstar, y_dstar)
    return BoundCheck(acc=acc, bound=bound, p=p, q=q,
                      overlap_bound=report.score, holds=acc <= bound + slack)


@dataclass(frozen=True)
class SweepPoint:
    """One clean-ratio step in the poisoned-mixture sweep."""

    sigma: float
    acc: float
    bound_shift: float
    bound_mixture: float
    p: float
    q: float
    holds: bool


def _threshold_classifier(x: np.ndarray) -> np.ndarray:
    return (x[:, 0] > 0.0).astype(np.int64)


def _two_cluster_draw(rng: np.random.Generator, n: int) -> tuple[np.ndarray, np.ndarray]:
    # Two unit-variance clusters at (-1, 0) and (+1, 0); label = cluster id.
    y = rng.integers(0, 2, size=n)
    x = rng.standard_normal((n, 2))
    x[:, 0] += np.where(y == 1, 1.0, -1.0)
    return x, y


def _poisoned_draw(rng: np.random.Generator, n: int) -> tuple[np.ndarray, np.ndarray]:
    # A far-off trigger cluster at (6, 6) always labeled 0; the threshold
    # classifier predicts 1 there, so its accuracy on this part is 0.
    x = rng.standard_normal((n, 2))
    x[:, 0] += 6.0
    x[:, 1] += 6.0
    return x, np.zeros(n, dtype=np.int64)


def backdoor_sigma_sweep(sigmas=DEFAULT_SIGMA_GRID, seed: int = 0,
                         n_train: int = 20_000, n_test: int = 20_000,
                         k: int = 100, norm_kind: NormKind = NormKind.L2,
                         slack: float = 0.02) -> list[SweepPoint]:
    """Mixture scenario: test sets blending clean and poisoned clusters.

    For each sigma the test set takes a sigma fraction from a clean pool and
    the rest from a poisoned pool; both the general shift bound and the
    mixture bound must dominate the measured accuracy (up to slack).
    """
    rng = np.random.default_rng(seed)
    x_train, y_train = _two_cluster_draw(rng, n_train)
    x_clean, y_clean = _two_cluster_draw(rng, n_test)
    x_pois, y_pois = _poisoned_draw(rng, n_test)
    classifier = _threshold_classifier
    p = _accuracy(classifier, x_train, y_train)
    summary = fit(x_train, k=k, norm_kind=norm_kind)
    pois_report = compute_bound(x_pois, summary)
    out: list[SweepPoint] = []
    for sigma in sigmas:
        sigma = _check_unit("sigma", sigma)
        n_clean = round(sigma * n_test)
        x_mix = np.concatenate([x_clean[:n_clean], x_pois[:n_test - n_clean]])
        y_mix = np.concatenate([y_clean[:n_clean], y_pois[:n_test - n_clean]])
        acc = _accuracy(classifier, x_mix, y_mix)
        q = (_accuracy(classifier, x_pois[:n_test - n_clean], y_pois[:n_test - n_clean])
             if n_clean < n_test else 0.0)
        mix_report = compute_bound(x_mix, summary)
        bound_shift = accuracy_upper_bound(
            AccuracyBoundInput(p=p, q=q, overlap_bound=mix_report.score))
        bound_mixture = backdoor_mixture_bound(
            p, sigma, pois_report.delta_mu_term, pois_report.shell_term)
        holds = acc <= bound_shift + slack and acc <= bound_mixture + slack
        out.append(SweepPoint(sigma=sigma, acc=acc, bound_shift=bound_shift,
                              bound_mixture=bound_mixture, p=p, q=q, holds=holds))
    return out

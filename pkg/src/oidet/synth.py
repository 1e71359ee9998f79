"""Seeded synthetic distributions with matched samplers and densities.

Every spec kind supports exact density evaluation and reproducible sampling,
so tests can compare empirical behavior against closed-form ground truth.
"""

from __future__ import annotations

import math
import zlib
from dataclasses import dataclass, replace
from functools import lru_cache

import numpy as np
from scipy.stats import chi2

from .errors import BadSpec

KINDS = ("uniform_box", "trunc_gauss_ball", "sine_1d", "huber_mixture", "gauss_1d")

_SINE_BISECT_TOL = 1e-12
_NORMALIZER_MC_DRAWS = 1 << 21


@dataclass(frozen=True)
class SyntheticSpec:
    """Parametric test distribution. Only the fields for `kind` are set.

    Hashable (tuples, not arrays) so per-spec caches can key on it.
    """

    kind: str
    seed: int = 0
    # uniform_box
    lo: tuple[float, ...] | None = None
    hi: tuple[float, ...] | None = None
    # trunc_gauss_ball: normal(mean, diag) conditioned on the Euclidean ball
    # of the given radius around its mean
    mean: tuple[float, ...] | None = None
    cov_diag: tuple[float, ...] | None = None
    radius: float = 3.0
    # sine_1d: density 1 + sin(2*pi*omega*x) on [0, 1]
    omega: int | None = None
    # huber_mixture: (1-eps)*components[0] + eps*components[1]
    eps: float | None = None
    components: tuple["SyntheticSpec", "SyntheticSpec"] | None = None
    # gauss_1d
    mu: float | None = None
    sigma: float | None = None

    @property
    def dim(self) -> int:
        if self.kind == "uniform_box":
            return len(self.lo)
        if self.kind == "trunc_gauss_ball":
            return len(self.mean)
        if self.kind in ("sine_1d", "gauss_1d"):
            return 1
        if self.kind == "huber_mixture":
            return self.components[0].dim
        raise BadSpec(f"unknown spec kind {self.kind!r}")


def uniform_box(lo, hi, seed: int = 0) -> SyntheticSpec:
    return SyntheticSpec(kind="uniform_box", seed=seed,
                         lo=tuple(float(v) for v in np.atleast_1d(lo)),
                         hi=tuple(float(v) for v in np.atleast_1d(hi)))


def trunc_gauss_ball(mean, radius: float = 3.0, cov_diag=None,
                     seed: int = 0) -> SyntheticSpec:
    mean_t = tuple(float(v) for v in np.atleast_1d(mean))
    cov_t = (tuple(1.0 for _ in mean_t) if cov_diag is None
             else tuple(float(v) for v in np.atleast_1d(cov_diag)))
    return SyntheticSpec(kind="trunc_gauss_ball", seed=seed, mean=mean_t,
                         cov_diag=cov_t, radius=float(radius))


def sine_1d(omega: int, seed: int = 0) -> SyntheticSpec:
    if omega != int(omega):
        raise BadSpec(f"sine_1d needs integer omega >= 1, got {omega!r}")
    return SyntheticSpec(kind="sine_1d", seed=seed, omega=int(omega))


def huber_mixture(eps: float, base: SyntheticSpec, outlier: SyntheticSpec,
                  seed: int = 0) -> SyntheticSpec:
    return SyntheticSpec(kind="huber_mixture", seed=seed, eps=float(eps),
                         components=(base, outlier))


def gauss_1d(mu: float, sigma: float, seed: int = 0) -> SyntheticSpec:
    return SyntheticSpec(kind="gauss_1d", seed=seed, mu=float(mu), sigma=float(sigma))


def validate_spec(spec: SyntheticSpec) -> None:
    """Raise BadSpec on structurally invalid parameters."""
    if spec.kind == "uniform_box":
        if not spec.lo or not spec.hi or len(spec.lo) != len(spec.hi):
            raise BadSpec("uniform_box needs lo and hi of equal dimension")
        if any(l >= h for l, h in zip(spec.lo, spec.hi)):
            raise BadSpec("uniform_box needs lo < hi per coordinate")
    elif spec.kind == "trunc_gauss_ball":
        if not spec.mean or not spec.cov_diag or len(spec.mean) != len(spec.cov_diag):
            raise BadSpec("trunc_gauss_ball needs mean and cov_diag of equal dimension")
        if any(v <= 0 for v in spec.cov_diag):
            raise BadSpec("trunc_gauss_ball variances must be positive")
        if not spec.radius > 0:
            raise BadSpec("trunc_gauss_ball radius must be positive")
    elif spec.kind == "sine_1d":
        if spec.omega is None or spec.omega != int(spec.omega) or spec.omega < 1:
            raise BadSpec("sine_1d needs integer omega >= 1")
    elif spec.kind == "huber_mixture":
        if spec.eps is None or not 0.0 <= spec.eps <= 1.0:
            raise BadSpec("huber_mixture needs eps in [0, 1]")
        if not spec.components or len(spec.components) != 2:
            raise BadSpec("huber_mixture needs exactly two components")
        a, b = spec.components
        validate_spec(a)
        validate_spec(b)
        if a.dim != b.dim:
            raise BadSpec("huber_mixture components must share dimension")
    elif spec.kind == "gauss_1d":
        if spec.mu is None or spec.sigma is None or not spec.sigma > 0:
            raise BadSpec("gauss_1d needs mu and sigma > 0")
    else:
        raise BadSpec(f"unknown spec kind {spec.kind!r}")


def _sine_cdf(x: np.ndarray, omega: int) -> np.ndarray:
    tw = 2.0 * math.pi * omega
    return x + (1.0 - np.cos(tw * x)) / tw


def _sine_inverse_cdf(u: np.ndarray, omega: int) -> np.ndarray:
    # F is strictly increasing on [0,1] (density >= 0, zero only at isolated
    # points), so bisection converges; 50 halvings beat the 1e-12 tolerance.
    lo = np.zeros_like(u)
    hi = np.ones_like(u)
    for _ in range(50):
        mid = 0.5 * (lo + hi)
        below = _sine_cdf(mid, omega) < u
        lo = np.where(below, mid, lo)
        hi = np.where(below, hi, mid)
        if float((hi - lo).max()) <= _SINE_BISECT_TOL:
            break
    return 0.5 * (lo + hi)


@lru_cache(maxsize=None)
def _ball_mass(cov_diag: tuple[float, ...], radius: float) -> float:
    """P(||x - mean||_2 <= radius) for normal(mean, diag(cov_diag)).

    Isotropic case is exact via the chi-square CDF; otherwise a seeded
    Monte-Carlo estimate, cached per (cov_diag, radius).
    """
    d = len(cov_diag)
    if all(v == cov_diag[0] for v in cov_diag):
        return float(chi2.cdf(radius * radius / cov_diag[0], df=d))
    seed = zlib.crc32(repr((cov_diag, radius)).encode())
    rng = np.random.default_rng(seed)
    z = rng.standard_normal((_NORMALIZER_MC_DRAWS, d))
    sq = (z * z) @ np.asarray(cov_diag, dtype=np.float64)
    return float(np.mean(sq <= radius * radius))


def _sample_with(spec: SyntheticSpec, count: int, rng: np.random.Generator) -> np.ndarray:
    if spec.kind == "uniform_box":
        lo = np.asarray(spec.lo)
        hi = np.asarray(spec.hi)
        return lo + (hi - lo) * rng.random((count, len(lo)))
    if spec.kind == "trunc_gauss_ball":
        mean = np.asarray(spec.mean)
        std = np.sqrt(np.asarray(spec.cov_diag))
        d = len(spec.mean)
        out = np.empty((count, d), dtype=np.float64)
        got = 0
        while got < count:
            batch = max(2 * (count - got), 128)
            draw = mean + std * rng.standard_normal((batch, d))
            keep = draw[np.sqrt(((draw - mean) ** 2).sum(axis=1)) <= spec.radius]
            take = min(count - got, keep.shape[0])
            out[got:got + take] = keep[:take]
            got += take
        return out
    if spec.kind == "sine_1d":
        return _sine_inverse_cdf(rng.random((count, 1)), spec.omega)
    if spec.kind == "huber_mixture":
        base, outlier = spec.components
        if spec.eps == 0.0:
            # Same rng path as sampling the base component directly.
            return _sample_with(base, count, rng)
        mask = rng.random(count) < spec.eps
        n_out = int(mask.sum())
        out = np.empty((count, base.dim), dtype=np.float64)
        out[~mask] = _sample_with(base, count - n_out, rng)
        out[mask] = _sample_with(outlier, n_out, rng)
        return out
    if spec.kind == "gauss_1d":
        return spec.mu + spec.sigma * rng.standard_normal((count, 1))
    raise BadSpec(f"unknown spec kind {spec.kind!r}")


def sample_with(spec: SyntheticSpec, count: int, rng: np.random.Generator) -> np.ndarray:
    """Draw `count` rows using the caller's generator (oracle plumbing)."""
    validate_spec(spec)
    if count < 1:
        raise BadSpec(f"count must be >= 1, got {count}")
    return _sample_with(spec, count, rng)


def sample(spec: SyntheticSpec, count: int) -> np.ndarray:
    """Seeded draw: identical spec + count always yields the identical matrix."""
    return sample_with(spec, count, np.random.default_rng(spec.seed))


def density_at(spec: SyntheticSpec, x) -> np.ndarray:
    """Vectorized density over rows of x (count, dim) -> (count,)."""
    validate_spec(spec)
    x = np.asarray(x, dtype=np.float64)
    if x.ndim == 1:
        x = x.reshape(-1, 1) if spec.dim == 1 else x.reshape(1, -1)
    if x.shape[1] != spec.dim:
        raise BadSpec(f"density input has dimension {x.shape[1]}, spec has {spec.dim}")
    if spec.kind == "uniform_box":
        lo = np.asarray(spec.lo)
        hi = np.asarray(spec.hi)
        inside = np.logical_and(x >= lo, x <= hi).all(axis=1)
        return inside / float(np.prod(hi - lo))
    if spec.kind == "trunc_gauss_ball":
        mean = np.asarray(spec.mean)
        var = np.asarray(spec.cov_diag)
        d = x.shape[1]
        diff = x - mean
        log_pdf = -0.5 * (diff * diff / var).sum(axis=1) \
            - 0.5 * (d * math.log(2.0 * math.pi) + np.log(var).sum())
        inside = np.sqrt((diff * diff).sum(axis=1)) <= spec.radius
        return inside * np.exp(log_pdf) / _ball_mass(spec.cov_diag, spec.radius)
    if spec.kind == "sine_1d":
        t = x[:, 0]
        inside = (t >= 0.0) & (t <= 1.0)
        return inside * (1.0 + np.sin(2.0 * math.pi * spec.omega * t))
    if spec.kind == "huber_mixture":
        base, outlier = spec.components
        return (1.0 - spec.eps) * density_at(base, x) + spec.eps * density_at(outlier, x)
    if spec.kind == "gauss_1d":
        z = (x[:, 0] - spec.mu) / spec.sigma
        return np.exp(-0.5 * z * z) / (spec.sigma * math.sqrt(2.0 * math.pi))
    raise BadSpec(f"unknown spec kind {spec.kind!r}")


def density(spec: SyntheticSpec, x) -> float:
    """Density of a single point."""
    v = np.asarray(x, dtype=np.float64).reshape(-1)
    if v.shape[0] != spec.dim:
        raise BadSpec(f"density input has dimension {v.shape[0]}, spec has {spec.dim}")
    return float(density_at(spec, v.reshape(1, -1))[0])


def spec_to_dict(spec: SyntheticSpec) -> dict:
    validate_spec(spec)
    doc: dict = {"kind": spec.kind, "seed": spec.seed}
    if spec.kind == "uniform_box":
        doc.update(lo=list(spec.lo), hi=list(spec.hi))
    elif spec.kind == "trunc_gauss_ball":
        doc.update(mean=list(spec.mean), cov_diag=list(spec.cov_diag), radius=spec.radius)
    elif spec.kind == "sine_1d":
        doc.update(omega=spec.omega)
    elif spec.kind == "huber_mixture":
        doc.update(eps=spec.eps,
                   components=[spec_to_dict(c) for c in spec.components])
    elif spec.kind == "gauss_1d":
        doc.update(mu=spec.mu, sigma=spec.sigma)
    return doc


_FIELDS_BY_KIND = {
    "uniform_box": {"lo", "hi"},
    "trunc_gauss_ball": {"mean", "cov_diag", "radius"},
    "sine_1d": {"omega"},
    "huber_mixture": {"eps", "components"},
    "gauss_1d": {"mu", "sigma"},
}


def spec_from_dict(doc: dict) -> SyntheticSpec:
    """Parse the JSON form; unknown kinds or fields raise BadSpec."""
    if not isinstance(doc, dict):
        raise BadSpec(f"spec must be a JSON object, got {type(doc).__name__}")
    kind = doc.get("kind")
    if kind not in KINDS:
        raise BadSpec(f"unknown spec kind {kind!r}")
    allowed = _FIELDS_BY_KIND[kind] | {"kind", "seed"}
    extra = set(doc) - allowed
    if extra:
        raise BadSpec(f"unexpected fields for {kind}: {sorted(extra)}")
    seed = int(doc.get("seed", 0))
    try:
        if kind == "uniform_box":
            spec = uniform_box(doc["lo"], doc["hi"], seed=seed)
        elif kind == "trunc_gauss_ball":
            spec = trunc_gauss_ball(doc["mean"], radius=doc.get("radius", 3.0),
                                    cov_diag=doc.get("cov_diag"), seed=seed)
        elif kind == "sine_1d":
            spec = sine_1d(doc["omega"], seed=seed)
        elif kind == "huber_mixture":
            spec = huber_mixture(doc["eps"], spec_from_dict(doc["components"][0]),
                                 spec_from_dict(doc["components"][1]), seed=seed)
        else:
            spec = gauss_1d(doc["mu"], doc["sigma"], seed=seed)
    except (KeyError, TypeError, ValueError) as exc:
        raise BadSpec(f"malformed {kind} spec: {exc}") from exc
    validate_spec(spec)
    return spec


def with_seed(spec: SyntheticSpec, seed: int) -> SyntheticSpec:
    """Copy of the spec with a different seed (trial sweeps)."""
    return replace(spec, seed=seed)

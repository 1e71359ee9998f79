"""Acceptance gates: one test per shipped guarantee, with pinned tolerances.

Each test prints a single `criterion NN (<name>): PASS` line on success, so a
verbose run yields one pass/fail line per criterion. Random seeds, sample
sizes, and tolerances are pinned; every expected value is produced by an
oracle that does not share code with the implementation under test
(closed forms, grid integration, Monte-Carlo density ratios, or exact
rational arithmetic).
"""

import math
import time
import warnings
from pathlib import Path

import numpy as np
import pytest

from helpers import auroc_oracle
from oidet.bench import bench_cell, linear_fit_r2
from oidet.core import NormKind
from oidet.detector import compute_bound, fit, score_batch
from oidet.estimator import (
    cohen_d_oi,
    estimate_oi,
    oi_oracle_grid_1d,
    oi_oracle_mc_specs,
)
from oidet.accuracy import backdoor_sigma_sweep
from oidet.io import save_summary
from oidet.metrics import _auroc_pairwise_num, _auroc_sorted_num, auroc, tpr95
from oidet.synth import (
    density_at,
    gauss_1d,
    huber_mixture,
    sample,
    sine_1d,
    trunc_gauss_ball,
    uniform_box,
    with_seed,
)

M_LARGE = 10_000          # large-sample size for the soundness suite
K_DEFAULT = 100
FIT_SEED_BASE = 33_000    # stream for the set the summary is fitted on
PLUS_SEED_BASE = 77_000   # stream for the scored (plus) set
ORACLE_MC_DRAWS = 400_000
ORACLE_MC_SEED = 99


def _passed(num: int, name: str) -> None:
    print(f"criterion {num:02d} ({name}): PASS")


def _pair_score(p_spec, q_spec, seed: int = 0, m: int = M_LARGE) -> float:
    """Large-sample bound between two spec distributions (fit q, score p)."""
    xq = sample(with_seed(q_spec, FIT_SEED_BASE + seed), m)
    xp = sample(with_seed(p_spec, PLUS_SEED_BASE + seed), m)
    summary = fit(xq, k=K_DEFAULT)
    return compute_bound(xp, summary).score


def _density_fn(spec):
    return lambda x: density_at(spec, x.reshape(-1, 1))


def test_criterion_01_hand_trace_suite():
    start = time.perf_counter()
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", UserWarning)
        id_points = np.array([[2.0]])
        self_summary = fit(id_points, k=1)
        assert compute_bound(id_points, self_summary).score == pytest.approx(
            1.0, abs=1e-12)
        assert compute_bound(np.array([[0.0]]), self_summary).score == pytest.approx(
            0.5, abs=1e-12)
        two_shells = fit(id_points, k=2)
        assert compute_bound(np.array([[0.0]]), two_shells).score == pytest.approx(
            0.0, abs=1e-12)
    assert time.perf_counter() - start < 1.0
    _passed(1, "hand-trace suite")


def test_criterion_02_bound_soundness_vs_oracle():
    start = time.perf_counter()
    box01 = uniform_box([0.0], [1.0])
    pairs = []  # (label, p_spec, q_spec, oracle_value)

    # Uniform/uniform: overlap equals the shared box length (checked on the
    # grid as well).
    for target in (0.0, 0.25, 0.5, 0.75, 1.0):
        shift = 1.0 - target
        q = uniform_box([shift], [1.0 + shift])
        grid = oi_oracle_grid_1d(_density_fn(box01), _density_fn(q), -0.5, 2.5)
        assert grid == pytest.approx(target, abs=1e-3)
        pairs.append((f"uniform overlap {target}", box01, q, target))

    # Uniform/sine: grid oracle, cross-checked against the closed form
    # 1 - 1/pi (the negative sine lobes integrate to -1/pi for integer omega).
    for omega in (1, 2, 5):
        q = sine_1d(omega)
        grid = oi_oracle_grid_1d(_density_fn(box01), _density_fn(q), 0.0, 1.0)
        assert grid == pytest.approx(1.0 - 1.0 / math.pi, abs=1e-4)
        pairs.append((f"uniform vs sine omega={omega}", box01, q, grid))

    # Gaussian pairs: closed form erfc(gap / (2*sqrt(2))) at unit sigma.
    for gap in (1.0, 2.0, 4.0):
        p = gauss_1d(0.0, 1.0)
        q = gauss_1d(gap, 1.0)
        closed = math.erfc(gap / 2.0 / math.sqrt(2.0))
        grid = oi_oracle_grid_1d(_density_fn(p), _density_fn(q),
                                 -9.0, gap + 9.0)
        assert grid == pytest.approx(closed, abs=1e-6)
        pairs.append((f"gauss gap {gap}", p, q, closed))

    # Truncated-Gaussian pair in R^4: Monte-Carlo density-ratio oracle.
    tg_p = trunc_gauss_ball([0.0] * 4)
    tg_q = trunc_gauss_ball([1.0, 0.0, 0.0, 0.0])
    tg_oracle = oi_oracle_mc_specs(tg_p, tg_q, n_draws=ORACLE_MC_DRAWS,
                                   seed=ORACLE_MC_SEED)
    pairs.append(("trunc-gauss R4 gap 1", tg_p, tg_q, tg_oracle))

    assert len(pairs) == 12
    for label, p_spec, q_spec, oracle in pairs:
        got = _pair_score(p_spec, q_spec)
        assert got >= oracle - 0.05, (
            f"{label}: score {got:.4f} < oracle {oracle:.4f} - 0.05")
    assert time.perf_counter() - start < 120.0
    _passed(2, "bound soundness vs oracle")


def test_criterion_03_sine_frequency_lower_bound():
    start = time.perf_counter()
    box01 = uniform_box([0.0], [1.0])
    for omega in (1, 2, 5, 10):
        gate = 1.0 - 1.0 / omega - 0.03
        worst = min(_pair_score(box01, sine_1d(omega), seed=s)
                    for s in range(10))
        assert worst >= gate, f"omega={omega}: min score {worst:.4f} < {gate:.4f}"
    assert time.perf_counter() - start < 60.0
    _passed(3, "sine frequency lower bound")


def test_criterion_04_contamination_lower_bound():
    start = time.perf_counter()
    base_outlier_pairs = [
        (uniform_box([0.0], [1.0]), uniform_box([10.0], [11.0])),
        (gauss_1d(0.0, 1.0), gauss_1d(8.0, 1.0)),
        (trunc_gauss_ball([0.0, 0.0]), trunc_gauss_ball([8.0, 8.0])),
    ]
    for base, outlier in base_outlier_pairs:
        for eps in (0.1, 0.2, 0.5):
            mix = huber_mixture(eps, base, outlier)
            worst = min(_pair_score(base, mix, seed=s) for s in range(10))
            gate = 1.0 - eps - 0.03
            assert worst >= gate, (
                f"{base.kind}/eps={eps}: min score {worst:.4f} < {gate:.4f}")
    assert time.perf_counter() - start < 60.0
    _passed(4, "contamination lower bound")


def test_criterion_05_accuracy_bound_sigma_sweep():
    start = time.perf_counter()
    for kind in (NormKind.L1, NormKind.L2, NormKind.LINF):
        points = backdoor_sigma_sweep(seed=3, n_train=20_000, n_test=20_000,
                                      norm_kind=kind)
        assert len(points) == 11
        for pt in points:
            assert pt.holds, (
                f"{kind.value} sigma={pt.sigma}: acc {pt.acc:.4f} exceeds "
                f"bounds ({pt.bound_shift:.4f}, {pt.bound_mixture:.4f})")
    assert time.perf_counter() - start < 60.0
    _passed(5, "accuracy bound sigma sweep")


def _estimation_errors(p_spec, q_spec, oracle: float):
    bound_errs, cohen_errs = [], []
    for s in range(20):
        a = sample(with_seed(p_spec, 1000 + s), 50)
        b = sample(with_seed(q_spec, 5000 + s), 50)
        bound_errs.append(abs(estimate_oi(a, b, k=K_DEFAULT).value - oracle))
        cohen_errs.append(abs(cohen_d_oi(a, b).value - oracle))
    return float(np.mean(bound_errs)), float(np.mean(cohen_errs))


def test_criterion_06_small_sample_oi_estimation():
    for gap in (0.5, 1.0, 1.5, 2.0):
        p = trunc_gauss_ball([0.0] * 4)
        q = trunc_gauss_ball([gap, 0.0, 0.0, 0.0])
        oracle = oi_oracle_mc_specs(p, q, n_draws=ORACLE_MC_DRAWS,
                                    seed=ORACLE_MC_SEED)
        bound_err, _ = _estimation_errors(p, q, oracle)
        assert bound_err <= 0.15, f"tg gap {gap}: mean error {bound_err:.4f}"

    # Non-Gaussian grid: diagonally shifted unit boxes in R^4 with exact
    # overlap (1 - shift)^4; the clamped bound must not trail the Gaussian
    # formula by more than 0.05 on its home turf.
    for shift in (0.05, 0.10, 0.15):
        p = uniform_box([0.0] * 4, [1.0] * 4)
        q = uniform_box([shift] * 4, [1.0 + shift] * 4)
        oracle = (1.0 - shift) ** 4
        bound_err, cohen_err = _estimation_errors(p, q, oracle)
        assert bound_err <= 0.15, f"box shift {shift}: mean error {bound_err:.4f}"
        assert bound_err <= cohen_err + 0.05, (
            f"box shift {shift}: bound err {bound_err:.4f} vs "
            f"cohen err {cohen_err:.4f}")
    _passed(6, "small-sample OI estimation")


def test_criterion_07_gaussian_overlap_reference_values():
    d = 2.0 ** -0.5  # sample variance of {m-d, m+d} is exactly 1
    for gap, expected in ((0.0, 1.0), (2.0, 0.31731), (4.0, 0.04550)):
        a = np.array([[-d], [d]])
        b = np.array([[gap - d], [gap + d]])
        assert cohen_d_oi(a, b).value == pytest.approx(expected, abs=1e-5)
    _passed(7, "gaussian overlap reference values")


def test_criterion_08_metric_paths_agree():
    rng = np.random.default_rng(2024)
    for _ in range(1000):
        n = int(rng.integers(1, 30))
        m = int(rng.integers(1, 30))
        # Quarter-step quantization forces ties within and across the sets.
        ids = rng.integers(0, 8, size=n) / 4.0
        oods = rng.integers(0, 8, size=m) / 4.0
        assert _auroc_pairwise_num(ids, oods) == _auroc_sorted_num(ids, oods)
        assert auroc(ids, oods) == auroc_oracle(ids, oods)
    rate, threshold = tpr95([0.2, 0.4, 0.6, 0.8, 1.0], [0.1, 0.3])
    assert rate == 0.5
    assert threshold == 0.2
    _passed(8, "metric paths agree")


def test_criterion_09_latency_and_footprint_shape(tmp_path):
    start = time.perf_counter()
    dims = (10, 100, 500, 1000, 2000)
    medians = [bench_cell(dim, K_DEFAULT, samples=10_000).median_ms
               for dim in dims]
    ratio = max(medians) / min(medians)
    assert ratio <= 2.0, f"latency spread across dims: {ratio:.2f}x"

    ks = (100, 200, 500, 1000)
    r2 = 0.0
    for _ in range(2):  # one retry absorbs scheduler jitter, gate unchanged
        k_medians = [bench_cell(100, k, samples=10_000).median_ms for k in ks]
        r2 = linear_fit_r2(ks, k_medians)
        if r2 >= 0.9:
            break
    assert r2 >= 0.9, f"latency vs k R^2 = {r2:.4f}"

    summary = fit(np.random.default_rng(0).standard_normal((2000, 100)),
                  k=K_DEFAULT)
    out = tmp_path / "summary.json"
    save_summary(str(out), summary)
    assert out.stat().st_size < 100_000
    assert time.perf_counter() - start < 300.0
    _passed(9, "latency and footprint shape")


def test_criterion_10_separated_clusters_auroc():
    for s in range(10):
        rng = np.random.default_rng(900 + s)
        summary = fit(rng.standard_normal((2000, 10)), k=K_DEFAULT)
        x_id = rng.standard_normal((1000, 10))
        x_ood = rng.standard_normal((1000, 10))
        x_ood[:, 0] += 10.0
        ids = [r.score for r in score_batch(x_id, summary)]
        oods = [r.score for r in score_batch(x_ood, summary)]
        got = auroc(ids, oods)
        assert got >= 0.99, f"seed {900 + s}: AUROC {got:.4f}"
    _passed(10, "separated clusters AUROC")


def _tabular_config_auroc(x: np.ndarray, y: np.ndarray, id_classes,
                          seed: int = 0) -> float:
    """Fixture protocol: z-score by a seeded 100-row pool, fit ID, score both."""
    id_mask = np.isin(y, id_classes)
    x_id, x_ood = x[id_mask], x[~id_mask]
    merged = np.concatenate([x_id, x_ood])
    rng = np.random.default_rng(seed)
    pool = merged[rng.choice(merged.shape[0], min(100, merged.shape[0]),
                             replace=False)]
    mu = pool.mean(axis=0)
    sd = pool.std(axis=0)
    sd[sd == 0.0] = 1.0
    z_id = (x_id - mu) / sd
    z_ood = (x_ood - mu) / sd
    summary = fit(z_id, k=K_DEFAULT)
    ids = [r.score for r in score_batch(z_id, summary)]
    oods = [r.score for r in score_batch(z_ood, summary)]
    return auroc(ids, oods)


def test_criterion_11_tabular_fixture_aurocs(uci_dir):
    start = time.perf_counter()

    def load(name):
        rows = np.loadtxt(Path(uci_dir) / name, delimiter=",")
        return rows[:, :-1], rows[:, -1].astype(int)

    x_iris, y_iris = load("iris.csv")
    x_bc, y_bc = load("breast_cancer.csv")
    x_wine, y_wine = load("wine.csv")
    setosa = _tabular_config_auroc(x_iris, y_iris, [0])
    assert setosa >= 0.95, f"setosa-as-ID AUROC {setosa:.4f}"
    configs = [
        setosa,
        _tabular_config_auroc(x_iris, y_iris, [1]),
        _tabular_config_auroc(x_iris, y_iris, [2]),
        _tabular_config_auroc(x_bc, y_bc, [0]),
        _tabular_config_auroc(x_bc, y_bc, [1]),
        _tabular_config_auroc(x_wine, y_wine, [0]),
    ]
    mean = float(np.mean(configs))
    assert mean >= 0.90, f"mean AUROC over six configs {mean:.4f}"
    assert time.perf_counter() - start < 30.0
    _passed(11, "tabular fixture AUROCs")


def test_criterion_12_score_decomposition_identity():
    rng = np.random.default_rng(7)
    kinds = (NormKind.L1, NormKind.L2, NormKind.LINF)
    checked = 0
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", UserWarning)
        for case in range(100):
            dim = int(rng.integers(1, 8))
            rows = int(rng.integers(2, 40))
            scale = 10.0 ** rng.uniform(-2.0, 2.0)
            summary = fit(rng.standard_normal((rows, dim)) * scale,
                          k=int(rng.integers(1, 150)),
                          norm_kind=kinds[case % 3])
            probes = rng.standard_normal((100, dim)) * scale
            for report in score_batch(probes, summary):
                assert report.score == (
                    (1.0 - report.delta_mu_term)
                    + (1.0 - report.shell_term) - 1.0)
                checked += 1
    assert checked == 10_000
    _passed(12, "score decomposition identity")

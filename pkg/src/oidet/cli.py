"""Command-line surface: fit, score, eval, estimate-oi, accuracy-bound, synth, bench.

Every command writes its primary output plus a sibling `<out>.manifest.json`
recording the resolved parameters and input digests; outputs are
deterministic given the manifest (the bench command's timing values are the
one hardware-dependent exception).

Exit codes: 0 success, 2 usage (argparse), 3 parse/io, 4 dimension,
5 schema version, 6 range, 1 any other failure.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import sys

import numpy as np

from . import __version__
from .accuracy import AccuracyBoundInput, accuracy_upper_bound, backdoor_mixture_bound
from .bench import DEFAULT_DIMS, DEFAULT_KS, bench_grid
from .core import NormKind
from .detector import (
    ID_LABEL,
    OOD_LABEL,
    compute_bound,
    contaminated_center,
    fit,
    score_batch,
)
from .errors import (
    BadSpec,
    DimensionMismatch,
    OidetError,
    ParseError,
    RangeError,
    SchemaVersionMismatch,
)
from .estimator import estimate_oi
from .io import load_summary, read_matrix, read_scores, save_summary, write_matrix, write_scores
from .metrics import eval_metrics
from .synth import sample, spec_from_dict, spec_to_dict, with_seed

EXIT_GENERAL = 1
EXIT_PARSE = 3
EXIT_DIMENSION = 4
EXIT_SCHEMA = 5
EXIT_RANGE = 6


def _sha256(path: str) -> str:
    digest = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            digest.update(chunk)
    return digest.hexdigest()


def _write_json(path: str, doc: dict) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(doc, fh, indent=2)
        fh.write("\n")


def _write_manifest(out_path: str, command: str, params: dict,
                    inputs: dict[str, str]) -> None:
    _write_json(out_path + ".manifest.json", {
        "tool": "oidet",
        "version": __version__,
        "command": command,
        "parameters": params,
        "inputs": {name: {"path": path, "sha256": _sha256(path)}
                   for name, path in inputs.items()},
    })


def _resolve_center(args) -> tuple[np.ndarray | None, dict[str, str]]:
    spec = args.center
    if spec == "none":
        return None, {}
    if spec.startswith("contaminated:"):
        body = spec[len("contaminated:"):]
        parts = body.rsplit(",", 2)
        if len(parts) != 3:
            raise ValueError(
                f"--center contaminated form is contaminated:POOL,COUNT,SEED, got {spec!r}")
        pool_path, count_s, seed_s = parts
        pool = read_matrix(pool_path, args.format, args.header)
        center = contaminated_center(pool, int(count_s), int(seed_s))
        return center, {"center_pool": pool_path}
    m = read_matrix(spec, args.format, args.header)
    if m.shape[0] != 1:
        raise DimensionMismatch(
            f"center file {spec} must contain exactly one row, has {m.shape[0]}")
    return m[0], {"center": spec}


def cmd_fit(args) -> None:
    x = read_matrix(args.input, args.format, args.header)
    center, center_inputs = _resolve_center(args)
    summary = fit(x, k=args.k, norm_kind=NormKind.parse(args.norm), center=center)
    save_summary(args.out, summary)
    _write_manifest(args.out, "fit", {
        "input": args.input, "format": args.format, "header": args.header,
        "k": args.k, "norm": args.norm, "center": args.center, "out": args.out,
    }, {"input": args.input, **center_inputs})


def cmd_score(args) -> None:
    summary = load_summary(args.summary)
    x = read_matrix(args.input, args.format, args.header)
    reports = score_batch(x, summary)
    labels = None
    if args.threshold is not None:
        labels = [ID_LABEL if r.score >= args.threshold else OOD_LABEL
                  for r in reports]
    write_scores(args.out, reports, labels)
    _write_manifest(args.out, "score", {
        "summary": args.summary, "input": args.input, "format": args.format,
        "header": args.header, "threshold": args.threshold, "out": args.out,
    }, {"summary": args.summary, "input": args.input})


def _histograms(id_scores, ood_scores, bins: int = 50) -> dict:
    combined = np.concatenate([id_scores, ood_scores])
    lo, hi = float(combined.min()), float(combined.max())
    if lo == hi:
        lo, hi = lo - 0.5, hi + 0.5
    edges = np.linspace(lo, hi, bins + 1)
    id_counts, _ = np.histogram(id_scores, bins=edges)
    ood_counts, _ = np.histogram(ood_scores, bins=edges)
    return {
        "bin_edges": edges.tolist(),
        "id_counts": id_counts.tolist(),
        "ood_counts": ood_counts.tolist(),
    }


def cmd_eval(args) -> None:
    id_scores = [row.score for row in read_scores(args.id_scores)]
    ood_scores = [row.score for row in read_scores(args.ood_scores)]
    report = eval_metrics(id_scores, ood_scores, aupr_positive=args.aupr_positive)
    doc = report.to_dict()
    if args.emit_histograms:
        doc["histograms"] = _histograms(id_scores, ood_scores)
    _write_json(args.out, doc)
    _write_manifest(args.out, "eval", {
        "id_scores": args.id_scores, "ood_scores": args.ood_scores,
        "aupr_positive": args.aupr_positive,
        "emit_histograms": args.emit_histograms, "out": args.out,
    }, {"id_scores": args.id_scores, "ood_scores": args.ood_scores})


def cmd_estimate_oi(args) -> None:
    a = read_matrix(args.a, args.format, args.header)
    b = read_matrix(args.b, args.format, args.header)
    est = estimate_oi(a, b, k=args.k, norm_kind=NormKind.parse(args.norm),
                      center_at_merged_mean=args.center_merged_mean)
    _write_json(args.out, {
        "value": est.value, "r_prime": est.r_prime, "method": est.method,
        "k": args.k, "norm": args.norm,
    })
    _write_manifest(args.out, "estimate-oi", {
        "a": args.a, "b": args.b, "format": args.format, "header": args.header,
        "k": args.k, "norm": args.norm,
        "center_merged_mean": args.center_merged_mean, "out": args.out,
    }, {"a": args.a, "b": args.b})


def cmd_accuracy_bound(args) -> None:
    clean = read_matrix(args.clean, args.format, args.header)
    shifted = read_matrix(args.shifted, args.format, args.header)
    summary = fit(clean, k=args.k, norm_kind=NormKind.parse(args.norm))
    report = compute_bound(shifted, summary)
    bound = accuracy_upper_bound(AccuracyBoundInput(
        p=args.p, q=args.q, overlap_bound=report.score, sigma=args.sigma))
    doc = {
        "p": args.p, "q": args.q,
        "overlap_bound": report.score,
        "delta_mu_term": report.delta_mu_term,
        "shell_term": report.shell_term,
        "bound": bound,
    }
    if args.sigma is not None:
        doc["sigma"] = args.sigma
        doc["backdoor_bound"] = backdoor_mixture_bound(
            args.p, args.sigma, report.delta_mu_term, report.shell_term)
    _write_json(args.out, doc)
    _write_manifest(args.out, "accuracy-bound", {
        "p": args.p, "q": args.q, "sigma": args.sigma,
        "clean": args.clean, "shifted": args.shifted,
        "format": args.format, "header": args.header,
        "k": args.k, "norm": args.norm, "out": args.out,
    }, {"clean": args.clean, "shifted": args.shifted})


def cmd_synth(args) -> None:
    text = args.spec
    if text.startswith("@"):
        with open(text[1:], "r", encoding="utf-8") as fh:
            text = fh.read()
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise BadSpec(f"--spec is not valid JSON: {exc}") from exc
    spec = spec_from_dict(doc)
    if args.seed is not None:
        spec = with_seed(spec, args.seed)
    x = sample(spec, args.count)
    write_matrix(args.out, x, args.format)
    _write_manifest(args.out, "synth", {
        "spec": spec_to_dict(spec), "count": args.count, "seed": spec.seed,
        "format": args.format, "out": args.out,
    }, {})


def _int_list(text: str) -> list[int]:
    try:
        return [int(tok) for tok in text.split(",") if tok.strip() != ""]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers: {text!r}") from exc


def cmd_bench(args) -> None:
    cells = bench_grid(dims=args.dims, ks=args.k_sweep, samples=args.samples,
                       warmup=args.warmup, fit_count=args.fit_count, seed=args.seed)
    _write_json(args.out, {
        "cells": [c.to_dict() for c in cells],
        "methodology": {
            "clock": "perf_counter_ns",
            "warmup_per_cell": args.warmup,
            "samples_per_cell": args.samples,
            "fit_count": args.fit_count,
            "seed": args.seed,
        },
    })
    _write_manifest(args.out, "bench", {
        "dims": args.dims, "k_sweep": args.k_sweep, "samples": args.samples,
        "warmup": args.warmup, "fit_count": args.fit_count, "seed": args.seed,
        "out": args.out,
    }, {})


def _add_matrix_args(sub, *names):
    for name in names:
        sub.add_argument(name, required=True)
    sub.add_argument("--format", choices=["csv", "f32le"], default="csv")
    sub.add_argument("--header", action="store_true",
                     help="input CSV files have a header row")


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="oidet",
        description="Non-parametric OOD detection via an overlap-bound confidence score.")
    parser.add_argument("--version", action="version", version=f"oidet {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("fit", help="fit an in-distribution summary")
    _add_matrix_args(p, "--input")
    p.add_argument("--k", type=int, default=100)
    p.add_argument("--norm", choices=["l1", "l2", "linf"], default="l2")
    p.add_argument("--center", default="none",
                   help="none | one-row vector file | contaminated:POOL,COUNT,SEED")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_fit)

    p = sub.add_parser("score", help="score candidate samples against a summary")
    p.add_argument("--summary", required=True)
    _add_matrix_args(p, "--input")
    p.add_argument("--threshold", type=float, default=None,
                   help="emit an ID/OOD label column at this threshold")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_score)

    p = sub.add_parser("eval", help="AUROC/TPR95/AUPR over two score files")
    p.add_argument("--id-scores", required=True)
    p.add_argument("--ood-scores", required=True)
    p.add_argument("--aupr-positive", choices=["ood", "id"], default="ood")
    p.add_argument("--emit-histograms", action="store_true")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("estimate-oi", help="overlap estimate between two sample sets")
    _add_matrix_args(p, "--a", "--b")
    p.add_argument("--k", type=int, default=100)
    p.add_argument("--norm", choices=["l1", "l2", "linf"], default="l2")
    p.add_argument("--center-merged-mean", action=argparse.BooleanOptionalAction,
                   default=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_estimate_oi)

    p = sub.add_parser("accuracy-bound", help="shift / mixture accuracy upper bounds")
    p.add_argument("--p", type=float, required=True, help="training accuracy")
    p.add_argument("--q", type=float, required=True, help="accuracy on the novel part")
    p.add_argument("--sigma", type=float, default=None, help="clean mixture fraction")
    _add_matrix_args(p, "--clean", "--shifted")
    p.add_argument("--k", type=int, default=100)
    p.add_argument("--norm", choices=["l1", "l2", "linf"], default="l2")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_accuracy_bound)

    p = sub.add_parser("synth", help="draw samples from a synthetic spec")
    p.add_argument("--spec", required=True, help="JSON object, or @path to one")
    p.add_argument("--count", type=int, required=True)
    p.add_argument("--seed", type=int, default=None, help="override the spec seed")
    p.add_argument("--format", choices=["csv", "f32le"], default="csv")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("bench", help="per-sample scoring latency sweep")
    p.add_argument("--dims", type=_int_list, default=list(DEFAULT_DIMS))
    p.add_argument("--k-sweep", type=_int_list, default=list(DEFAULT_KS))
    p.add_argument("--samples", type=int, default=10_000)
    p.add_argument("--warmup", type=int, default=1_000)
    p.add_argument("--fit-count", type=int, default=1_000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_bench)

    return parser


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        args.func(args)
    except SchemaVersionMismatch as exc:
        return _fail(exc, EXIT_SCHEMA)
    except (ParseError, BadSpec, json.JSONDecodeError, OSError) as exc:
        return _fail(exc, EXIT_PARSE)
    except DimensionMismatch as exc:
        return _fail(exc, EXIT_DIMENSION)
    except RangeError as exc:
        return _fail(exc, EXIT_RANGE)
    except (OidetError, ValueError) as exc:
        return _fail(exc, EXIT_GENERAL)
    return 0


def _fail(exc: Exception, code: int) -> int:
    print(f"oidet: error: {exc}", file=sys.stderr)
    return code


if __name__ == "__main__":
    sys.exit(main())

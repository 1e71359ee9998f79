"""Regenerate the bundled UCI-style CSV fixtures from scikit-learn's copies.

Each fixture is a plain numeric CSV (no header): feature columns followed by
an integer class label in the last column. Floats are written in shortest
round-trip decimal form so regeneration is byte-stable across runs.

The bundled trio stands in for the classic small UCI evaluation tables:
iris (3 classes, each usable as the in-distribution class), breast cancer
diagnostic (benign/malignant, both directions), and wine (class 2 as the
in-distribution class). scikit-learn ships local copies, so regeneration
needs no network access.

Usage:
    python3 scripts/make_uci_fixtures.py [--out-dir tests/fixtures/uci]
"""

from __future__ import annotations

import argparse
import os

import numpy as np
from sklearn.datasets import load_breast_cancer, load_iris, load_wine

DATASETS = {
    "iris.csv": load_iris,
    "breast_cancer.csv": load_breast_cancer,
    "wine.csv": load_wine,
}


def write_fixture(path: str, features: np.ndarray, labels: np.ndarray) -> None:
    lines = []
    for row, label in zip(np.asarray(features, dtype=np.float64), labels):
        fields = [repr(float(v)) for v in row] + [str(int(label))]
        lines.append(",".join(fields))
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(lines) + "\n")


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--out-dir", default="tests/fixtures/uci")
    args = parser.parse_args(argv)
    os.makedirs(args.out_dir, exist_ok=True)
    for name, loader in DATASETS.items():
        bundle = loader()
        path = os.path.join(args.out_dir, name)
        write_fixture(path, bundle.data, bundle.target)
        print(f"wrote {path}: {bundle.data.shape[0]} rows, "
              f"{bundle.data.shape[1]} features, "
              f"{len(set(bundle.target.tolist()))} classes")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())

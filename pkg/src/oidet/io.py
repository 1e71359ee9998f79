"""Matrix, score, and summary file formats.

All writers emit canonical bytes: fixed field order and shortest round-trip
decimal floats, so write -> read -> write reproduces files exactly.
"""

from __future__ import annotations

import json
import struct
from dataclasses import dataclass

import numpy as np

from .detector import IdSummary, ScoreReport, summary_from_dict, summary_to_dict
from .errors import BadMagic, ParseError, RaggedRows

MAGIC = b"OIDM"
SCORES_HEADER = "score,delta_mu_term,shell_term,best_shell"
MATRIX_FORMATS = ("csv", "f32le")


def _fmt(value: float) -> str:
    # repr() of a float is its shortest decimal that round-trips exactly.
    return repr(float(value))


def _read_csv(path: str, header: bool) -> np.ndarray:
    with open(path, "r", encoding="utf-8") as fh:
        lines = fh.read().split("\n")
    rows: list[list[float]] = []
    ncol = None
    for lineno, line in enumerate(lines, start=1):
        if header and lineno == 1:
            continue
        if line.strip() == "":
            continue
        fields = line.split(",")
        if ncol is None:
            ncol = len(fields)
        elif len(fields) != ncol:
            raise RaggedRows(
                f"{path}: line {lineno} has {len(fields)} fields, expected {ncol}")
        parsed = []
        for col, tok in enumerate(fields, start=1):
            try:
                value = float(tok)
            except ValueError as exc:
                raise ParseError(
                    f"{path}: line {lineno}, column {col}: "
                    f"cannot parse {tok.strip()!r} as a number") from exc
            if not np.isfinite(value):
                raise ParseError(
                    f"{path}: line {lineno}, column {col}: non-finite value {tok.strip()!r}")
            parsed.append(value)
        rows.append(parsed)
    if not rows:
        raise ParseError(f"{path}: no data rows")
    return np.asarray(rows, dtype=np.float64)


def _read_f32le(path: str) -> np.ndarray:
    with open(path, "rb") as fh:
        blob = fh.read()
    if len(blob) < 12:
        raise ParseError(f"{path}: file too short for a binary matrix header")
    if blob[:4] != MAGIC:
        raise BadMagic(f"{path}: bad magic {blob[:4]!r}, expected {MAGIC!r}")
    rows, cols = struct.unpack("<II", blob[4:12])
    expected = rows * cols * 4
    payload = blob[12:]
    if len(payload) != expected:
        raise ParseError(
            f"{path}: payload is {len(payload)} bytes, expected {expected} "
            f"for {rows}x{cols}")
    data = np.frombuffer(payload, dtype="<f4").astype(np.float64)
    return data.reshape(rows, cols)


def read_matrix(path: str, format: str = "csv", header: bool = False) -> np.ndarray:
    """Load a sample matrix; CSV floats parse as doubles, f32le widens."""
    if format == "csv":
        return _read_csv(path, header)
    if format == "f32le":
        return _read_f32le(path)
    raise ValueError(f"unknown matrix format {format!r}")


def write_matrix(path: str, x, format: str = "csv") -> None:
    """Persist a matrix in a canonical byte form for the chosen format."""
    x = np.asarray(x, dtype=np.float64)
    if x.ndim == 1:
        x = x.reshape(1, -1)
    if x.ndim != 2:
        raise ValueError(f"matrix must be 2-D, got shape {x.shape}")
    if format == "csv":
        lines = [",".join(_fmt(v) for v in row) for row in x]
        with open(path, "w", encoding="utf-8") as fh:
            fh.write("\n".join(lines) + "\n")
    elif format == "f32le":
        rows, cols = x.shape
        with open(path, "wb") as fh:
            fh.write(MAGIC)
            fh.write(struct.pack("<II", rows, cols))
            fh.write(np.ascontiguousarray(x, dtype="<f4").tobytes())
    else:
        raise ValueError(f"unknown matrix format {format!r}")


@dataclass(frozen=True)
class ScoreRow:
    """One row of a scores CSV (the persisted subset of a ScoreReport)."""

    score: float
    delta_mu_term: float
    shell_term: float
    best_shell: int
    label: str | None = None


def write_scores(path: str, reports: list[ScoreReport], labels=None) -> None:
    """Scores CSV with the pinned header; optional label column."""
    if labels is not None and len(labels) != len(reports):
        raise ValueError("labels must align with reports")
    header = SCORES_HEADER + (",label" if labels is not None else "")
    lines = [header]
    for i, r in enumerate(reports):
        row = f"{_fmt(r.score)},{_fmt(r.delta_mu_term)},{_fmt(r.shell_term)},{r.best_shell}"
        if labels is not None:
            row += f",{labels[i]}"
        lines.append(row)
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(lines) + "\n")


def read_scores(path: str) -> list[ScoreRow]:
    """Parse a scores CSV written by write_scores."""
    with open(path, "r", encoding="utf-8") as fh:
        lines = [ln for ln in fh.read().split("\n") if ln.strip() != ""]
    if not lines:
        raise ParseError(f"{path}: empty scores file")
    head = lines[0]
    if head not in (SCORES_HEADER, SCORES_HEADER + ",label"):
        raise ParseError(f"{path}: unexpected scores header {head!r}")
    with_label = head.endswith(",label")
    want = 5 if with_label else 4
    out: list[ScoreRow] = []
    for lineno, line in enumerate(lines[1:], start=2):
        fields = line.split(",")
        if len(fields) != want:
            raise RaggedRows(
                f"{path}: line {lineno} has {len(fields)} fields, expected {want}")
        try:
            out.append(ScoreRow(
                score=float(fields[0]),
                delta_mu_term=float(fields[1]),
                shell_term=float(fields[2]),
                best_shell=int(fields[3]),
                label=fields[4] if with_label else None,
            ))
        except ValueError as exc:
            raise ParseError(f"{path}: line {lineno}: {exc}") from exc
    return out


def save_summary(path: str, summary: IdSummary) -> None:
    """Canonical JSON for a fitted summary (schema from the detector)."""
    doc = summary_to_dict(summary)
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(doc, fh, indent=2)
        fh.write("\n")


def load_summary(path: str) -> IdSummary:
    """Inverse of save_summary; scores from the loaded summary match exactly."""
    with open(path, "r", encoding="utf-8") as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ParseError(f"{path}: invalid summary JSON: {exc}") from exc
    if not isinstance(doc, dict):
        raise ParseError(f"{path}: summary JSON must be an object")
    try:
        return summary_from_dict(doc)
    except KeyError as exc:
        raise ParseError(f"{path}: summary JSON missing field {exc}") from exc

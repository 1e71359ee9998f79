/**
 * Bindings over the `oidet` command-line tool.
 *
 * Every operation delegates to the CLI through temporary files, so results
 * are bit-identical to the primary implementation: numbers cross the
 * boundary as shortest round-trip decimals (what `String(x)` emits and what
 * the CLI writes back), which re-parse to the exact same IEEE-754 double on
 * either side. No numeric computation happens in this package.
 *
 * The executable is resolved from the OIDET_BIN environment variable, or
 * `oidet` on PATH.
 */

import { spawnSync } from "node:child_process";
import * as fs from "node:fs";
import * as os from "node:os";
import * as path from "node:path";

export type NormKind = "l1" | "l2" | "linf";

/** The persisted fields of one scored probe (one scores-CSV row). */
export interface ScoreRecord {
  score: number;
  delta_mu_term: number;
  shell_term: number;
  best_shell: number;
}

/** Detection metrics over one ID-vs-OOD score comparison. */
export interface MetricsRecord {
  auroc: number;
  tpr95: number;
  aupr: number;
  threshold_at_95: number;
  n_id: number;
  n_ood: number;
}

export interface FitOptions {
  k?: number;
  norm?: NormKind;
  center?: readonly number[];
}

export interface EstimateOiOptions {
  k?: number;
  norm?: NormKind;
  centered?: boolean;
}

export interface EvalMetricsOptions {
  auprPositive?: "ood" | "id";
}

export const SUMMARY_SCHEMA_VERSION = 1;

/** Base class for errors surfaced from the underlying tool. */
export class OidetError extends Error {
  constructor(message: string) {
    super(message);
    this.name = new.target.name;
  }
}

/** Vector/matrix dimensions do not agree (including ragged input arrays). */
export class DimensionMismatchError extends OidetError {}

/** A data file could not be parsed. */
export class ParseError extends OidetError {}

/** Persisted document carries an unsupported schema version. */
export class SchemaVersionMismatchError extends OidetError {}

const EXIT_PARSE = 3;
const EXIT_DIMENSION = 4;
const EXIT_SCHEMA = 5;
const EXIT_RANGE = 6;

const SCORES_HEADER = "score,delta_mu_term,shell_term,best_shell";

function cliBinary(): string {
  const override = process.env.OIDET_BIN;
  return override !== undefined && override !== "" ? override : "oidet";
}

function runCli(args: readonly string[]): void {
  const bin = cliBinary();
  const res = spawnSync(bin, args, { encoding: "utf8" });
  if (res.error !== undefined) {
    throw new OidetError(`failed to launch ${bin}: ${res.error.message}`);
  }
  if (res.status === 0) {
    return;
  }
  const message = (res.stderr ?? "").trim() || `${bin} exited with status ${res.status}`;
  switch (res.status) {
    case EXIT_SCHEMA:
      throw new SchemaVersionMismatchError(message);
    case EXIT_PARSE:
      throw new ParseError(message);
    case EXIT_DIMENSION:
      throw new DimensionMismatchError(message);
    case EXIT_RANGE:
      throw new RangeError(message);
    default:
      throw new OidetError(message);
  }
}

function withTempDir<T>(fn: (dir: string) => T): T {
  const dir = fs.mkdtempSync(path.join(os.tmpdir(), "oidet-bindings-"));
  try {
    return fn(dir);
  } finally {
    fs.rmSync(dir, { recursive: true, force: true });
  }
}

/**
 * Shortest decimal that round-trips to exactly `value`. `String()` already
 * guarantees that for doubles; negative zero needs an explicit sign because
 * `String(-0)` drops it.
 */
function formatDouble(value: number, what: string): string {
  if (typeof value !== "number") {
    throw new TypeError(`${what}: expected a number, got ${typeof value}`);
  }
  return Object.is(value, -0) ? "-0.0" : String(value);
}

function toMatrixCsv(rows: readonly (readonly number[])[], what: string): string {
  if (!Array.isArray(rows)) {
    throw new TypeError(`${what}: expected an array of rows`);
  }
  const lines: string[] = [];
  let width = -1;
  for (let i = 0; i < rows.length; i++) {
    const row = rows[i];
    if (!Array.isArray(row)) {
      throw new TypeError(`${what}: row ${i} is not an array`);
    }
    if (width === -1) {
      width = row.length;
    } else if (row.length !== width) {
      throw new DimensionMismatchError(
        `${what}: ragged input array: row ${i} has ${row.length} columns, expected ${width}`,
      );
    }
    const fields: string[] = [];
    for (let j = 0; j < row.length; j++) {
      fields.push(formatDouble(row[j], `${what}[${i}][${j}]`));
    }
    lines.push(fields.join(","));
  }
  return lines.length === 0 ? "" : lines.join("\n") + "\n";
}

function toVectorRow(x: readonly number[], what: string): readonly (readonly number[])[] {
  if (!Array.isArray(x)) {
    throw new TypeError(`${what}: expected a flat array of numbers`);
  }
  for (let j = 0; j < x.length; j++) {
    if (typeof x[j] !== "number") {
      throw new TypeError(`${what}[${j}]: expected a number, got ${typeof x[j]}`);
    }
  }
  return [x];
}

function parseDouble(token: string, origin: string): number {
  const trimmed = token.trim().toLowerCase();
  if (trimmed === "nan") return NaN;
  if (trimmed === "inf") return Infinity;
  if (trimmed === "-inf") return -Infinity;
  const value = trimmed === "" ? NaN : Number(trimmed);
  if (Number.isNaN(value)) {
    throw new ParseError(`${origin}: cannot parse ${JSON.stringify(token)} as a number`);
  }
  return value;
}

function parseScoresCsv(text: string, origin: string): ScoreRecord[] {
  const lines = text.split("\n").filter((line) => line.trim() !== "");
  if (lines.length === 0) {
    throw new ParseError(`${origin}: empty scores file`);
  }
  const head = lines[0];
  if (head !== SCORES_HEADER && head !== SCORES_HEADER + ",label") {
    throw new ParseError(`${origin}: unexpected scores header ${JSON.stringify(head)}`);
  }
  const want = head.endsWith(",label") ? 5 : 4;
  const out: ScoreRecord[] = [];
  for (let i = 1; i < lines.length; i++) {
    const fields = lines[i].split(",");
    if (fields.length !== want) {
      throw new ParseError(
        `${origin}: line ${i + 1} has ${fields.length} fields, expected ${want}`,
      );
    }
    const bestShell = Number(fields[3]);
    if (!Number.isInteger(bestShell)) {
      throw new ParseError(`${origin}: line ${i + 1}: bad shell index ${JSON.stringify(fields[3])}`);
    }
    out.push({
      score: parseDouble(fields[0], origin),
      delta_mu_term: parseDouble(fields[1], origin),
      shell_term: parseDouble(fields[2], origin),
      best_shell: bestShell,
    });
  }
  return out;
}

function toScoresCsv(scores: readonly number[], what: string): string {
  if (!Array.isArray(scores)) {
    throw new TypeError(`${what}: expected a flat array of numbers`);
  }
  const lines = [SCORES_HEADER];
  for (let i = 0; i < scores.length; i++) {
    lines.push(`${formatDouble(scores[i], `${what}[${i}]`)},0.0,0.0,0`);
  }
  return lines.join("\n") + "\n";
}

interface SummaryDoc {
  version: number;
  norm_kind: NormKind;
  k: number;
  r_B_id: number;
  m: number;
  mean: number[];
  shell_freq: number[];
  shell_max_norm: number[];
  center?: number[];
}

const REQUIRED_SUMMARY_FIELDS = [
  "norm_kind",
  "k",
  "r_B_id",
  "m",
  "mean",
  "shell_freq",
  "shell_max_norm",
] as const;

function parseSummaryText(text: string, origin: string): SummaryDoc {
  let parsed: unknown;
  try {
    parsed = JSON.parse(text);
  } catch (exc) {
    throw new ParseError(`${origin}: invalid summary JSON: ${(exc as Error).message}`);
  }
  if (typeof parsed !== "object" || parsed === null || Array.isArray(parsed)) {
    throw new ParseError(`${origin}: summary JSON must be an object`);
  }
  const doc = parsed as Record<string, unknown>;
  const version = doc.version;
  if (version !== SUMMARY_SCHEMA_VERSION) {
    throw new SchemaVersionMismatchError(
      `unsupported summary schema version ${JSON.stringify(version)} ` +
        `(expected ${SUMMARY_SCHEMA_VERSION})`,
    );
  }
  for (const field of REQUIRED_SUMMARY_FIELDS) {
    if (!(field in doc)) {
      throw new ParseError(`${origin}: summary JSON missing field '${field}'`);
    }
  }
  for (const field of ["k", "r_B_id", "m"] as const) {
    if (typeof doc[field] !== "number") {
      throw new ParseError(`${origin}: summary field '${field}' must be a number`);
    }
  }
  if (typeof doc.norm_kind !== "string") {
    throw new ParseError(`${origin}: summary field 'norm_kind' must be a string`);
  }
  return doc as unknown as SummaryDoc;
}

const HANDLE_TEXT = new WeakMap<BoundSummaryHandle, string>();
const HANDLE_DOC = new WeakMap<BoundSummaryHandle, SummaryDoc>();

let makeHandle: (text: string, origin: string) => BoundSummaryHandle;

/**
 * Opaque, immutable wrapper around a fitted summary document. Instances come
 * from {@link fit} or {@link load} and carry the summary file's exact bytes,
 * so {@link save} reproduces a file the CLI reads back unchanged. Handles are
 * frozen and safe to share across concurrent scoring calls.
 */
export class BoundSummaryHandle {
  private constructor(text: string, origin: string) {
    HANDLE_DOC.set(this, parseSummaryText(text, origin));
    HANDLE_TEXT.set(this, text);
    Object.freeze(this);
  }

  static {
    makeHandle = (text, origin) => new BoundSummaryHandle(text, origin);
  }

  /** Number of norm shells in the fitted partition. */
  get k(): number {
    return HANDLE_DOC.get(this)!.k;
  }

  /** Largest sample norm seen at fit time (the enclosing ball radius). */
  get rB(): number {
    return HANDLE_DOC.get(this)!.r_B_id;
  }

  /** Number of fitted samples. */
  get m(): number {
    return HANDLE_DOC.get(this)!.m;
  }

  /** Which norm the shells were built with. */
  get normKind(): NormKind {
    return HANDLE_DOC.get(this)!.norm_kind;
  }
}

function handleText(handle: BoundSummaryHandle, what: string): string {
  if (!(handle instanceof BoundSummaryHandle)) {
    throw new TypeError(`${what}: expected a BoundSummaryHandle`);
  }
  return HANDLE_TEXT.get(handle)!;
}

/**
 * Fit a summary on in-distribution samples (rows) and return a handle.
 * Defaults match the CLI: k=100, norm="l2", no explicit center.
 */
export function fit(
  samples: readonly (readonly number[])[],
  options: FitOptions = {},
): BoundSummaryHandle {
  const { k = 100, norm = "l2", center } = options;
  return withTempDir((dir) => {
    const input = path.join(dir, "input.csv");
    fs.writeFileSync(input, toMatrixCsv(samples, "samples"));
    const out = path.join(dir, "summary.json");
    const args = [
      "fit", "--input", input, "--k", String(k), "--norm", norm, "--out", out,
    ];
    if (center !== undefined) {
      const centerPath = path.join(dir, "center.csv");
      fs.writeFileSync(centerPath, toMatrixCsv(toVectorRow(center, "center"), "center"));
      args.push("--center", centerPath);
    }
    runCli(args);
    return makeHandle(fs.readFileSync(out, "utf8"), out);
  });
}

/** Score a batch of probe rows against a fitted summary. */
export function scoreBatch(
  handle: BoundSummaryHandle,
  probes: readonly (readonly number[])[],
): ScoreRecord[] {
  const text = handleText(handle, "scoreBatch");
  return withTempDir((dir) => {
    const summaryPath = path.join(dir, "summary.json");
    fs.writeFileSync(summaryPath, text);
    const input = path.join(dir, "probes.csv");
    fs.writeFileSync(input, toMatrixCsv(probes, "probes"));
    const out = path.join(dir, "scores.csv");
    runCli(["score", "--summary", summaryPath, "--input", input, "--out", out]);
    return parseScoresCsv(fs.readFileSync(out, "utf8"), out);
  });
}

/** Score a single probe vector against a fitted summary. */
export function score(handle: BoundSummaryHandle, x: readonly number[]): ScoreRecord {
  return scoreBatch(handle, toVectorRow(x, "x"))[0];
}

/**
 * Clamped overlap lower bound between two sample sets. Returns the estimate
 * in [0, 1]; `centered` toggles merged-mean centering (on by default).
 */
export function estimateOi(
  a: readonly (readonly number[])[],
  b: readonly (readonly number[])[],
  options: EstimateOiOptions = {},
): number {
  const { k = 100, norm = "l2", centered = true } = options;
  return withTempDir((dir) => {
    const aPath = path.join(dir, "a.csv");
    const bPath = path.join(dir, "b.csv");
    fs.writeFileSync(aPath, toMatrixCsv(a, "a"));
    fs.writeFileSync(bPath, toMatrixCsv(b, "b"));
    const out = path.join(dir, "oi.json");
    runCli([
      "estimate-oi", "--a", aPath, "--b", bPath,
      "--k", String(k), "--norm", norm,
      centered ? "--center-merged-mean" : "--no-center-merged-mean",
      "--out", out,
    ]);
    const doc = JSON.parse(fs.readFileSync(out, "utf8")) as { value: number };
    return doc.value;
  });
}

/** AUROC / TPR95 / AUPR for in-distribution vs out-of-distribution scores. */
export function evalMetrics(
  idScores: readonly number[],
  oodScores: readonly number[],
  options: EvalMetricsOptions = {},
): MetricsRecord {
  const { auprPositive = "ood" } = options;
  return withTempDir((dir) => {
    const idPath = path.join(dir, "id_scores.csv");
    const oodPath = path.join(dir, "ood_scores.csv");
    fs.writeFileSync(idPath, toScoresCsv(idScores, "idScores"));
    fs.writeFileSync(oodPath, toScoresCsv(oodScores, "oodScores"));
    const out = path.join(dir, "metrics.json");
    runCli([
      "eval", "--id-scores", idPath, "--ood-scores", oodPath,
      "--aupr-positive", auprPositive, "--out", out,
    ]);
    const doc = JSON.parse(fs.readFileSync(out, "utf8")) as MetricsRecord;
    return {
      auroc: doc.auroc,
      tpr95: doc.tpr95,
      aupr: doc.aupr,
      threshold_at_95: doc.threshold_at_95,
      n_id: doc.n_id,
      n_ood: doc.n_ood,
    };
  });
}

/** Write the handle's summary file; the CLI reads it back unchanged. */
export function save(handle: BoundSummaryHandle, filePath: string): void {
  fs.writeFileSync(filePath, handleText(handle, "save"));
}

/** Read a summary file written by {@link save} or by the CLI. */
export function load(filePath: string): BoundSummaryHandle {
  let text: string;
  try {
    text = fs.readFileSync(filePath, "utf8");
  } catch (exc) {
    throw new ParseError(`${filePath}: ${(exc as Error).message}`);
  }
  return makeHandle(text, filePath);
}

/**
 * Test-side utilities that talk to the CLI directly, independently of the
 * bindings under test, so cross-checks compare two separate code paths.
 */

import { spawnSync } from "node:child_process";
import assert from "node:assert/strict";
import * as fs from "node:fs";
import * as os from "node:os";
import * as path from "node:path";

export const CLI = process.env.OIDET_BIN ?? "oidet";

export function withDir<T>(fn: (dir: string) => T): T {
  const dir = fs.mkdtempSync(path.join(os.tmpdir(), "oidet-bindings-test-"));
  try {
    return fn(dir);
  } finally {
    fs.rmSync(dir, { recursive: true, force: true });
  }
}

/** Run the CLI and require success; returns nothing, outputs land in files. */
export function cli(...args: string[]): void {
  const res = spawnSync(CLI, args, { encoding: "utf8" });
  assert.equal(res.status, 0, `oidet ${args.join(" ")} failed: ${res.stderr}`);
}

/** Plain CSV writer for test fixtures (String() round-trips doubles). */
export function writeCsv(filePath: string, rows: readonly (readonly number[])[]): void {
  const text = rows.map((row) => row.map((v) => String(v)).join(",")).join("\n") + "\n";
  fs.writeFileSync(filePath, text);
}

export interface RawScoreRow {
  score: number;
  delta_mu_term: number;
  shell_term: number;
  best_shell: number;
  label?: string;
}

/** Independent scores-CSV parser (kept separate from the bindings' own). */
export function readScoresFile(filePath: string): RawScoreRow[] {
  const lines = fs
    .readFileSync(filePath, "utf8")
    .split("\n")
    .filter((line) => line.trim() !== "");
  const withLabel = lines[0].endsWith(",label");
  return lines.slice(1).map((line) => {
    const f = line.split(",");
    const row: RawScoreRow = {
      score: Number(f[0]),
      delta_mu_term: Number(f[1]),
      shell_term: Number(f[2]),
      best_shell: Number(f[3]),
    };
    if (withLabel) {
      row.label = f[4];
    }
    return row;
  });
}

export function readJson(filePath: string): any {
  return JSON.parse(fs.readFileSync(filePath, "utf8"));
}

/** Assert two doubles are the same bit pattern (0 ULP; -0 !== +0, NaN === NaN). */
export function assertBitEqual(actual: number, expected: number, context: string): void {
  assert.ok(
    Object.is(actual, expected),
    `${context}: ${actual} !== ${expected} (diff ${actual - expected})`,
  );
}

import { describe, it } from "node:test";
import assert from "node:assert/strict";
import * as fs from "node:fs";
import * as path from "node:path";

import {
  BoundSummaryHandle,
  OidetError,
  estimateOi,
  evalMetrics,
  fit,
  load,
  save,
  score,
  scoreBatch,
} from "../src/index";
import { assertBitEqual, cli, readScoresFile, withDir, writeCsv } from "./helpers";

describe("hand-traced one-dimensional case", () => {
  it("scores 0.0 through the bindings, equal to direct CLI output", () => {
    const handle = fit([[2]], { k: 2 });
    const viaBindings = score(handle, [0]);
    assert.equal(viaBindings.score, 0.0);

    withDir((dir) => {
      const train = path.join(dir, "train.csv");
      const probes = path.join(dir, "probes.csv");
      const summary = path.join(dir, "summary.json");
      const scores = path.join(dir, "scores.csv");
      writeCsv(train, [[2]]);
      writeCsv(probes, [[0]]);
      cli("fit", "--input", train, "--k", "2", "--out", summary);
      cli("score", "--summary", summary, "--input", probes, "--out", scores);
      const viaCli = readScoresFile(scores)[0];
      assertBitEqual(viaBindings.score, viaCli.score, "score");
      assertBitEqual(viaBindings.delta_mu_term, viaCli.delta_mu_term, "delta_mu_term");
      assertBitEqual(viaBindings.shell_term, viaCli.shell_term, "shell_term");
      assert.equal(viaBindings.best_shell, viaCli.best_shell);
    });
  });

  it("scores 0.5 with a single shell, equal to direct CLI output", () => {
    const handle = fit([[2]], { k: 1 });
    const viaBindings = score(handle, [0]);
    assert.equal(viaBindings.score, 0.5);

    withDir((dir) => {
      const train = path.join(dir, "train.csv");
      const probes = path.join(dir, "probes.csv");
      const summary = path.join(dir, "summary.json");
      const scores = path.join(dir, "scores.csv");
      writeCsv(train, [[2]]);
      writeCsv(probes, [[0]]);
      cli("fit", "--input", train, "--k", "1", "--out", summary);
      cli("score", "--summary", summary, "--input", probes, "--out", scores);
      assertBitEqual(viaBindings.score, readScoresFile(scores)[0].score, "score");
    });
  });
});

describe("BoundSummaryHandle", () => {
  it("exposes k, rB, m, and normKind read-only", () => {
    const handle = fit(
      [
        [3, 4],
        [0, 1],
        [1, 0],
      ],
      { k: 7, norm: "l2" },
    );
    assert.equal(handle.k, 7);
    assert.equal(handle.rB, 5); // norm of (3, 4)
    assert.equal(handle.m, 3);
    assert.equal(handle.normKind, "l2");
  });

  it("is frozen and opaque", () => {
    const handle = fit([[1], [2]], { k: 1 });
    assert.ok(Object.isFrozen(handle));
    assert.deepEqual(Object.keys(handle), []);
    assert.throws(() => {
      (handle as any).k = 99;
    }, TypeError);
  });

  it("reflects the l1 norm and an explicit center", () => {
    const handle = fit(
      [
        [1, 1],
        [2, 2],
      ],
      { k: 1, norm: "l1", center: [1, 1] },
    );
    // Centered rows are (0, 0) and (1, 1); the max l1 norm is 2.
    assert.equal(handle.rB, 2);
    assert.equal(handle.normKind, "l1");
  });
});

describe("score and scoreBatch", () => {
  it("agree on a single row", () => {
    const handle = fit(
      [
        [0.5, -1.25],
        [2.0, 0.75],
        [-0.125, 3.5],
      ],
      { k: 4 },
    );
    const probe = [0.375, 1.625];
    const one = score(handle, probe);
    const batch = scoreBatch(handle, [probe]);
    assert.equal(batch.length, 1);
    assertBitEqual(one.score, batch[0].score, "score");
    assertBitEqual(one.delta_mu_term, batch[0].delta_mu_term, "delta_mu_term");
    assertBitEqual(one.shell_term, batch[0].shell_term, "shell_term");
    assert.equal(one.best_shell, batch[0].best_shell);
  });

  it("scores the sole fitted sample at exactly 1.0", () => {
    const handle = fit([[3, 4]], { k: 3 });
    const record = score(handle, [3, 4]);
    assert.equal(record.score, 1.0);
    assert.equal(record.delta_mu_term, 0.0);
    assert.equal(record.shell_term, 0.0);
  });

  it("preserves batch order and length", () => {
    const handle = fit([[0], [4]], { k: 2 });
    const records = scoreBatch(handle, [[0], [1], [2], [3], [4]]);
    assert.equal(records.length, 5);
    assert.equal(records[0].score, score(handle, [0]).score);
    assert.equal(records[4].score, score(handle, [4]).score);
  });
});

describe("save and load", () => {
  it("round-trips to an identical score record and identical bytes", () => {
    withDir((dir) => {
      const handle = fit(
        [
          [1.25, -0.5, 3],
          [0.75, 2.125, -1],
          [4, 0.0625, 0.5],
        ],
        { k: 5, norm: "linf" },
      );
      const first = path.join(dir, "summary.json");
      const second = path.join(dir, "again.json");
      save(handle, first);
      const reloaded = load(first);
      save(reloaded, second);
      assert.deepEqual(fs.readFileSync(second), fs.readFileSync(first));

      assert.equal(reloaded.k, handle.k);
      assertBitEqual(reloaded.rB, handle.rB, "rB");
      assert.equal(reloaded.m, handle.m);
      assert.equal(reloaded.normKind, handle.normKind);

      const probe = [0.1, 0.2, 0.3];
      const before = score(handle, probe);
      const after = score(reloaded, probe);
      assertBitEqual(before.score, after.score, "score");
      assertBitEqual(before.delta_mu_term, after.delta_mu_term, "delta_mu_term");
      assertBitEqual(before.shell_term, after.shell_term, "shell_term");
      assert.equal(before.best_shell, after.best_shell);
    });
  });
});

describe("estimateOi", () => {
  it("returns 0.0 for opposite singletons after merged-mean centering", () => {
    assert.equal(estimateOi([[-1]], [[1]], { k: 1 }), 0.0);
  });

  it("returns 1.0 for identical sample sets", () => {
    const rows = [[0.5], [1.5], [2.5]];
    assert.equal(estimateOi(rows, rows, { k: 3 }), 1.0);
  });

  it("stays in [0, 1] with centering disabled", () => {
    const value = estimateOi([[1], [2]], [[2], [3]], { k: 2, centered: false });
    assert.ok(value >= 0 && value <= 1);
  });
});

describe("evalMetrics", () => {
  it("computes the 3-of-4 concordant-pair AUROC", () => {
    const report = evalMetrics([0.9, 0.8], [0.85, 0.1]);
    assert.equal(report.auroc, 0.75);
    assert.equal(report.n_id, 2);
    assert.equal(report.n_ood, 2);
  });

  it("computes the tiny TPR95 fixture", () => {
    const report = evalMetrics([0.2], [0.1, 0.3]);
    assert.equal(report.tpr95, 0.5);
    assert.equal(report.threshold_at_95, 0.2);
  });

  it("supports flipping the AUPR positive class", () => {
    const asOod = evalMetrics([0.9, 0.8, 0.7], [0.85, 0.1]);
    const asId = evalMetrics([0.9, 0.8, 0.7], [0.85, 0.1], { auprPositive: "id" });
    assert.equal(asOod.aupr, 0.75);
    assert.notEqual(asId.aupr, asOod.aupr);
  });
});

describe("binary resolution", () => {
  it("honors OIDET_BIN and fails loudly when it cannot launch", () => {
    const saved = process.env.OIDET_BIN;
    process.env.OIDET_BIN = "/nonexistent/oidet-binary";
    try {
      assert.throws(
        () => fit([[1], [2]], { k: 1 }),
        (exc: unknown) =>
          exc instanceof OidetError && /failed to launch/.test((exc as Error).message),
      );
    } finally {
      if (saved === undefined) {
        delete process.env.OIDET_BIN;
      } else {
        process.env.OIDET_BIN = saved;
      }
    }
  });
});

describe("handle type guard", () => {
  it("rejects non-handles with a TypeError", () => {
    assert.throws(() => score({} as unknown as BoundSummaryHandle, [1]), TypeError);
    assert.throws(() => save(null as unknown as BoundSummaryHandle, "x.json"), TypeError);
  });
});

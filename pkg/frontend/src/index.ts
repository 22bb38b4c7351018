/**
 * Array-in/array-out bindings over the topoctx CLI.
 *
 * Each function writes its inputs to a private temp directory as BTF
 * files, runs one CLI subcommand, and parses the outputs back. The
 * binding performs no numeric work of its own, so results are
 * bit-identical to the command-line tool; input buffers are never
 * modified and nothing outlives the call.
 */

import * as fs from "node:fs";
import * as path from "node:path";

import { decodeBtf, encodeBtf, type NdGrid } from "./btf.js";
import { runCli, withTempDir } from "./runner.js";

export { BtfError, decodeBtf, encodeBtf } from "./btf.js";
export type { NdGrid } from "./btf.js";
export { CliError, cliPath } from "./runner.js";

export type SkeletonMode = "soft" | "binary";

export interface CriticalMaskOptions {
  /** Skeleton thinning rounds (default 50). */
  iters?: number;
  /** Prediction skeleton source (default "soft"). */
  mode?: SkeletonMode;
}

export interface MetricsOptions {
  /** Skeleton thinning rounds (default 50). */
  iters?: number;
}

function checkSameShape(a: NdGrid, b: NdGrid, aName: string, bName: string): void {
  if (a.shape.length !== b.shape.length || a.shape.some((s, i) => s !== b.shape[i])) {
    throw new RangeError(
      `${aName} shape [${a.shape}] does not match ${bName} shape [${b.shape}]`
    );
  }
}

function checkBinary(grid: NdGrid, name: string): void {
  if (!(grid.data instanceof Uint8Array)) {
    throw new TypeError(`${name} must be a binary grid backed by a Uint8Array`);
  }
}

function checkIters(iters: number): void {
  if (!Number.isInteger(iters) || iters < 1) {
    throw new RangeError(`iters must be a positive integer, got ${iters}`);
  }
}

function writeGrid(dir: string, name: string, grid: NdGrid): string {
  const file = path.join(dir, name);
  fs.writeFileSync(file, encodeBtf(grid));
  return file;
}

/**
 * Binary mask of the cells where the prediction breaks connectivity of
 * the target or invents spurious connections, grown to the surrounding
 * context. `pred` may be a probability or binary grid; `target` must be
 * binary. Matches the CLI `mask` subcommand output bit for bit.
 */
export function criticalMaskNd(
  pred: NdGrid,
  target: NdGrid,
  opts: CriticalMaskOptions = {}
): NdGrid {
  const iters = opts.iters ?? 50;
  const mode = opts.mode ?? "soft";
  checkIters(iters);
  if (mode !== "soft" && mode !== "binary") {
    throw new RangeError(`mode must be "soft" or "binary", got "${mode}"`);
  }
  checkSameShape(pred, target, "pred", "target");
  checkBinary(target, "target");
  return withTempDir((dir) => {
    const predFile = writeGrid(dir, "pred.btf", pred);
    const targetFile = writeGrid(dir, "target.btf", target);
    const prefix = path.join(dir, "crit");
    runCli([
      "mask", predFile, targetFile,
      "--out-prefix", prefix,
      "--mode", mode,
      "--iters", String(iters),
      "--out", path.join(dir, "summary.json"),
    ]);
    return decodeBtf(fs.readFileSync(`${prefix}_mask.btf`));
  });
}

/**
 * Whole-image quality metrics for one prediction/label pair: overlap
 * scores (dice, cldice, ags) and connectivity error counts (e0_gt, e0,
 * e1, e). Values round-trip unchanged from the CLI `eval` report.
 */
export function metricsNd(
  pred: NdGrid,
  target: NdGrid,
  opts: MetricsOptions = {}
): Record<string, number> {
  const iters = opts.iters ?? 50;
  checkIters(iters);
  checkSameShape(pred, target, "pred", "target");
  checkBinary(target, "target");
  return withTempDir((dir) => {
    const predFile = writeGrid(dir, "pred.btf", pred);
    const targetFile = writeGrid(dir, "target.btf", target);
    const reportFile = path.join(dir, "report.json");
    runCli([
      "eval",
      "--pair", predFile, targetFile,
      "--iters", String(iters),
      "--out", reportFile,
    ]);
    const report = JSON.parse(fs.readFileSync(reportFile, "utf8"));
    return { ...report.reports[0].aggregates };
  });
}

/**
 * Keeps each connected component of `fine` only if it shares at least
 * one cell with `coarse`; everything else is dropped. Both grids must
 * be binary with identical shapes.
 */
export function postprocessNd(fine: NdGrid, coarse: NdGrid): NdGrid {
  checkSameShape(fine, coarse, "fine", "coarse");
  checkBinary(fine, "fine");
  checkBinary(coarse, "coarse");
  return withTempDir((dir) => {
    const fineFile = writeGrid(dir, "fine.btf", fine);
    const coarseFile = writeGrid(dir, "coarse.btf", coarse);
    const outFile = path.join(dir, "kept.btf");
    runCli([
      "postproc", fineFile, coarseFile, outFile,
      "--out", path.join(dir, "summary.json"),
    ]);
    return decodeBtf(fs.readFileSync(outFile));
  });
}

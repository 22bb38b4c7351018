import { execFileSync } from "node:child_process";
import * as fs from "node:fs";
import * as os from "node:os";
import * as path from "node:path";

import { encodeBtf, type NdGrid } from "../src/btf.js";
import { cliPath } from "../src/runner.js";

/** Deterministic 32-bit PRNG (mulberry32); returns floats in [0, 1). */
export function makeRand(seed: number): () => number {
  let state = seed >>> 0;
  return () => {
    state = (state + 0x6d2b79f5) >>> 0;
    let t = state;
    t = Math.imul(t ^ (t >>> 15), t | 1);
    t ^= t + Math.imul(t ^ (t >>> 7), t | 61);
    return ((t ^ (t >>> 14)) >>> 0) / 4294967296;
  };
}

export function cellCount(shape: number[]): number {
  return shape.reduce((a, b) => a * b, 1);
}

export function randomBinary(rand: () => number, shape: number[], density = 0.5): NdGrid {
  const data = new Uint8Array(cellCount(shape));
  for (let i = 0; i < data.length; i++) {
    data[i] = rand() < density ? 1 : 0;
  }
  return { shape, data };
}

export function randomReal(rand: () => number, shape: number[]): NdGrid {
  const data = new Float32Array(cellCount(shape));
  for (let i = 0; i < data.length; i++) {
    data[i] = Math.fround(rand());
  }
  return { shape, data };
}

/** Binary grid from nested row literals. */
export function grid2d(rows: number[][]): NdGrid {
  const shape = [rows.length, rows[0].length];
  const data = new Uint8Array(cellCount(shape));
  let k = 0;
  for (const row of rows) {
    for (const v of row) data[k++] = v;
  }
  return { shape, data };
}

/** Reference-side CLI invocation, independent of the binding's runner. */
export function runCliRef(args: string[]): string {
  return execFileSync(cliPath(), args, { encoding: "utf8", maxBuffer: 64 * 1024 * 1024 });
}

export function makeRefDir(): string {
  return fs.mkdtempSync(path.join(os.tmpdir(), "topoctx-ref-"));
}

export function writeGridFile(dir: string, name: string, grid: NdGrid): string {
  const file = path.join(dir, name);
  fs.writeFileSync(file, encodeBtf(grid));
  return file;
}

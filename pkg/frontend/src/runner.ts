/** Process-level plumbing for shelling out to the toolkit CLI. */

import { execFileSync } from "node:child_process";
import * as fs from "node:fs";
import * as os from "node:os";
import * as path from "node:path";

/** CLI executable, resolved at call time; override with TOPOCTX_CLI. */
export function cliPath(): string {
  return process.env.TOPOCTX_CLI ?? "topoctx";
}

/** A CLI invocation exited non-zero or could not be started. */
export class CliError extends Error {
  readonly exitCode: number | null;
  readonly stderr: string;

  constructor(message: string, exitCode: number | null, stderr: string) {
    super(message);
    this.name = "CliError";
    this.exitCode = exitCode;
    this.stderr = stderr;
  }
}

/** Runs one CLI subcommand to completion and returns its stdout. */
export function runCli(args: string[]): string {
  try {
    return execFileSync(cliPath(), args, {
      encoding: "utf8",
      maxBuffer: 64 * 1024 * 1024,
      stdio: ["ignore", "pipe", "pipe"],
    });
  } catch (err) {
    const e = err as NodeJS.ErrnoException & {
      status?: number | null;
      stderr?: string | Buffer;
    };
    const stderr = e.stderr ? e.stderr.toString() : "";
    const detail = stderr.trim() || e.message;
    throw new CliError(`${cliPath()} ${args[0]} failed: ${detail}`, e.status ?? null, stderr);
  }
}

/**
 * Runs `fn` with a freshly created private scratch directory and removes
 * the directory afterwards, success or failure. Each call gets its own
 * directory, so concurrent callers never share paths.
 */
export function withTempDir<T>(fn: (dir: string) => T): T {
  const dir = fs.mkdtempSync(path.join(os.tmpdir(), "topoctx-bind-"));
  try {
    return fn(dir);
  } finally {
    fs.rmSync(dir, { recursive: true, force: true });
  }
}

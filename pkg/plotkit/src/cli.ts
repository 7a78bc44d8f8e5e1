#!/usr/bin/env node
import { pathToFileURL } from "node:url";
import { parseArgs } from "node:util";

import { EmptyTableError, SchemaError } from "./errors.js";
import { renderAll } from "./figures.js";
import { loadManifest } from "./manifest.js";

const USAGE = "usage: plotkit plot <manifest.json | results-dir> --out DIR";

export interface Io {
  out: (line: string) => void;
  err: (line: string) => void;
}

/**
 * Entry point, separated from process wiring so tests can call it directly.
 * Returns the process exit code. Exit 2 is a usage problem, 1 a data problem.
 */
export function runCli(argv: string[], io: Io): number {
  let parsed;
  try {
    parsed = parseArgs({
      args: argv,
      allowPositionals: true,
      options: { out: { type: "string" } },
    });
  } catch (e) {
    io.err(`plotkit: ${(e as Error).message}`);
    io.err(USAGE);
    return 2;
  }

  const [command, target] = parsed.positionals;
  if (command !== "plot" || !target || !parsed.values.out) {
    io.err(USAGE);
    return 2;
  }

  try {
    const { manifest, dir } = loadManifest(target);
    if (manifest.interrupted) {
      io.err("plotkit: warning: run was interrupted, figures show partial results");
    }
    const written = renderAll(manifest, dir, parsed.values.out);
    for (const path of written) {
      io.out(path);
    }
    io.out(`${written.length} figure(s) written`);
    return 0;
  } catch (e) {
    if (e instanceof SchemaError || e instanceof EmptyTableError) {
      io.err(`plotkit: ${e.message}`);
      return 1;
    }
    throw e;
  }
}

/* node dist/cli.js ... */
const invokedDirectly =
  process.argv[1] !== undefined && import.meta.url === pathToFileURL(process.argv[1]).href;
if (invokedDirectly) {
  process.exitCode = runCli(process.argv.slice(2), {
    out: (l) => process.stdout.write(l + "\n"),
    err: (l) => process.stderr.write(l + "\n"),
  });
}

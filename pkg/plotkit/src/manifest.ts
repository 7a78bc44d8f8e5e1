import { readFileSync, statSync } from "node:fs";
import { dirname, join } from "node:path";

import { SchemaError } from "./errors.js";

/** Manifest schema revisions this renderer understands. */
const SUPPORTED_SCHEMA_VERSIONS = new Set(["1"]);

export interface ManifestOutput {
  kind: string;
  path: string;
  /** Set on array-factor outputs: which filter surface the file holds. */
  surface?: string;
}

/** One impinging source, as recorded by the array-factor experiments. */
export interface SourceMark {
  p: number;
  q: number;
  desired: boolean;
}

export interface Manifest {
  schema_version: string;
  experiment: string;
  seed: number;
  outputs: ManifestOutput[];
  interrupted: boolean;
  /** Present only when the run recorded source positions for its maps. */
  directions?: SourceMark[];
}

/**
 * Load and validate a run manifest.
 *
 * `target` may be the manifest file itself or the results directory that
 * contains one as `manifest.json`. Returns the parsed manifest together with
 * the directory CSV paths are resolved against.
 */
export function loadManifest(target: string): { manifest: Manifest; dir: string } {
  let path = target;
  try {
    if (statSync(target).isDirectory()) {
      path = join(target, "manifest.json");
    }
  } catch {
    throw new SchemaError(`manifest not found: ${target}`);
  }

  let raw: unknown;
  try {
    raw = JSON.parse(readFileSync(path, "utf8"));
  } catch (e) {
    throw new SchemaError(`cannot read manifest ${path}: ${(e as Error).message}`);
  }
  const m = raw as Record<string, unknown>;

  const version = m["schema_version"];
  if (typeof version !== "string" || !SUPPORTED_SCHEMA_VERSIONS.has(version)) {
    throw new SchemaError(
      `unsupported manifest schema_version ${JSON.stringify(version)} in ${path}`
    );
  }
  if (!Array.isArray(m["outputs"]) || m["outputs"].length === 0) {
    throw new SchemaError(`manifest ${path} lists no outputs`);
  }
  for (const entry of m["outputs"] as Record<string, unknown>[]) {
    if (typeof entry["kind"] !== "string" || typeof entry["path"] !== "string") {
      throw new SchemaError(`manifest ${path} has an output without kind/path`);
    }
  }
  if (m["directions"] !== undefined) {
    if (!Array.isArray(m["directions"])) {
      throw new SchemaError(`manifest ${path}: directions must be a list`);
    }
    for (const d of m["directions"] as Record<string, unknown>[]) {
      if (
        typeof d["p"] !== "number" ||
        typeof d["q"] !== "number" ||
        typeof d["desired"] !== "boolean"
      ) {
        throw new SchemaError(`manifest ${path}: malformed directions entry`);
      }
    }
  }

  return { manifest: m as unknown as Manifest, dir: dirname(path) };
}

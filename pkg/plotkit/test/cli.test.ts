import { spawnSync } from "node:child_process";
import { existsSync, mkdtempSync, readFileSync, writeFileSync } from "node:fs";
import { tmpdir } from "node:os";
import { join } from "node:path";
import { fileURLToPath } from "node:url";

import { describe, expect, it } from "vitest";

import { runCli, type Io } from "../src/index.js";

const FIXTURES = fileURLToPath(new URL("./fixtures", import.meta.url));
const CLI = fileURLToPath(new URL("../dist/cli.js", import.meta.url));

function capture(): { io: Io; out: string[]; err: string[] } {
  const out: string[] = [];
  const err: string[] = [];
  return { io: { out: (l) => out.push(l), err: (l) => err.push(l) }, out, err };
}

function freshDir(): string {
  return mkdtempSync(join(tmpdir(), "plotkit-cli-"));
}

describe("runCli", () => {
  it("renders a results directory and lists what it wrote", () => {
    const { io, out, err } = capture();
    const dest = freshDir();
    const rc = runCli(["plot", join(FIXTURES, "ber_vs_snr"), "--out", dest], io);
    expect(rc).toBe(0);
    expect(err).toEqual([]);
    expect(out[out.length - 1]).toBe("1 figure(s) written");
    expect(existsSync(join(dest, "ber_vs_snr.svg"))).toBe(true);
  });

  it("accepts the manifest file itself as the target", () => {
    const { io } = capture();
    const dest = freshDir();
    const rc = runCli(
      ["plot", join(FIXTURES, "flops_vs_size", "manifest.json"), "--out", dest],
      io
    );
    expect(rc).toBe(0);
    expect(existsSync(join(dest, "flops_vs_size.svg"))).toBe(true);
  });

  it("prints usage on missing arguments", () => {
    const { io, err } = capture();
    expect(runCli([], io)).toBe(2);
    expect(runCli(["plot", "x"], io)).toBe(2);
    expect(runCli(["render", "x", "--out", "y"], io)).toBe(2);
    expect(err.some((l) => l.startsWith("usage:"))).toBe(true);
  });

  it("fails with a message when the manifest is missing", () => {
    const { io, err } = capture();
    const rc = runCli(["plot", "/no/such/run", "--out", freshDir()], io);
    expect(rc).toBe(1);
    expect(err.join("\n")).toMatch(/manifest not found/);
  });

  it("rejects a manifest with a schema version it does not know", () => {
    const dir = freshDir();
    const manifest = JSON.parse(
      readFileSync(join(FIXTURES, "ber_vs_snr", "manifest.json"), "utf8")
    );
    manifest.schema_version = "99";
    writeFileSync(join(dir, "manifest.json"), JSON.stringify(manifest));
    const { io, err } = capture();
    expect(runCli(["plot", dir, "--out", freshDir()], io)).toBe(1);
    expect(err.join("\n")).toMatch(/schema_version "99"/);
  });

  it("warns about interrupted runs but still renders", () => {
    const dir = freshDir();
    const src = join(FIXTURES, "cond_vs_rho");
    const manifest = JSON.parse(readFileSync(join(src, "manifest.json"), "utf8"));
    manifest.interrupted = true;
    writeFileSync(join(dir, "manifest.json"), JSON.stringify(manifest));
    writeFileSync(
      join(dir, "cond_vs_rho.csv"),
      readFileSync(join(src, "cond_vs_rho.csv"), "utf8")
    );
    const { io, err } = capture();
    const dest = freshDir();
    expect(runCli(["plot", dir, "--out", dest], io)).toBe(0);
    expect(err.join("\n")).toMatch(/interrupted/);
    expect(existsSync(join(dest, "cond_vs_rho.svg"))).toBe(true);
  });
});

describe("built executable", () => {
  it("runs end to end out of dist/", () => {
    const dest = freshDir();
    const res = spawnSync(
      process.execPath,
      [CLI, "plot", join(FIXTURES, "array_factor_maps"), "--out", dest],
      { encoding: "utf8" }
    );
    expect(res.status).toBe(0);
    expect(res.stdout).toContain("5 figure(s) written");
    expect(existsSync(join(dest, "af_kmmse.svg"))).toBe(true);
  });

  it("exits 2 and shows usage when misused", () => {
    const res = spawnSync(process.execPath, [CLI, "plot"], { encoding: "utf8" });
    expect(res.status).toBe(2);
    expect(res.stderr).toContain("usage:");
  });
});

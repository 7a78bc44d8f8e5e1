"""Monte Carlo experiment runner.

Reproducibility contract: every trial derives its random stream from
``SeedSequence([seed, trial_index])`` only, so a TrialRecord is a pure
function of (config, trial index) regardless of execution order or worker
count. Within a BER trial the directions, symbols and unit-power noise are
drawn once and the noise is scaled per SNR point; methods and SNR points
therefore see paired data, which keeps method comparisons and the
BER-vs-SNR interpolation low-variance.

Outputs: one CSV per experiment (schemas below, version 1) plus
``manifest.json`` echoing the config, seed and output list. CSV bodies are
byte-identical for identical (config, seed); the manifest additionally
carries a timestamp.

CSV schemas (version 1):

* ber_vs_snr / ber_vs_rho: ``snr_db,method,mean_ber,stderr_ber,trials,failures``
* cond_vs_rho:             ``snr_db,rho,axis,cond``
* flops_vs_size:           ``n_h,n_v,method,flops``
* array_factor_maps:       ``p,q,af_db`` (one file per surface)

Failed designs (singular statistics) leave that method's BER out of the
mean but are counted in the ``failures`` column.
"""

from __future__ import annotations

import csv
import json
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from datetime import datetime, timezone
from itertools import repeat
from pathlib import Path

import numpy as np

from .. import __version__
from ..array_model import DirectionCosines, UraGeometry, build_manifolds
from ..beamformers import (
    AnalyticStatsProvider,
    DesignFailure,
    SampleStatsProvider,
    apply,
    kmmse,
    kmmse_output,
    mmse_direct,
    mmse_lemma,
    random_separable_init,
    tmmse,
)
from ..kron_algebra import SingularMatrixError
from ..metrics import FlopsModel, array_factor, ber, condition_sweep, flops, subarray_factor
from ..signal_model import (
    Scenario,
    SnapshotBlock,
    analytic_full_stats,
    analytic_subarray_stats,
    circular_noise,
    draw_directions,
    qpsk_demodulate,
    qpsk_symbols,
    sample_full_stats,
    sample_subarray_stats,
)
from .config import ExperimentConfig

__all__ = ["TrialRecord", "run", "run_ber_trial", "aggregate_ber"]

SCHEMA_VERSION = "1"

# Fixed tag mixed into the seed stream for the TMMSE random start.
_TMMSE_INIT_TAG = 0x7713


@dataclass
class TrialRecord:
    """Per-(trial, SNR point) outcome; reproducible from (config, trial)."""

    trial: int
    snr_db: float
    directions: tuple[tuple[float, float], ...]
    ber: dict[str, float | None] = field(default_factory=dict)
    iterations: dict[str, int] = field(default_factory=dict)
    failures: dict[str, str] = field(default_factory=dict)


def _method_labels(cfg: ExperimentConfig) -> list[str]:
    if cfg.experiment == "ber_vs_rho":
        return [f"kmmse(rho={rho:g})" for rho in cfg.rho]
    return list(cfg.methods)


def _trial_directions(cfg: ExperimentConfig, rng) -> list[DirectionCosines]:
    if cfg.directions is not None:
        return [DirectionCosines(p=float(p), q=float(q)) for p, q in cfg.directions]
    return draw_directions(cfg.r, rng)


def run_ber_trial(cfg: ExperimentConfig, trial: int) -> list[TrialRecord]:
    """Design, filter and decode every method at every SNR point once."""
    rng = np.random.default_rng(np.random.SeedSequence([cfg.seed, trial]))
    geometry = UraGeometry(cfg.n_h, cfg.n_v)
    directions = _trial_directions(cfg, rng)
    ms = build_manifolds(geometry, directions)
    s = qpsk_symbols(cfg.r, cfg.k, 1.0, rng)
    clean = ms.a_full @ s
    noise_unit = circular_noise(clean.shape, 1.0, rng)
    init = random_separable_init(
        geometry, np.random.SeedSequence([cfg.seed, trial, _TMMSE_INIT_TAG])
    )
    ref_bits = qpsk_demodulate(s[cfg.desired_index])
    labels = _method_labels(cfg)
    dir_pairs = tuple((d.p, d.q) for d in directions)

    records = []
    for snr_db in cfg.snr_grid_db:
        sigma_b2 = 10.0 ** (-snr_db / 10.0)
        blk = SnapshotBlock(
            geometry=geometry, x=clean + math.sqrt(sigma_b2) * noise_unit, s=s
        )
        sc = Scenario(
            manifolds=ms, desired_index=cfg.desired_index, sigma_s2=1.0, sigma_b2=sigma_b2
        )
        rec = TrialRecord(trial=trial, snr_db=float(snr_db), directions=dir_pairs)
        for label in labels:
            try:
                y, n_iter = _design_and_filter(cfg, label, sc, blk, init)
                rec.ber[label] = ber(qpsk_demodulate(y), ref_bits)
                if n_iter is not None:
                    rec.iterations[label] = n_iter
            except (DesignFailure, SingularMatrixError) as e:
                rec.ber[label] = None
                rec.failures[label] = str(e) or type(e).__name__
        records.append(rec)
    return records


def _design_and_filter(cfg, label, sc, blk, init):
    """Returns (output stream, tmmse iteration count or None)."""
    sample = cfg.stats_mode == "sample"
    d = cfg.desired_index
    if label.startswith("kmmse"):
        rho = cfg.rho[0]
        if "(rho=" in label:
            rho = float(label.split("(rho=", 1)[1].rstrip(")"))
        if sample:
            st_h = sample_subarray_stats(blk, "h", d)
            st_v = sample_subarray_stats(blk, "v", d)
        else:
            st_h = analytic_subarray_stats(sc, "h")
            st_v = analytic_subarray_stats(sc, "v")
        filt = kmmse(st_h, st_v, rho)
        return kmmse_output(filt, blk, sc.sigma_s2), None
    if label == "mmse":
        stats = sample_full_stats(blk, d) if sample else analytic_full_stats(sc)
        return apply(mmse_direct(stats), blk), None
    if label == "mmse_lemma":
        return apply(mmse_lemma(sc), blk), None
    if label == "tmmse":
        provider = SampleStatsProvider(blk, d) if sample else AnalyticStatsProvider(sc)
        report = tmmse(provider, init=init, eps=cfg.eps, max_iter=cfg.max_iter)
        return apply(report.filter, blk), report.iterations
    raise ValueError(f"unknown method label {label!r}")


def aggregate_ber(cfg: ExperimentConfig, records: list[TrialRecord]) -> list[dict]:
    """Per-(SNR, method) mean/stderr over non-failed trials."""
    labels = _method_labels(cfg)
    rows = []
    for snr_db in cfg.snr_grid_db:
        at_snr = [r for r in records if r.snr_db == float(snr_db)]
        for label in labels:
            vals = [r.ber[label] for r in at_snr if r.ber.get(label) is not None]
            failures = sum(1 for r in at_snr if label in r.failures)
            mean = float(np.mean(vals)) if vals else None
            stderr = (
                float(np.std(vals, ddof=1) / math.sqrt(len(vals))) if len(vals) > 1 else 0.0
            )
            rows.append(
                {
                    "snr_db": float(snr_db),
                    "method": label,
                    "mean_ber": mean,
                    "stderr_ber": stderr if vals else None,
                    "trials": len(at_snr),
                    "failures": failures,
                }
            )
    return rows


def _run_ber(cfg: ExperimentConfig):
    """Run all trials (optionally in parallel); returns (records, interrupted)."""
    records: list[TrialRecord] = []
    interrupted = False
    try:
        if cfg.workers > 1:
            with ProcessPoolExecutor(max_workers=cfg.workers) as ex:
                for recs in ex.map(run_ber_trial, repeat(cfg), range(cfg.trials)):
                    records.extend(recs)
        else:
            for trial in range(cfg.trials):
                records.extend(run_ber_trial(cfg, trial))
    except KeyboardInterrupt:
        interrupted = True
    return records, interrupted


def _run_cond(cfg: ExperimentConfig):
    """Mean condition number per (snr, rho, axis); returns (rows, interrupted)."""
    sums: dict[tuple, float] = {}
    counts: dict[tuple, int] = {}
    interrupted = False
    try:
        for trial in range(cfg.trials):
            rng = np.random.default_rng(np.random.SeedSequence([cfg.seed, trial]))
            directions = _trial_directions(cfg, rng)
            ms = build_manifolds(UraGeometry(cfg.n_h, cfg.n_v), directions)
            for snr_db in cfg.snr_grid_db:
                sc = Scenario(
                    manifolds=ms,
                    desired_index=cfg.desired_index,
                    sigma_s2=1.0,
                    sigma_b2=10.0 ** (-snr_db / 10.0),
                )
                for axis in ("h", "v"):
                    for rho, cond in condition_sweep(sc, axis, cfg.rho):
                        key = (float(snr_db), rho, axis)
                        sums[key] = sums.get(key, 0.0) + cond
                        counts[key] = counts.get(key, 0) + 1
    except KeyboardInterrupt:
        interrupted = True
    rows = []
    for snr_db in cfg.snr_grid_db:
        for rho in cfg.rho:
            for axis in ("h", "v"):
                key = (float(snr_db), float(rho), axis)
                if key in sums:
                    rows.append(
                        {
                            "snr_db": key[0],
                            "rho": key[1],
                            "axis": axis,
                            "cond": sums[key] / counts[key],
                        }
                    )
    return rows, interrupted


_FLOPS_LABELS = {"mmse": "mmse_sample", "mmse_lemma": "mmse_lemma",
                 "tmmse": "tmmse", "kmmse": "kmmse"}


def _run_flops(cfg: ExperimentConfig):
    rows = []
    for n in cfg.size_grid:
        geometry = UraGeometry(n, n)
        for method in cfg.methods:
            model_name = _FLOPS_LABELS[method]
            fm = FlopsModel(
                method=model_name,
                geometry=geometry,
                r=cfg.r,
                k=cfg.k,
                iterations=cfg.tmmse_iterations if model_name == "tmmse" else 1,
            )
            rows.append({"n_h": n, "n_v": n, "method": model_name, "flops": flops(fm)})
    return rows


def _run_array_factor(cfg: ExperimentConfig):
    """Five pattern surfaces for one fixed scenario; returns (surfaces, directions)."""
    rng = np.random.default_rng(np.random.SeedSequence([cfg.seed, 0]))
    geometry = UraGeometry(cfg.n_h, cfg.n_v)
    directions = _trial_directions(cfg, rng)
    ms = build_manifolds(geometry, directions)
    snr_db = cfg.snr_grid_db[0]
    sc = Scenario(
        manifolds=ms,
        desired_index=cfg.desired_index,
        sigma_s2=1.0,
        sigma_b2=10.0 ** (-snr_db / 10.0),
    )
    s = qpsk_symbols(cfg.r, cfg.k, 1.0, rng)
    x = ms.a_full @ s + circular_noise((geometry.n, cfg.k), sc.sigma_b2, rng)
    blk = SnapshotBlock(geometry=geometry, x=x, s=s)
    sample = cfg.stats_mode == "sample"
    d = cfg.desired_index

    w_mmse = mmse_direct(sample_full_stats(blk, d) if sample else analytic_full_stats(sc))
    init = random_separable_init(
        geometry, np.random.SeedSequence([cfg.seed, 0, _TMMSE_INIT_TAG])
    )
    provider = SampleStatsProvider(blk, d) if sample else AnalyticStatsProvider(sc)
    filt_t = tmmse(provider, init=init, eps=cfg.eps, max_iter=cfg.max_iter).filter
    if sample:
        filt_k = kmmse(
            sample_subarray_stats(blk, "h", d), sample_subarray_stats(blk, "v", d), cfg.rho[0]
        )
    else:
        filt_k = kmmse(
            analytic_subarray_stats(sc, "h"), analytic_subarray_stats(sc, "v"), cfg.rho[0]
        )

    grid = np.linspace(-1.0, 1.0, cfg.af_points)
    surfaces = {
        "af_mmse": array_factor(w_mmse, geometry, grid, grid).af,
        "af_tmmse": array_factor(filt_t, geometry, grid, grid).af,
        "af_kmmse": array_factor(filt_k, geometry, grid, grid).af,
        # Single-axis patterns written as full surfaces, constant along the
        # inactive coordinate, to keep the common p,q,af_db schema.
        "af_kmmse_hcut": np.tile(subarray_factor(filt_k.w_h, grid)[:, None], (1, grid.size)),
        "af_kmmse_vcut": np.tile(subarray_factor(filt_k.w_v, grid)[None, :], (grid.size, 1)),
    }
    return grid, surfaces, directions


def _fmt(v) -> str:
    if v is None:
        return ""
    if isinstance(v, float):
        return format(v, ".10g")
    return str(v)


def _write_csv(path: Path, header: list[str], rows: list[dict]) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([_fmt(row[h]) for h in header])


def _af_db(af: np.ndarray) -> np.ndarray:
    return 10.0 * np.log10(np.maximum(af, 1e-30))


def run(cfg: ExperimentConfig, out_dir) -> Path:
    """Execute the configured experiment; returns the manifest path."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    outputs: list[dict] = []
    extras: dict = {}
    interrupted = False

    if cfg.experiment in ("ber_vs_snr", "ber_vs_rho"):
        records, interrupted = _run_ber(cfg)
        rows = aggregate_ber(cfg, records)
        path = out / f"{cfg.experiment}.csv"
        _write_csv(
            path, ["snr_db", "method", "mean_ber", "stderr_ber", "trials", "failures"], rows
        )
        outputs.append({"kind": cfg.experiment, "path": path.name})
        iter_counts = [
            rec.iterations["tmmse"] for rec in records if "tmmse" in rec.iterations
        ]
        if iter_counts:
            extras["tmmse_mean_iterations"] = float(np.mean(iter_counts))
    elif cfg.experiment == "cond_vs_rho":
        rows, interrupted = _run_cond(cfg)
        path = out / "cond_vs_rho.csv"
        _write_csv(path, ["snr_db", "rho", "axis", "cond"], rows)
        outputs.append({"kind": "cond_vs_rho", "path": path.name})
    elif cfg.experiment == "flops_vs_size":
        rows = _run_flops(cfg)
        path = out / "flops_vs_size.csv"
        _write_csv(path, ["n_h", "n_v", "method", "flops"], rows)
        outputs.append({"kind": "flops_vs_size", "path": path.name})
    elif cfg.experiment == "array_factor_maps":
        grid, surfaces, directions = _run_array_factor(cfg)
        for name, af in surfaces.items():
            db = _af_db(af)
            rows = [
                {"p": float(grid[i]), "q": float(grid[j]), "af_db": float(db[i, j])}
                for i in range(grid.size)
                for j in range(grid.size)
            ]
            path = out / f"{name}.csv"
            _write_csv(path, ["p", "q", "af_db"], rows)
            outputs.append({"kind": "array_factor", "path": path.name, "surface": name})
        extras["directions"] = [
            {"p": d.p, "q": d.q, "desired": i == cfg.desired_index}
            for i, d in enumerate(directions)
        ]
    else:  # unreachable after config validation
        raise ValueError(f"unknown experiment {cfg.experiment!r}")

    manifest = {
        "schema_version": SCHEMA_VERSION,
        "library_version": __version__,
        "experiment": cfg.experiment,
        "seed": cfg.seed,
        "config": asdict(cfg),
        "outputs": outputs,
        "interrupted": interrupted,
        "created_utc": datetime.now(timezone.utc).isoformat(),
        **extras,
    }
    manifest_path = out / "manifest.json"
    with open(manifest_path, "w", encoding="utf-8") as fh:
        json.dump(manifest, fh, indent=2)
        fh.write("\n")
    return manifest_path

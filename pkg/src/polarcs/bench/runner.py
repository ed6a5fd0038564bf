"""Monte Carlo trials, sweeps and CSV output."""
from __future__ import annotations

import csv
import logging
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import astuple, dataclass, fields
from pathlib import Path

import numpy as np

from ..baselines import MusicConfig, l1synth_music
from ..cvx import SolverOptions
from ..frame import build_frame
from ..metrics import hungarian_match, signal_error
from ..pursuit import PursuitConfig, bisp, bomp, cbp
from ..sigmodel import gen_signal, measure
from .config import ExperimentConfig, dump_config

log = logging.getLogger(__name__)

RAW_COLUMNS = ("kappa", "snr_db", "trial", "algorithm", "seed",
               "mean_freq_error_bins", "signal_error", "converged")
TIMING_COLUMNS = ("kappa", "snr_db", "trial", "algorithm", "runtime_seconds")
SUMMARY_COLUMNS = ("kappa", "snr_db", "algorithm", "n", "n_failed",
                   "mean_freq_error_bins", "sem_freq_error_bins",
                   "signal_error", "sem_signal_error", "converged_fraction")


@dataclass(frozen=True)
class TrialRecord:
    kappa: float
    snr_db: float
    trial: int
    algorithm: str
    seed: int
    mean_freq_error_bins: float
    signal_error: float
    converged: bool
    runtime_seconds: float


def trial_seed(cfg: ExperimentConfig, point: tuple[int, int], trial: int) -> int:
    """64-bit seed of one trial, derived from the base seed and its counters."""
    ss = np.random.SeedSequence(cfg.seed, spawn_key=(point[0], point[1], trial))
    return int(ss.generate_state(1, np.uint64)[0])


def _solver_options(cfg: ExperimentConfig, epsilon: float) -> SolverOptions:
    return SolverOptions(
        mode=cfg.solver_mode,
        epsilon=epsilon,
        max_iterations=cfg.solver_max_iterations,
        tolerance=cfg.solver_tolerance,
        feasibility_tol=cfg.solver_feasibility_tol,
        phase_rounds=cfg.solver_phase_rounds,
        amplitudes=cfg.solver_amplitudes,
    )


def run_algorithm(name, cfg: ExperimentConfig, frame, mm):
    """Run one algorithm on one measurement set; returns a LineEstimate."""
    opts = _solver_options(cfg, mm.epsilon)
    if name == "l1synth_music":
        music = MusicConfig(K=cfg.K, subvector_length=cfg.music_subvector_length,
                            grid_refinement=cfg.music_grid_refinement)
        return l1synth_music(mm.y, mm.A, frame, cfg.K, mm.epsilon, opts, music)
    pcfg = PursuitConfig(K=cfg.K, eta=cfg.eta, solver=opts)
    return {"bomp": bomp, "cbp": cbp, "bisp": bisp}[name](mm.y, mm.A, frame, pcfg)


def run_trial(cfg: ExperimentConfig, point: tuple[int, int], trial: int) -> list[TrialRecord]:
    """All configured algorithms on one shared draw of signal, operator and noise.

    ``point`` holds the indices into ``cfg.kappa_list`` and ``cfg.snr_db_list``.
    Algorithm failures are recorded (``converged=False``, NaN errors) rather
    than raised.
    """
    kappa = cfg.kappa_list[point[0]]
    snr = cfg.snr_db_list[point[1]]
    seed = trial_seed(cfg, point, trial)
    rng = np.random.Generator(np.random.Philox(seed))
    frame = build_frame(cfg.N, cfg.c)
    truth = gen_signal(cfg.N, cfg.K, cfg.min_separation, cfg.amplitude_mode, rng,
                       grid_size=frame.P if cfg.on_grid else None)
    mm = measure(truth, cfg.measurements(kappa), cfg.matrix_kind, snr, rng)

    records = []
    for name in cfg.algorithms:
        t0 = time.perf_counter()
        try:
            est = run_algorithm(name, cfg, frame, mm)
        except Exception as exc:  # recorded, never aborts the sweep
            log.warning("%s failed on trial %d (kappa=%g, snr=%g): %s", name, trial, kappa, snr, exc)
            records.append(TrialRecord(kappa, snr, trial, name, seed, math.nan, math.nan,
                                       False, time.perf_counter() - t0))
            continue
        elapsed = time.perf_counter() - t0
        if est.frequencies.size:
            ferr = hungarian_match(truth.frequencies, est.frequencies, cfg.N).mean_error
        else:
            ferr = math.nan
        records.append(TrialRecord(
            kappa, snr, trial, name, seed, float(ferr),
            signal_error(truth.signal, est.signal), bool(est.converged), elapsed,
        ))
    return records


def _sort_key(cfg):
    order = {a: i for i, a in enumerate(cfg.algorithms)}
    kap = {k: i for i, k in enumerate(cfg.kappa_list)}
    snr = {s: i for i, s in enumerate(cfg.snr_db_list)}
    return lambda r: (kap[r.kappa], snr[r.snr_db], r.trial, order[r.algorithm])


def _trial_job(args):
    return run_trial(*args)


def run_sweep(cfg: ExperimentConfig) -> list[TrialRecord]:
    """Full factorial over the sweep lists and trials, canonically sorted."""
    cfg.validate()
    if not cfg.algorithms:
        log.warning("no algorithms selected; the result table is empty")
        return []
    jobs = [
        (cfg, (i, j), t)
        for i in range(len(cfg.kappa_list))
        for j in range(len(cfg.snr_db_list))
        for t in range(cfg.trials)
    ]
    if cfg.workers > 1:
        with ProcessPoolExecutor(cfg.workers) as pool:
            chunks = list(pool.map(_trial_job, jobs))
    else:
        chunks = [_trial_job(j) for j in jobs]
    records = [r for chunk in chunks for r in chunk]
    return sorted(records, key=_sort_key(cfg))


def _sem(v):
    return float(np.std(v, ddof=1) / np.sqrt(v.size)) if v.size > 1 else math.nan


def summarize(records, cfg: ExperimentConfig) -> list[dict]:
    """Mean and standard error per (kappa, snr, algorithm); failed trials excluded."""
    groups = {}
    for r in records:
        groups.setdefault((r.kappa, r.snr_db, r.algorithm), []).append(r)
    rows = []
    for (kappa, snr, alg), recs in sorted(groups.items(), key=lambda kv: _sort_key(cfg)(kv[1][0])):
        ferr = np.array([r.mean_freq_error_bins for r in recs])
        serr = np.array([r.signal_error for r in recs])
        ok_f, ok_s = ferr[~np.isnan(ferr)], serr[~np.isnan(serr)]
        rows.append({
            "kappa": kappa,
            "snr_db": snr,
            "algorithm": alg,
            "n": len(recs),
            "n_failed": int(np.isnan(ferr).sum()),
            "mean_freq_error_bins": float(ok_f.mean()) if ok_f.size else math.nan,
            "sem_freq_error_bins": _sem(ok_f),
            "signal_error": float(ok_s.mean()) if ok_s.size else math.nan,
            "sem_signal_error": _sem(ok_s),
            "converged_fraction": float(np.mean([r.converged for r in recs])),
        })
    return rows


def _cell(v) -> str:
    if isinstance(v, bool):
        return "1" if v else "0"
    if isinstance(v, float):
        return repr(v)
    return str(v)


def _write(path: Path, columns, rows):
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(columns)
        for row in rows:
            w.writerow([_cell(row[c]) for c in columns])


def write_results(records, cfg: ExperimentConfig, out_dir) -> dict:
    """Write ``raw.csv``, ``summary.csv``, ``timing.csv`` and ``config.resolved``.

    Wall-clock time only goes to ``timing.csv`` so the other files are
    byte-identical across runs of the same config and seed.
    """
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    dicts = [dict(zip((f.name for f in fields(TrialRecord)), astuple(r))) for r in records]
    paths = {name: out / name for name in ("raw.csv", "summary.csv", "timing.csv", "config.resolved")}
    _write(paths["raw.csv"], RAW_COLUMNS, dicts)
    _write(paths["timing.csv"], TIMING_COLUMNS, dicts)
    _write(paths["summary.csv"], SUMMARY_COLUMNS, summarize(records, cfg))
    paths["config.resolved"].write_text(dump_config(cfg), encoding="utf-8")
    return paths

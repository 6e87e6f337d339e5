"""Monte Carlo experiment runner producing reproducible run artifacts.

Each experiment kind expands into independent (grid point, realization)
tasks. Tasks are pure functions of the config and their realization index,
so results do not depend on the worker count or scheduling order.

Output directory layout::

    manifest.json         config echo, seeds, version, failures, timestamps
    table.csv             per-grid-point mean/std/min/max of every metric
    realizations.jsonl    one record per task (sorted), failures included
    plot_<kind>.csv       (--emit-plot-data) two/three-column figure data
    trajectory_*.csv      sample trajectories, plus sweep_plan_*.json sidecars
"""

from __future__ import annotations

import datetime
import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import __version__
from .adiabatic import make_sweep_plan, simulate_adiabatic
from .config import SEED_ENV, ExperimentConfig
from .disorder import DisorderSpec, realization_record, sample_realization
from .errors import SpinXferError
from .free import free_transfer_time, max_fidelity
from .io import write_csv, write_json, write_jsonl, write_trajectory
from .metrics import (
    average_fidelity,
    average_fidelity_from_amplitude,
    distinguishability,
    entanglement_of_formation,
    time_averaged_leakage,
)
from .resonance import find_anticrossing

log = logging.getLogger(__name__)

FAILURE_LIMIT = 0.10

# metric columns aggregated per kind, in output order
METRICS = {
    "free-sweep-n": ["delta_b_star", "v", "tau_f", "f_max", "t_max", "localization_defect",
                     "eps_avg"],
    "compensation-scan": ["f_max"],
    "adiabatic-run": ["v", "tau_f", "tau_a", "alpha", "final_fidelity", "settled_fidelity",
                      "terminal_occupation", "max_norm_drift"],
    "leakage-vs-field": ["v", "tau_f", "eps_avg", "eps_max"],
    "monte-carlo-fidelity": ["delta_b_star", "v", "tau_f", "f_max", "f_avg", "f_avg_bloch",
                             "entanglement", "localization_defect", "eps_avg", "eps_max",
                             "d_powerful_max"],
}
GRID_KEYS = {
    "free-sweep-n": ["n", "b_field"],
    "compensation-scan": ["n", "b_field", "deviation"],
    "adiabatic-run": ["n", "b_field", "beta", "f_target", "alpha_scale"],
    "leakage-vs-field": ["n", "b_field"],
    "monte-carlo-fidelity": ["n", "b_field"],
}
PLOT_COLUMNS = {
    "free-sweep-n": ["n", "tau_f_mean", "f_max_mean"],
    "compensation-scan": ["n", "deviation", "f_max_mean"],
    "leakage-vs-field": ["n", "b_field", "eps_avg_mean"],
    "monte-carlo-fidelity": ["n", "f_max_mean", "eps_avg_mean"],
}


class RunFailed(SpinXferError):
    pass


@dataclass
class RunArtifact:
    out_dir: Path
    manifest: dict
    table_header: list
    table_rows: list
    records: list
    files: list = field(default_factory=list)

    @property
    def failures(self) -> int:
        return self.manifest["failures"]

    def column(self, name: str) -> np.ndarray:
        i = self.table_header.index(name)
        return np.array([row[i] for row in self.table_rows], dtype=float)


@dataclass(frozen=True)
class Task:
    kind: str
    index: int
    n: int
    b_field: float
    extra: tuple = ()


def _disorder(cfg: ExperimentConfig, n: int, b_field: float) -> DisorderSpec:
    return DisorderSpec.from_variances(n, cfg.sigma_j2, cfg.sigma_b2,
                                       mean_terminal_field=b_field, master_seed=cfg.seed)


def _compensate(cfg, spec, index):
    chain = sample_realization(spec, index)
    res = find_anticrossing(chain, spec.mean_terminal_field, sigma_b=spec.sigma_b)
    return chain, res


def _free_run(cfg, chain, delta_b, tau_f):
    dt = tau_f / cfg.samples_per_transfer
    return max_fidelity(chain, delta_b, cfg.horizon_factor * tau_f, dt)


def _task_free_sweep(cfg, task):
    spec = _disorder(cfg, task.n, task.b_field)
    chain, res = _compensate(cfg, spec, task.index)
    tau_f = free_transfer_time(res.half_splitting)
    f_max, t_max, traj = _free_run(cfg, chain, res.delta_b_star, tau_f)
    return {
        "delta_b_star": res.delta_b_star, "v": res.half_splitting, "tau_f": tau_f,
        "f_max": f_max, "t_max": t_max, "localization_defect": res.localization_defect,
        "eps_avg": time_averaged_leakage(traj, tau_f),
    }


def _task_compensation(cfg, task):
    spec = _disorder(cfg, task.n, task.b_field)
    chain, res = _compensate(cfg, spec, task.index)
    tau_f = free_transfer_time(res.half_splitting)
    rows = []
    for d in cfg.deviations:
        f_max, t_max, _ = _free_run(cfg, chain, res.delta_b_star + d, tau_f)
        rows.append({"deviation": d, "f_max": f_max, "t_max": t_max})
    return {"delta_b_star": res.delta_b_star, "v": res.half_splitting, "tau_f": tau_f,
            "scan": rows}


def _task_leakage(cfg, task):
    spec = _disorder(cfg, task.n, task.b_field)
    chain, res = _compensate(cfg, spec, task.index)
    tau_f = free_transfer_time(res.half_splitting)
    _, _, traj = _free_run(cfg, chain, res.delta_b_star, tau_f)
    keep = traj.times <= tau_f
    return {"v": res.half_splitting, "tau_f": tau_f,
            "eps_avg": time_averaged_leakage(traj, tau_f),
            "eps_max": float(np.max(traj.leakage[keep]))}


def _task_monte_carlo(cfg, task):
    spec = _disorder(cfg, task.n, task.b_field)
    chain, res = _compensate(cfg, spec, task.index)
    tau_f = free_transfer_time(res.half_splitting)
    f_max, t_max, traj = _free_run(cfg, chain, res.delta_b_star, tau_f)
    keep = traj.times <= tau_f
    eps_max = float(np.max(traj.leakage[keep]))
    out = {
        "delta_b_star": res.delta_b_star, "v": res.half_splitting, "tau_f": tau_f,
        "f_max": f_max, "t_max": t_max,
        "f_avg": average_fidelity(f_max),
        "f_avg_bloch": average_fidelity_from_amplitude(math.sqrt(f_max)),
        "entanglement": entanglement_of_formation(f_max),
        "localization_defect": res.localization_defect,
        "eps_avg": time_averaged_leakage(traj, tau_f),
        "eps_max": eps_max,
        # theta = pi/2 maximizes D for fixed a
        "d_powerful_max": distinguishability(eps_max, math.pi / 2),
    }
    if task.index == 0:
        out["_trajectory"] = traj
    return out


def _task_adiabatic(cfg, task):
    spec = _disorder(cfg, task.n, task.b_field)
    chain, res = _compensate(cfg, spec, task.index)
    v = res.half_splitting
    tau_f = free_transfer_time(v)
    plan = make_sweep_plan(v, cfg.f_target, cfg.beta, cfg.alpha_scale, res.delta_b_star)
    run = simulate_adiabatic(chain, plan, tol=cfg.tol, settle=cfg.settle * tau_f,
                             sweep_site=cfg.sweep_site)
    return {
        "v": v, "tau_f": tau_f, "tau_a": plan.duration, "alpha": plan.alpha,
        "final_fidelity": run.final_fidelity, "settled_fidelity": run.settled_fidelity,
        "terminal_occupation": run.terminal_occupation, "max_norm_drift": run.max_norm_drift,
        "_trajectory": run.trajectory, "_plan": plan.to_dict(),
    }


HANDLERS = {
    "free-sweep-n": _task_free_sweep,
    "compensation-scan": _task_compensation,
    "adiabatic-run": _task_adiabatic,
    "leakage-vs-field": _task_leakage,
    "monte-carlo-fidelity": _task_monte_carlo,
}


def _run_task(args):
    cfg, task = args
    base = {"index": task.index, "n": task.n, "b_field": task.b_field}
    spec = _disorder(cfg, task.n, task.b_field)
    base["realization"] = realization_record(spec, task.index,
                                             sample_realization(spec, task.index))
    try:
        base.update(HANDLERS[cfg.kind](cfg, task))
    except SpinXferError as exc:
        base["error"] = f"{type(exc).__name__}: {exc}"
    return base


def expand_tasks(cfg: ExperimentConfig) -> list[Task]:
    b_grid = cfg.b_field
    return [Task(cfg.kind, i, n, b) for n in cfg.n for b in b_grid
            for i in range(cfg.realizations)]


def _stats(values) -> list[float]:
    if not values:
        return [float("nan")] * 4
    a = np.asarray(values, dtype=float)
    return [float(a.mean()), float(a.std()), float(a.min()), float(a.max())]


def _grid_rows(cfg, records):
    """Flatten task records into (grid key tuple, metrics dict or None) pairs."""
    for rec in records:
        base = {"n": rec["n"], "b_field": rec["b_field"]}
        if cfg.kind == "compensation-scan":
            if "error" in rec:
                for d in cfg.deviations:
                    yield {**base, "deviation": d}, None
            else:
                for row in rec["scan"]:
                    yield {**base, "deviation": row["deviation"]}, row
        elif cfg.kind == "adiabatic-run":
            key = {**base, "beta": cfg.beta, "f_target": cfg.f_target,
                   "alpha_scale": cfg.alpha_scale}
            yield key, None if "error" in rec else rec
        else:
            yield base, None if "error" in rec else rec


def aggregate(cfg: ExperimentConfig, records: list[dict]):
    keys = GRID_KEYS[cfg.kind]
    metrics = METRICS[cfg.kind]
    groups: dict[tuple, list] = {}
    for key, rec in _grid_rows(cfg, records):
        groups.setdefault(tuple(key[k] for k in keys), []).append(rec)
    header = list(keys)
    if cfg.kind == "compensation-scan":
        header.append("deviation_pct")
    for m in metrics:
        header += [f"{m}_mean", f"{m}_std", f"{m}_min", f"{m}_max"]
    header += ["n_ok", "n_failed"]
    rows = []
    for key, recs in groups.items():
        ok = [r for r in recs if r is not None]
        row = list(key)
        if cfg.kind == "compensation-scan":
            # deviation as a percentage of the mean terminal field
            row.append(100.0 * key[2] / key[1])
        for m in metrics:
            row += _stats([r[m] for r in ok])
        row += [len(ok), len(recs) - len(ok)]
        rows.append(row)
    return header, rows


def _public(rec: dict) -> dict:
    return {k: v for k, v in rec.items() if not k.startswith("_")}


def run_experiment(cfg: ExperimentConfig, out_dir: str | Path | None = None) -> RunArtifact:
    """Run every task of ``cfg`` and write the artifact directory.

    Per-realization SpinXferErrors are recorded and excluded from the
    aggregates; RunFailed is raised (after writing the artifact) when more
    than 10% of the tasks fail.
    """
    out = Path(out_dir if out_dir is not None else cfg.out)
    out.mkdir(parents=True, exist_ok=True)
    started = datetime.datetime.now(datetime.timezone.utc)
    tasks = expand_tasks(cfg)
    log.info("running %s: %d tasks on %d worker(s)", cfg.kind, len(tasks), cfg.workers)
    jobs = [(cfg, t) for t in tasks]
    if cfg.workers > 1:
        with ProcessPoolExecutor(max_workers=cfg.workers) as pool:
            records = list(pool.map(_run_task, jobs, chunksize=1))
    else:
        records = [_run_task(job) for job in jobs]
    records.sort(key=lambda r: (r["n"], r["b_field"], r["index"]))

    files = []
    header, rows = aggregate(cfg, records)
    files.append(write_csv(out / "table.csv", header, rows))
    files.append(write_jsonl(out / "realizations.jsonl", [_public(r) for r in records]))

    for rec in records:
        traj = rec.get("_trajectory")
        if traj is None:
            continue
        stem = f"n{rec['n']}_b{rec['b_field']:g}_r{rec['index']:04d}"
        files.append(write_trajectory(out / f"trajectory_{stem}.csv", traj))
        if "_plan" in rec:
            files.append(write_json(out / f"sweep_plan_{stem}.json",
                                    {**rec["_plan"], "sweep_site": cfg.sweep_site,
                                     "tol": cfg.tol, "settle_tau_f": cfg.settle}))

    if cfg.emit_plot_data:
        files.append(_write_plot_data(cfg, out, header, rows, records))

    failed = [{"n": r["n"], "b_field": r["b_field"], "index": r["index"], "error": r["error"]}
              for r in records if "error" in r]
    manifest = {
        "tool": "spinxfer",
        "version": __version__,
        "kind": cfg.kind,
        "config": cfg.to_dict(),
        "master_seed": cfg.seed,
        "seed_env": SEED_ENV,
        "realization_indices": [0, cfg.realizations - 1],
        "tasks": len(records),
        "failures": len(failed),
        "failed": failed,
        "units": "hbar = 1; energies in units of J; times in hbar/J",
        "rng": "splitmix64 per (master_seed, index), Box-Muller normals",
        "started_utc": started.isoformat(),
        "finished_utc": datetime.datetime.now(datetime.timezone.utc).isoformat(),
        "files": sorted(p.name for p in files),
    }
    limit_hit = len(failed) > FAILURE_LIMIT * len(records)
    manifest["status"] = "failed" if limit_hit else "ok"
    write_json(out / "manifest.json", manifest)
    artifact = RunArtifact(out, manifest, header, rows, records, files)
    if limit_hit:
        raise RunFailed(f"{len(failed)} of {len(records)} realizations failed "
                        f"(limit {FAILURE_LIMIT:.0%}); see {out / 'manifest.json'}")
    return artifact


def _write_plot_data(cfg, out, header, rows, records):
    path = out / f"plot_{cfg.kind}.csv"
    if cfg.kind == "adiabatic-run":
        traj = next((r["_trajectory"] for r in records if "_trajectory" in r), None)
        if traj is None:
            return write_csv(path, ["time", "occ_first", "occ_last"], [])
        return write_csv(path, ["time", "occ_first", "occ_last"],
                         zip(traj.times, traj.occ_first, traj.occ_last))
    cols = PLOT_COLUMNS[cfg.kind]
    idx = [header.index(c) for c in cols]
    return write_csv(path, cols, ([row[i] for i in idx] for row in rows))

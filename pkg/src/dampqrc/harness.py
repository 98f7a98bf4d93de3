"""Config-driven experiments: the named studies, sweeps, and their output files.

A config is one JSON document::

    {
      "task": "narma",
      "reservoir": {"ansatz": {"n_qubits": 7, "family": "cx"}, "damping_theta": 0.8,
                    "observable_order": 2},
      "task_params": {"p": [2]},
      "mode": "ensemble",
      "repetitions": 12,
      "seed": 0
    }

Missing fields are filled from ``TASK_DEFAULTS`` and the materialised config is
echoed into the result, so a result file always re-parses to the config that
produced it.
"""

from __future__ import annotations

import copy
import csv
import io
import json
import math
import os
import re
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

from . import learning, reservoir, tasks, trajectory
from .reservoir import ReservoirConfig

OUT_DIR_ENV = "DAMPQRC_OUT_DIR"
TASKS = ("narma", "mackey-glass", "memory-capacity", "trace-distance", "overfitting")
MODES = ("ensemble", "trajectory")
SWEEP_AXES = ("theta", "k", "n_obs", "p", "n_qubits")

RESERVOIR_DEFAULTS = {
    "ansatz": {
        "n_qubits": 7,
        "family": "cx",
        "topology": "ring",
        "input_scale": math.pi / 4,
        "input_offset": 0.0,
    },
    "damping_theta": 0.8,
    "observable_order": 2,
    "include_bias": True,
}

TASK_DEFAULTS = {
    "narma": {
        "p": [2],
        "variant": "paper",
        "alpha": 0.3,
        "beta": 0.05,
        "gamma": 1.5,
        "delta": 0.1,
        "T": 200.0,
        "length": 200,
        "washout": 20,
        "train": 130,
        "burn_in": 500,
        "max_offset": 10000,
    },
    "mackey-glass": {
        "beta": 0.2,
        "gamma": 0.1,
        "tau": 17.0,
        "n": 10.0,
        "dt": 0.01,
        "sample_period": 1.0,
        "length": 2000,
        "history": 1.2,
        "washout": 20,
        "train": 1300,
        "test": 500,
        "max_offset": 0,
    },
    "memory-capacity": {
        "tau_max": 20,
        "orders": [1, 2, 3],
        "length": 200,
        "washout": 20,
        "train": 130,
        "formula": "pearson",
    },
    "trace-distance": {"steps": 40, "thetas": [0.0, 0.8]},
    "overfitting": {
        "n_obs": [60, 100, 125, 130, 135, 200, 300],
        "tau_max": 20,
        "length": 200,
        "washout": 20,
        "train": 130,
        "rcond": 1e-15,
    },
}

# per-task reservoir overrides applied before the user's values
TASK_RESERVOIR_DEFAULTS = {
    "memory-capacity": {"observable_order": 3},
    "trace-distance": {"ansatz": {"n_qubits": 3}, "observable_order": 1},
    "overfitting": {"ansatz": {"n_qubits": 9}, "observable_order": 5, "include_bias": False},
}

NOTES = {
    "narma": "split ambiguity: the source reports length 200 with washout 20 and test 130, which does not "
    "close; this profile uses washout 20 / train 130 / test = length - 150 (50 for length 200).",
}


class ConfigError(ValueError):
    """Invalid experiment config. ``field`` is a dotted path when known."""

    def __init__(self, message: str, field: str | None = None, line: int | None = None, col: int | None = None):
        self.field = field
        self.line = line
        self.col = col
        super().__init__(message)

    def __str__(self):
        where = []
        if self.line is not None:
            where.append(f"line {self.line}" + (f", column {self.col}" if self.col else ""))
        if self.field:
            where.append(f"field '{self.field}'")
        msg = super().__str__()
        return f"{'; '.join(where)}: {msg}" if where else msg


def _merge(base: dict, override: dict, path: str = "") -> dict:
    out = copy.deepcopy(base)
    for key, value in override.items():
        if key not in base:
            raise ConfigError(f"unknown key {key!r}", field=f"{path}{key}")
        if isinstance(base[key], dict):
            if not isinstance(value, dict):
                raise ConfigError("expected an object", field=f"{path}{key}")
            out[key] = _merge(base[key], value, f"{path}{key}.")
        else:
            out[key] = value
    return out


@dataclass(frozen=True)
class ExperimentConfig:
    task: str
    reservoir: ReservoirConfig
    task_params: dict
    mode: str = "ensemble"
    shots: trajectory.ShotPlan | None = None
    repetitions: int = 1
    seed: int = 0
    ridge_lambda: float = learning.DEFAULT_LAMBDA
    output: str = "experiment"
    sweep: dict | None = None

    def to_dict(self) -> dict:
        d = {
            "task": self.task,
            "reservoir": self.reservoir.to_dict(),
            "task_params": copy.deepcopy(self.task_params),
            "mode": self.mode,
            "shots": None if self.shots is None else {"shots": self.shots.shots, "batches": self.shots.batches, "seed": self.shots.seed},
            "repetitions": self.repetitions,
            "seed": self.seed,
            "ridge_lambda": self.ridge_lambda,
            "output": self.output,
        }
        if self.sweep is not None:
            d["sweep"] = copy.deepcopy(self.sweep)
        return d


_TOP_KEYS = {"task", "reservoir", "task_params", "mode", "shots", "repetitions", "seed", "ridge_lambda", "output", "sweep"}


def parse_config(data: dict) -> ExperimentConfig:
    """Validate a config mapping and fill every default."""
    if not isinstance(data, dict):
        raise ConfigError("config must be a JSON object")
    unknown = set(data) - _TOP_KEYS
    if unknown:
        raise ConfigError(f"unknown key {sorted(unknown)[0]!r}", field=sorted(unknown)[0])
    task = data.get("task")
    if task not in TASKS:
        raise ConfigError(f"task must be one of {TASKS}, got {task!r}", field="task")

    res_base = _merge(RESERVOIR_DEFAULTS, TASK_RESERVOIR_DEFAULTS.get(task, {}))
    res_dict = _merge(res_base, data.get("reservoir") or {}, "reservoir.")
    try:
        rcfg = ReservoirConfig.from_dict(res_dict)
    except (TypeError, ValueError) as exc:
        raise ConfigError(str(exc), field=_reservoir_field(str(exc))) from None

    params = _merge(TASK_DEFAULTS[task], data.get("task_params") or {}, "task_params.")
    _validate_task_params(task, params, rcfg)

    mode = data.get("mode", "ensemble")
    if mode not in MODES:
        raise ConfigError(f"mode must be one of {MODES}", field="mode")
    if mode == "trajectory" and task == "trace-distance":
        raise ConfigError("trace-distance runs in ensemble mode only", field="mode")
    shots = None
    if mode == "trajectory" or data.get("shots") is not None:
        shot_dict = _merge({"shots": 50_000, "batches": 1, "seed": 0}, data.get("shots") or {}, "shots.")
        try:
            shots = trajectory.ShotPlan(**shot_dict)
        except ValueError as exc:
            raise ConfigError(str(exc), field="shots") from None

    reps = data.get("repetitions", 1)
    if not isinstance(reps, int) or isinstance(reps, bool) or reps < 1:
        raise ConfigError("repetitions must be an integer >= 1", field="repetitions")
    seed = data.get("seed", 0)
    if not isinstance(seed, int) or isinstance(seed, bool) or not 0 <= seed < 2**63:
        raise ConfigError("seed must be a non-negative integer", field="seed")
    lam = data.get("ridge_lambda", learning.DEFAULT_LAMBDA)
    if not isinstance(lam, (int, float)) or isinstance(lam, bool) or lam < 0:
        raise ConfigError("ridge_lambda must be a non-negative number", field="ridge_lambda")
    output = data.get("output", task)
    if not isinstance(output, str) or not re.fullmatch(r"[A-Za-z0-9_.\-]+", output):
        raise ConfigError("output must be a plain file-name stem", field="output")

    sweep = data.get("sweep")
    if sweep is not None:
        if not isinstance(sweep, dict) or set(sweep) != {"axis", "values"}:
            raise ConfigError("sweep needs exactly 'axis' and 'values'", field="sweep")
        if sweep["axis"] not in SWEEP_AXES:
            raise ConfigError(f"sweep axis must be one of {SWEEP_AXES}", field="sweep.axis")
        if not isinstance(sweep["values"], list) or not sweep["values"]:
            raise ConfigError("sweep values must be a non-empty list", field="sweep.values")
        sweep = {"axis": sweep["axis"], "values": list(sweep["values"])}

    cfg = ExperimentConfig(task, rcfg, params, mode, shots, reps, seed, float(lam), output, sweep)
    if sweep is not None:
        for v in sweep["values"]:
            sweep_point(cfg, v)
    return cfg


def _reservoir_field(message: str) -> str:
    word = message.split()[0] if message else ""
    if word in RESERVOIR_DEFAULTS["ansatz"]:
        return f"reservoir.ansatz.{word}"
    if word in RESERVOIR_DEFAULTS:
        return f"reservoir.{word}"
    return "reservoir.ansatz" if "ansatz" in message else "reservoir"


def _validate_task_params(task: str, params: dict, rcfg: ReservoirConfig) -> None:
    def need(cond, key, msg):
        if not cond:
            raise ConfigError(msg, field=f"task_params.{key}")

    def is_int(v):
        return isinstance(v, int) and not isinstance(v, bool)

    if task == "narma":
        if is_int(params["p"]):
            params["p"] = [params["p"]]
        need(isinstance(params["p"], list) and params["p"] and all(is_int(p) and p >= 1 for p in params["p"]), "p", "p must be a positive integer or a list of them")
        need(params["variant"] in ("paper", "standard"), "variant", "variant must be 'paper' or 'standard'")
        need(params["T"] > 0, "T", "T must be positive")
        need(is_int(params["burn_in"]) and params["burn_in"] >= 0, "burn_in", "burn_in must be a non-negative integer")
        need(is_int(params["max_offset"]) and params["max_offset"] >= 0, "max_offset", "max_offset must be a non-negative integer")
        _validate_split(params, need, is_int)
        need(max(params["p"]) <= params["length"], "p", "p exceeds the series length")
    elif task == "mackey-glass":
        try:
            tasks.MackeyGlassParams(**{k: params[k] for k in ("beta", "gamma", "tau", "n", "dt", "sample_period", "length", "history")})
        except (TypeError, ValueError) as exc:
            raise ConfigError(str(exc), field="task_params") from None
        for key in ("washout", "train", "test", "max_offset"):
            need(is_int(params[key]) and params[key] >= 0, key, f"{key} must be a non-negative integer")
        need(params["train"] > 0 and params["test"] > 1, "train", "train and test spans must be non-empty")
        need(params["washout"] + params["train"] + params["test"] + 1 <= params["length"], "length", "series too short for washout + train + test + 1")
    elif task in ("memory-capacity", "overfitting"):
        _validate_split(params, need, is_int)
        need(is_int(params["tau_max"]) and 1 <= params["tau_max"] < params["train"], "tau_max", "tau_max must lie in [1, train)")
        if task == "memory-capacity":
            orders = params["orders"]
            need(isinstance(orders, list) and orders and all(is_int(k) and 1 <= k <= rcfg.n_qubits for k in orders), "orders", f"orders must be integers in [1, {rcfg.n_qubits}]")
            need(params["formula"] in ("pearson", "printed"), "formula", "formula must be 'pearson' or 'printed'")
        else:
            n_obs = params["n_obs"]
            avail = reservoir.n_features(rcfg.n_qubits, rcfg.observable_order)
            need(isinstance(n_obs, list) and n_obs and all(is_int(m) and 1 <= m <= avail for m in n_obs), "n_obs", f"n_obs entries must be integers in [1, {avail}]")
            need(params["rcond"] > 0, "rcond", "rcond must be positive")
    elif task == "trace-distance":
        need(is_int(params["steps"]) and params["steps"] >= 1, "steps", "steps must be a positive integer")
        need(isinstance(params["thetas"], list) and params["thetas"] and all(isinstance(t, (int, float)) and 0 <= t <= math.pi for t in params["thetas"]), "thetas", "thetas must be angles in [0, pi]")


def _validate_split(params, need, is_int):
    for key in ("length", "washout", "train"):
        need(is_int(params[key]) and params[key] >= 0, key, f"{key} must be a non-negative integer")
    need(params["train"] >= 1, "train", "train span must be non-empty")
    need(params["washout"] + params["train"] + 2 <= params["length"], "length", "length leaves fewer than 2 test steps")


def load_config(path: str | os.PathLike) -> ExperimentConfig:
    text = Path(path).read_text()
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(exc.msg, line=exc.lineno, col=exc.colno) from None
    try:
        return parse_config(data)
    except ConfigError as exc:
        if exc.field and exc.line is None:
            exc.line = _locate(text, exc.field)
        raise


def _locate(text: str, field: str) -> int | None:
    key = field.split(".")[-1]
    for i, line in enumerate(text.splitlines(), 1):
        if f'"{key}"' in line:
            return i
    return None


# -- single experiments ---------------------------------------------------------


def _rep_seed(seed: int, rep: int) -> int:
    return int(np.random.SeedSequence([seed, rep]).generate_state(1, np.uint64)[0])


def _features(x01: np.ndarray, rcfg: ReservoirConfig, cfg: ExperimentConfig, rep: int) -> np.ndarray:
    if cfg.mode == "ensemble":
        return reservoir.run_sequence(x01, rcfg)
    plan = trajectory.ShotPlan(cfg.shots.shots, cfg.shots.batches, _rep_seed(cfg.shots.seed, rep))
    mean, _ = trajectory.trajectory_features(x01, rcfg, plan)
    return mean


def _with_order(rcfg: ReservoirConfig, order: int) -> ReservoirConfig:
    return ReservoirConfig(rcfg.ansatz, rcfg.damping_theta, order, rcfg.include_bias)


def _columns_for_order(h: np.ndarray, rcfg: ReservoirConfig, k: int) -> np.ndarray:
    m = reservoir.n_features(rcfg.n_qubits, k)
    return np.hstack([h[:, :m], h[:, -1:]]) if rcfg.include_bias else h[:, :m]


def narma_inputs(params: dict, rng: np.random.Generator) -> tuple[np.ndarray, int]:
    """Drive signal including burn-in, and the random time offset used."""
    offset = int(rng.integers(0, params["max_offset"] + 1))
    t = np.arange(-params["burn_in"], params["length"]) + offset
    return tasks.narma_input(t, params["T"]), offset


def run_narma(cfg: ExperimentConfig, rep: int) -> dict:
    prm = cfg.task_params
    rng = np.random.default_rng(_rep_seed(cfg.seed, rep))
    u_full, offset = narma_inputs(prm, rng)
    b = prm["burn_in"]
    u = u_full[b:]
    h = _features((u + 0.1) / 0.2, cfg.reservoir, cfg, rep)
    metrics, series = {}, {"input": u.tolist()}
    for p in prm["p"]:
        np_ = tasks.NarmaParams(p=p, alpha=prm["alpha"], beta=prm["beta"], gamma=prm["gamma"], delta=prm["delta"], T=prm["T"], length=prm["length"], variant=prm["variant"])
        y = tasks.narma_target(u_full, np_)[b:]
        data = learning.SeriesDataset(u, y, prm["washout"], prm["washout"] + prm["train"])
        w, pred, target = learning.fit_and_evaluate(h, data, cfg.ridge_lambda)
        metrics[f"nmse_p{p}"] = learning.nmse(pred, target)
        series[f"target_p{p}"] = y.tolist()
        series[f"prediction_p{p}"] = learning.predict(h, w).tolist()
    metrics["nmse_mean"] = float(np.mean([metrics[f"nmse_p{p}"] for p in prm["p"]]))
    return {"metrics": metrics, "curves": {}, "series": series, "info": {"time_offset": offset}}


def run_mackey_glass(cfg: ExperimentConfig, rep: int) -> dict:
    prm = cfg.task_params
    rng = np.random.default_rng(_rep_seed(cfg.seed, rep))
    offset = int(rng.integers(0, prm["max_offset"] + 1))
    mg = tasks.MackeyGlassParams(**{k: prm[k] for k in ("beta", "gamma", "tau", "n", "dt", "sample_period", "history")}, length=prm["length"] + offset)
    series = tasks.mackey_glass_series(mg)[offset:]
    data = tasks.next_step_task(series, prm["washout"], prm["train"], prm["test"])
    lo, hi = series.min(), series.max()
    h = _features((data.inputs - lo) / (hi - lo), cfg.reservoir, cfg, rep)
    w, pred, target = learning.fit_and_evaluate(h, data, cfg.ridge_lambda)
    return {
        "metrics": {"nmse": learning.nmse(pred, target)},
        "curves": {},
        "info": {"start_offset": offset},
        "series": {"input": data.inputs.tolist(), "target": data.targets.tolist(), "prediction": learning.predict(h, w).tolist()},
    }


def run_memory_capacity(cfg: ExperimentConfig, rep: int) -> dict:
    prm = cfg.task_params
    rng = np.random.default_rng(_rep_seed(cfg.seed, rep))
    x = rng.uniform(0.0, 1.0, prm["length"])
    kmax = max(prm["orders"])
    rcfg = _with_order(cfg.reservoir, kmax)
    h = _features(x, rcfg, cfg, rep)
    split = (prm["washout"], prm["washout"] + prm["train"])
    metrics, curves = {}, {}
    for k in prm["orders"]:
        hk = _columns_for_order(h, rcfg, k)
        curve = learning.memory_capacity_curve(hk, x, prm["tau_max"], split, cfg.ridge_lambda, prm["formula"])
        metrics[f"mc_k{k}"] = float(curve.sum() / prm["tau_max"])
        metrics[f"n_obs_k{k}"] = reservoir.n_features(rcfg.n_qubits, k)
        curves[f"mc_tau_k{k}"] = curve.tolist()
    return {"metrics": metrics, "curves": curves, "series": {"input": x.tolist()}}


def run_trace_distance(cfg: ExperimentConfig, rep: int) -> dict:
    prm = cfg.task_params
    rng = np.random.default_rng(_rep_seed(cfg.seed, rep))
    x = rng.uniform(0.0, 1.0, prm["steps"])
    curves = {}
    for th in prm["thetas"]:
        rcfg = ReservoirConfig(cfg.reservoir.ansatz, float(th), cfg.reservoir.observable_order, cfg.reservoir.include_bias)
        curves[f"trace_distance_theta{th!r}"] = reservoir.diagnostics_trace_distance(rcfg, x).tolist()
    return {"metrics": {}, "curves": curves, "series": {"input": x.tolist()}}


def pinv_memory_capacity(h, x, tau_max: int, split, rcond: float) -> float:
    """Memory capacity with a Moore-Penrose (minimum-norm) readout."""
    curve = []
    for tau in range(tau_max + 1):
        data = tasks.delay_task(x, tau, washout=split[0], train=split[1] - split[0])
        tr, te = data.train_rows, data.test_rows
        w = learning.train_readout(h[tr], data.targets[tr], 0.0, rcond=rcond)
        curve.append(learning.squared_correlation(data.targets[te], learning.predict(h[te], w)))
    return float(sum(curve) / tau_max)


def run_overfitting(cfg: ExperimentConfig, rep: int) -> dict:
    prm = cfg.task_params
    rng = np.random.default_rng(_rep_seed(cfg.seed, rep))
    x = rng.uniform(0.0, 1.0, prm["length"])
    h = _features(x, cfg.reservoir, cfg, rep)
    split = (prm["washout"], prm["washout"] + prm["train"])
    metrics = {f"mc_nobs{m}": pinv_memory_capacity(h[:, :m], x, prm["tau_max"], split, prm["rcond"]) for m in prm["n_obs"]}
    return {"metrics": metrics, "curves": {}, "series": {"input": x.tolist()}}


RUNNERS = {
    "narma": run_narma,
    "mackey-glass": run_mackey_glass,
    "memory-capacity": run_memory_capacity,
    "trace-distance": run_trace_distance,
    "overfitting": run_overfitting,
}


def _run_one(args) -> dict:
    cfg_dict, rep = args
    cfg = parse_config(cfg_dict)
    return RUNNERS[cfg.task](cfg, rep)


def _dispatch(jobs: list, workers: int) -> list:
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(_run_one, jobs))
    return [_run_one(j) for j in jobs]


def _aggregate(reps: list[dict]) -> dict:
    """Mean and sample standard deviation of every metric and curve point."""
    agg = {}
    for name in reps[0]["metrics"]:
        v = np.array([r["metrics"][name] for r in reps], dtype=float)
        agg[name] = {"mean": float(v.mean()), "sd": float(v.std(ddof=1)) if len(v) > 1 else 0.0, "n": len(v)}
    for name in reps[0]["curves"]:
        v = np.array([r["curves"][name] for r in reps], dtype=float)
        agg[name] = {"mean": v.mean(axis=0).tolist(), "sd": (v.std(axis=0, ddof=1) if len(v) > 1 else np.zeros(v.shape[1])).tolist(), "n": len(v)}
    return agg


def run_experiment(cfg: ExperimentConfig, workers: int = 1, keep_series: bool = False) -> dict:
    """Run every repetition. Returns the deterministic result payload."""
    jobs = [(cfg.to_dict(), rep) for rep in range(cfg.repetitions)]
    reps = _dispatch(jobs, workers)
    return _result_payload(cfg, reps, keep_series)


def _result_payload(cfg, reps, keep_series):
    out = {
        "config": cfg.to_dict(),
        "repetitions": [
            {"repetition": i, **({"info": r["info"]} if "info" in r else {}), "metrics": r["metrics"], "curves": r["curves"], **({"series": r["series"]} if keep_series else {})}
            for i, r in enumerate(reps)
        ],
        "aggregate": _aggregate(reps),
    }
    if cfg.task in NOTES:
        out["notes"] = [NOTES[cfg.task]]
    return out


def sweep_point(cfg: ExperimentConfig, value) -> ExperimentConfig:
    """The config of a single sweep point."""
    d = cfg.to_dict()
    d.pop("sweep", None)
    axis = cfg.sweep["axis"]
    if axis == "theta":
        d["reservoir"]["damping_theta"] = value
    elif axis == "k":
        d["reservoir"]["observable_order"] = value
        if cfg.task == "memory-capacity":
            d["task_params"]["orders"] = [value]
    elif axis == "n_qubits":
        d["reservoir"]["ansatz"]["n_qubits"] = value
    elif axis == "p":
        if cfg.task != "narma":
            raise ConfigError("sweep axis 'p' applies to the narma task only", field="sweep.axis")
        d["task_params"]["p"] = [value]
    elif axis == "n_obs":
        if cfg.task != "overfitting":
            raise ConfigError("sweep axis 'n_obs' applies to the overfitting task only", field="sweep.axis")
        d["task_params"]["n_obs"] = [value]
    try:
        return parse_config(d)
    except ConfigError as exc:
        raise ConfigError(f"sweep value {value!r}: {exc}", field="sweep.values") from None


def run_sweep(cfg: ExperimentConfig, workers: int = 1) -> dict:
    if cfg.sweep is None:
        raise ConfigError("config has no sweep section", field="sweep")
    points = [sweep_point(cfg, v) for v in cfg.sweep["values"]]
    jobs = [(p.to_dict(), rep) for p in points for rep in range(p.repetitions)]
    flat = _dispatch(jobs, workers)
    results, i = [], 0
    for v, p in zip(cfg.sweep["values"], points):
        results.append({"value": v, **_result_payload(p, flat[i : i + p.repetitions], False)})
        i += p.repetitions
    return {"config": cfg.to_dict(), "axis": cfg.sweep["axis"], "points": results}


# -- output files -----------------------------------------------------------------

CSV_HEADER = ["repetition", "sweep_value", "step_or_tau", "metric_name", "value"]


def _fmt(v) -> str:
    if v is None or v == "":
        return ""
    if isinstance(v, float):
        return repr(v)
    return str(v)


def metric_rows(payload: dict, sweep_value="") -> list[list]:
    """Long-format rows for one result payload, per repetition then aggregates."""
    rows = []
    for rep in payload["repetitions"]:
        for name, v in rep["metrics"].items():
            rows.append([rep["repetition"], sweep_value, "", name, v])
        for name, curve in rep["curves"].items():
            rows.extend([rep["repetition"], sweep_value, t, name, v] for t, v in enumerate(curve))
    for name, agg in payload["aggregate"].items():
        for stat in ("mean", "sd"):
            val = agg[stat]
            if isinstance(val, list):
                rows.extend([stat, sweep_value, t, name, v] for t, v in enumerate(val))
            else:
                rows.append([stat, sweep_value, "", name, val])
    return rows


def rows_to_csv(rows: list[list]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_HEADER)
    for r in rows:
        w.writerow([_fmt(c) for c in r])
    return buf.getvalue()


def series_csv(payload: dict) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["repetition", "t", "series", "value"])
    for rep in payload["repetitions"]:
        for name, values in rep.get("series", {}).items():
            for t, v in enumerate(values):
                w.writerow([rep["repetition"], t, name, _fmt(float(v))])
    return buf.getvalue()


def dumps(payload) -> str:
    return json.dumps(payload, indent=2, sort_keys=False, allow_nan=False) + "\n"


def _metadata(started: float, workers: int, kind: str) -> dict:
    from . import __version__

    return {
        "kind": kind,
        "started_at": datetime.fromtimestamp(started, timezone.utc).isoformat(),
        "wall_clock_s": time.time() - started,
        "workers": workers,
        "version": __version__,
    }


def resolve_out_dir(out_dir: str | os.PathLike | None) -> Path:
    return Path(out_dir or os.environ.get(OUT_DIR_ENV) or "results")


def output_paths(base: Path, stem: str) -> dict[str, Path]:
    return {
        "result": base / f"{stem}.json",
        "metrics": base / f"{stem}.csv",
        "series": base / f"{stem}.series.csv",
        "metadata": base / f"{stem}.meta.json",
    }


def write_run(cfg: ExperimentConfig, out_dir, workers: int = 1) -> Path:
    """Run ``cfg`` and write ``<output>.json``, ``<output>.csv``, series and metadata files."""
    started = time.time()
    payload = run_experiment(cfg, workers, keep_series=True)
    base = resolve_out_dir(out_dir)
    base.mkdir(parents=True, exist_ok=True)
    paths = output_paths(base, cfg.output)
    paths["series"].write_text(series_csv(payload))
    for rep in payload["repetitions"]:
        rep.pop("series", None)
    paths["result"].write_text(dumps(payload))
    paths["metrics"].write_text(rows_to_csv(metric_rows(payload)))
    paths["metadata"].write_text(dumps(_metadata(started, workers, "run")))
    return paths["result"]


def write_sweep(cfg: ExperimentConfig, out_dir, workers: int = 1) -> Path:
    started = time.time()
    payload = run_sweep(cfg, workers)
    base = resolve_out_dir(out_dir)
    base.mkdir(parents=True, exist_ok=True)
    paths = output_paths(base, f"{cfg.output}.sweep")
    rows = [r for pt in payload["points"] for r in metric_rows(pt, pt["value"])]
    paths["result"].write_text(dumps(payload))
    paths["metrics"].write_text(rows_to_csv(rows))
    paths["metadata"].write_text(dumps(_metadata(started, workers, "sweep")))
    return paths["metrics"]


def taskgen(task: str, params: dict, seed: int = 0) -> str:
    """CSV with columns ``t,input,target`` for one benchmark series."""
    rows = []
    if task == "narma":
        prm = _merge({"p": 2, "T": 200.0, "length": 200, "variant": "paper"}, params)
        np_ = tasks.NarmaParams(p=prm["p"], T=prm["T"], length=prm["length"], variant=prm["variant"])
        u = tasks.narma_input(np.arange(np_.length), np_.T)
        y = tasks.narma_target(u, np_)
        rows = list(zip(range(len(u)), u, y))
    elif task == "mackey-glass":
        prm = _merge({f: getattr(tasks.MackeyGlassParams(), f) for f in tasks.MackeyGlassParams.__dataclass_fields__}, params)
        series = tasks.mackey_glass_series(tasks.MackeyGlassParams(**prm))
        rows = list(zip(range(len(series) - 1), series[:-1], series[1:]))
    elif task == "delay":
        prm = _merge({"tau": 5, "length": 200}, params)
        x = np.random.default_rng(seed).uniform(0.0, 1.0, prm["length"])
        data = tasks.delay_task(x, prm["tau"])
        rows = [(t, a, b if ok else None) for t, (a, b, ok) in enumerate(zip(data.inputs, data.targets, data.valid))]
    else:
        raise ConfigError(f"unknown task {task!r}", field="task")
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["t", "input", "target"])
    for t, a, b in rows:
        w.writerow([t, _fmt(float(a)), "" if b is None else _fmt(float(b))])
    return buf.getvalue()

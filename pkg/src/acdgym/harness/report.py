"""Aggregate run directories into the reliability summary table."""

from __future__ import annotations

import json
import logging
import math
from collections import defaultdict
from pathlib import Path
from typing import Iterable, Optional, Sequence

import numpy as np

from .. import metrics
from ..errors import ConfigurationError
from ..scoring import fmt, read_behaviour_csv, read_evaluation_csv
from .config import ExperimentConfig
from .runner import RUN_FILES, SUMMARY_HEADER, RunResult, read_training_log, write_summary_csv

log = logging.getLogger(__name__)

GROUP_COLUMNS = ["environment", "agent_order", "node_count", "action_space", "learner", "runs"]
NAN = float("nan")


def _curve_dt(curve, window: Optional[int]) -> float:
    """DT of one curve, or nan when the curve is too short for the window."""
    if len(curve) < 3:
        return NAN
    w = window if window is not None else metrics.default_window(len(curve))
    if w > len(curve) - 1:
        return NAN
    return metrics.dt(curve, w)


def summarise_runs(runs: Sequence[RunResult], dt_window: Optional[int] = None) -> metrics.RiskSummary:
    """RiskSummary for one group of runs.

    RF is taken per run over its episode means and then averaged across
    runs. The CI is over run means when there are several runs and over
    episode means for a single run.
    """
    if not runs:
        raise ValueError("no runs to summarise")
    values = [np.asarray(r.eval_values, dtype=np.float64) for r in runs]
    run_means = np.array([v.mean() for v in values])
    score = float(run_means.mean())
    lower = float(np.mean([metrics.cvar_lower(v, metrics.DEFAULT_ALPHA) for v in values]))
    upper = float(np.mean([metrics.cvar_upper(v, metrics.DEFAULT_ALPHA) for v in values]))

    dts = [_curve_dt(r.curve, dt_window) for r in runs]
    dt_mean = float(np.mean(dts)) if dts and not any(math.isnan(d) for d in dts) else NAN

    curves = [r.curve for r in runs]
    aligned = len(runs) >= 2 and all(c for c in curves) and all(r.steps == runs[0].steps for r in runs)
    dr_prime = metrics.dr_prime(curves) if aligned else NAN

    if len(runs) >= 2:
        ci = metrics.ci95(run_means)
    elif values[0].size >= 2:
        ci = metrics.ci95(values[0])
    else:
        ci = (score, score)
    return metrics.RiskSummary(score, lower, upper, dt_mean, dr_prime, ci[0], ci[1])


def group_label(cfg: dict) -> tuple:
    c = ExperimentConfig(cfg)
    reward, env, order, size = c.group_key()
    space = cfg["yt"]["action_space"] if env == "YT" else "CAGE"
    return (reward, env, order, size, space, cfg["learner"])


def group_runs(runs: Iterable[RunResult]) -> dict:
    groups = defaultdict(list)
    for r in runs:
        groups[group_label(r.config)].append(r)
    return {k: sorted(v, key=lambda r: r.run_index) for k, v in sorted(groups.items(), key=lambda kv: str(kv[0]))}


def report_rows(runs: Iterable[RunResult]) -> list[list]:
    rows = [SUMMARY_HEADER + GROUP_COLUMNS]
    for (reward, env, order, size, space, learner), members in group_runs(runs).items():
        window = members[0].config.get("dt_window")
        summary = summarise_runs(members, window)
        rows.append([reward, *summary.as_row(), env, order, size, space, learner, len(members)])
    return rows


def behaviour_matrix(runs: Iterable[RunResult]) -> list[list]:
    """Metric x group matrix of behavioural counters averaged over runs."""
    groups = group_runs(runs)
    labels = ["/".join(str(p) for p in key) for key in groups]
    metric_names: list[str] = []
    for members in groups.values():
        for r in members:
            for name in r.behaviour:
                if name not in metric_names:
                    metric_names.append(name)
    rows = [["metric", *labels]]
    for name in metric_names:
        row = [name]
        for members in groups.values():
            vals = [r.behaviour[name] for r in members if name in r.behaviour]
            row.append(fmt(float(np.mean(vals))) if vals else "")
        rows.append(row)
    return rows


def _expected_log_rows(cfg: dict) -> int:
    if cfg["learner"] not in ("PPO", "DQN", "QTABLE"):
        return 0
    return cfg["total_steps"] // cfg["eval_interval"]


def load_run(directory) -> Optional[RunResult]:
    """Read one run directory; None (with a warning) if it is incomplete."""
    d = Path(directory)
    missing = [f for f in RUN_FILES if not (d / f).is_file()]
    if missing:
        log.warning("skipping %s: missing %s", d, ", ".join(missing))
        return None
    try:
        cfg = json.loads((d / "config.json").read_text())
        run_index, seed = cfg.pop("run_index"), cfg.pop("seed")
        ExperimentConfig(cfg)
        steps, curve = read_training_log(d / "training_log.csv")
        values = read_evaluation_csv(d / "evaluation.csv")
        _, behaviour = read_behaviour_csv(d / "behaviour.csv")
    except (ValueError, KeyError, ConfigurationError) as exc:
        log.warning("skipping %s: unreadable artifacts (%s)", d, exc)
        return None
    if values.size == 0:
        log.warning("skipping %s: empty evaluation", d)
        return None
    if len(steps) != _expected_log_rows(cfg):
        log.warning("skipping %s: training log has %d rows, expected %d",
                    d, len(steps), _expected_log_rows(cfg))
        return None
    return RunResult(run_index, seed, cfg, steps, curve, values, behaviour, d)


def find_run_dirs(paths: Iterable) -> list[Path]:
    """Expand each path to the run directories (holding config.json) beneath it."""
    found = []
    for p in map(Path, paths):
        if (p / "config.json").is_file():
            found.append(p)
        elif p.is_dir():
            found.extend(sorted(c.parent for c in p.rglob("config.json")))
        else:
            log.warning("skipping %s: not a directory", p)
    return found


def cmd_report(paths: Sequence, out) -> list[list]:
    """Write ``out`` (summary) and ``<out stem>_behaviour.csv``; return the summary rows."""
    dirs = find_run_dirs(paths)
    runs = [r for r in (load_run(d) for d in dirs) if r is not None]
    if not runs:
        raise ConfigurationError("no complete runs found in " + ", ".join(map(str, paths)))
    rows = report_rows(runs)
    out = Path(out)
    out.parent.mkdir(parents=True, exist_ok=True)
    write_summary_csv(out, rows)
    write_summary_csv(out.with_name(out.stem + "_behaviour.csv"), behaviour_matrix(runs))
    return rows

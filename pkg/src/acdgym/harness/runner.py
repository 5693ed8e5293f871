"""Training and evaluation pipelines and the per-run artifact layout.

Each run directory holds::

    config.json         merged config plus ``run_index`` and ``seed``
    training_log.csv    run_id, training_step, mean_episodic_reward
    evaluation.csv      one row per final evaluation episode
    behaviour.csv       mean behavioural counters of the final policy
    summary.csv         RiskSummary of this run alone
    checkpoint.json     learner parameters (trained learners only)
"""

from __future__ import annotations

import csv
import json
import logging
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

import numpy as np

from ..errors import ConfigurationError
from ..learners import (DqnAgent, PpoAgent, QTable, bits_state_key, load_checkpoint,
                        make_scripted, save_checkpoint, yt_state_key)
from ..scoring import fmt, rollout, write_behaviour_csv, write_evaluation_csv
from .config import ExperimentConfig

log = logging.getLogger(__name__)

RUN_FILES = ("config.json", "training_log.csv", "evaluation.csv", "behaviour.csv", "summary.csv")
TRAINING_LOG_HEADER = ["run_id", "training_step", "mean_episodic_reward"]
SUMMARY_HEADER = ["reward_function", "score_gt", "lower_rf", "upper_rf", "dt_mean", "dr_prime",
                  "ci_ll", "ci_ul"]


@dataclass
class RunResult:
    """Everything the report needs from one run, in memory."""

    run_index: int
    seed: int
    config: dict
    steps: list = field(default_factory=list)
    curve: list = field(default_factory=list)
    eval_values: np.ndarray = None
    behaviour: dict = field(default_factory=dict)
    directory: Optional[Path] = None


def derive_seeds(seed: int) -> tuple[int, int]:
    """Independent (environment, learner) seeds from one run seed."""
    children = np.random.SeedSequence(seed).spawn(2)
    return tuple(int(c.generate_state(1, dtype=np.uint32)[0]) for c in children)


def make_learner(cfg: ExperimentConfig, env, seed: int):
    lc = cfg.learner_config()
    if cfg.learner == "PPO":
        return PpoAgent(env.observation_size, env.n_actions, lc, seed=seed)
    if cfg.learner == "DQN":
        return DqnAgent(env.observation_size, env.n_actions, lc, seed=seed)
    if cfg.learner == "QTABLE":
        key_fn = yt_state_key if cfg.environment == "YT" else bits_state_key
        return QTable(env.n_actions, lc, seed=seed, key_fn=key_fn)
    return make_scripted(cfg.learner, env)


def _write_training_log(path: Path, run_index: int, steps, curve):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(TRAINING_LOG_HEADER)
        for s, y in zip(steps, curve):
            w.writerow([run_index, s, fmt(y)])


def read_training_log(path) -> tuple[list, list]:
    steps, curve = [], []
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames != TRAINING_LOG_HEADER:
            raise ValueError(f"{path}: unexpected header {reader.fieldnames}")
        for row in reader:
            steps.append(int(row["training_step"]))
            curve.append(float(row["mean_episodic_reward"]))
    return steps, curve


def write_summary_csv(path, rows: list[list]):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(rows[0])
        for row in rows[1:]:
            w.writerow([v if isinstance(v, (str, int)) else fmt(v) for v in row])


def check_output_dir(out: Path):
    """Fail before any work starts if ``out`` cannot be written."""
    try:
        out.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise ConfigurationError(f"cannot create output directory {out}: {exc}") from None
    if not os.access(out, os.W_OK):
        raise ConfigurationError(f"output directory {out} is not writable")


def train_run(cfg: ExperimentConfig, run_index: int, out: Optional[Path]) -> RunResult:
    """Train (or, for a scripted learner, just evaluate) one run."""
    seed = cfg["base_seed"] + run_index
    env_seed, learner_seed = derive_seeds(seed)
    env = cfg.make_env(env_seed)
    learner = make_learner(cfg, env, learner_seed)
    eval_env = cfg.make_env(env_seed)
    eval_base = cfg["eval_seed_offset"] + seed

    steps, curve = [], []
    if not cfg.is_scripted:
        interval, k = cfg["eval_interval"], cfg["eval_interval_episodes"]

        def on_step(step: int):
            if step % interval == 0:
                res = rollout(eval_env, learner, k, base_seed=eval_base)
                steps.append(step)
                curve.append(float(np.mean([r.episodic_reward for r in res.episodes])))

        learner.learn(env, cfg["total_steps"], on_step=on_step)

    final = rollout(eval_env, learner, cfg["eval_episodes"], base_seed=eval_base)
    result = RunResult(run_index, seed, cfg.raw, steps, curve,
                       final.distribution.values, final.behaviour(), out)

    if out is not None:
        out.mkdir(parents=True, exist_ok=True)
        snapshot = dict(cfg.raw, run_index=run_index, seed=seed)
        (out / "config.json").write_text(json.dumps(snapshot, indent=2, sort_keys=True) + "\n")
        _write_training_log(out / "training_log.csv", run_index, steps, curve)
        write_evaluation_csv(out / "evaluation.csv", final.episodes, final.action_tags)
        write_behaviour_csv(out / "behaviour.csv", final.behaviour(), cfg["reward"])
        from .report import summarise_runs  # local import: report imports this module
        write_summary_csv(out / "summary.csv",
                          [SUMMARY_HEADER,
                           [cfg["reward"], *summarise_runs([result], cfg["dt_window"]).as_row()]])
        if not cfg.is_scripted:
            save_checkpoint(out / "checkpoint.json", learner)
    return result


def _train_run_job(args):
    raw, run_index, out = args
    return train_run(ExperimentConfig(raw), run_index, out)


def cmd_train(cfg: ExperimentConfig, out=None) -> list[RunResult]:
    """Run ``cfg['runs']`` seeds; run i uses seed ``base_seed + i``."""
    out = Path(out if out is not None else cfg["output_dir"])
    check_output_dir(out)
    jobs = [(cfg.raw, i, out / f"run_{i:03d}") for i in range(cfg["runs"])]
    workers = min(cfg["workers"], len(jobs))
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_train_run_job, jobs))
    else:
        results = [_train_run_job(job) for job in jobs]
    return sorted(results, key=lambda r: r.run_index)


def cmd_evaluate(cfg: ExperimentConfig, out, checkpoint=None, policy: Optional[str] = None,
                 episodes: Optional[int] = None):
    """Evaluate a saved learner or a named scripted policy; write the two CSVs."""
    out = Path(out)
    if checkpoint is None and policy is None:
        if not cfg.is_scripted:
            raise ConfigurationError("evaluate needs --checkpoint or a scripted --policy")
        policy = cfg.learner
    env_seed, _ = derive_seeds(cfg["base_seed"])
    env = cfg.make_env(env_seed)
    if checkpoint is not None:
        agent = load_checkpoint(checkpoint)
        if getattr(agent, "n_actions", env.n_actions) != env.n_actions:
            raise ConfigurationError(
                f"checkpoint has {agent.n_actions} actions but the environment has {env.n_actions}")
    else:
        agent = make_scripted(policy, env)
    check_output_dir(out)
    n = episodes if episodes is not None else cfg["eval_episodes"]
    result = rollout(env, agent, n, base_seed=cfg["eval_seed_offset"] + cfg["base_seed"])
    write_evaluation_csv(out / "evaluation.csv", result.episodes, result.action_tags)
    write_behaviour_csv(out / "behaviour.csv", result.behaviour(), cfg["reward"])
    return result

"""Ground-truth accumulation and behavioural counters over episodes."""

from __future__ import annotations

import csv
from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable, Optional, Protocol, Sequence

import numpy as np

from .errors import EmptyInputError
from .yt import StepRecord


class Policy(Protocol):
    def act(self, observation: np.ndarray) -> int: ...


@dataclass
class EpisodeRecord:
    per_step_scores: list = field(default_factory=list)
    episodic_reward: float = 0.0
    blue_action_counts: Counter = field(default_factory=Counter)
    # CAGE only; empty for YT
    impact_count: int = 0
    first_impact_step: Optional[int] = None
    privileged_access_counts: Counter = field(default_factory=Counter)
    targeted_action_counts: Counter = field(default_factory=Counter)

    @property
    def length(self) -> int:
        return len(self.per_step_scores)

    @property
    def mean_score(self) -> float:
        if not self.per_step_scores:
            return 0.0
        return sum(self.per_step_scores) / len(self.per_step_scores)


def record_step(rec: EpisodeRecord, step: StepRecord, subnet_of=None) -> EpisodeRecord:
    """Fold one step into ``rec`` (in place) and return it.

    ``subnet_of`` maps a CAGE host id to its subnet name; it is only needed
    to break targeted blue actions down by subnet.
    """
    rec.per_step_scores.append(step.score_gt)
    rec.episodic_reward += step.reward
    tag = step.blue_action.tag
    rec.blue_action_counts[tag] += 1
    info = step.info
    if info:
        if info.get("impacted"):
            rec.impact_count += 1
            if rec.first_impact_step is None:
                rec.first_impact_step = len(rec.per_step_scores)
        subnet = info.get("privesc_subnet")
        if subnet is not None:
            rec.privileged_access_counts[getattr(subnet, "value", subnet)] += 1
    host = getattr(step.blue_action, "host", None)
    if host is not None and subnet_of is not None:
        rec.targeted_action_counts[f"{tag}:{subnet_of(host)}"] += 1
    return rec


@dataclass
class EvalDistribution:
    values: np.ndarray

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=np.float64)
        if self.values.size == 0:
            raise EmptyInputError("an evaluation distribution needs at least one value")

    @property
    def mean(self) -> float:
        return float(self.values.mean())


@dataclass
class RolloutResult:
    distribution: EvalDistribution
    episodes: list
    action_tags: tuple
    cage: bool = False

    def behaviour(self) -> dict:
        return behaviour_report(self.episodes, self.action_tags, cage=self.cage)


def _subnet_lookup(env):
    hosts = getattr(env, "hosts", None)
    if hosts is None:
        return None
    return lambda h: env.hosts[h].subnet.value


def run_episode(env, policy: Policy, seed: Optional[int] = None) -> EpisodeRecord:
    obs = env.reset(seed=seed)
    if hasattr(policy, "reset"):
        policy.reset()
    subnet_of = _subnet_lookup(env)
    rec = EpisodeRecord()
    done = False
    while not done:
        step = env.step(policy.act(obs))
        record_step(rec, step, subnet_of)
        obs = step.observation
        done = step.done
    return rec


def rollout(env, policy: Policy, episodes: int, base_seed: int = 0) -> RolloutResult:
    """Run ``episodes`` fixed-policy episodes; episode i is seeded ``base_seed + i``."""
    if episodes < 1:
        raise ValueError("episodes must be at least 1")
    records = [run_episode(env, policy, base_seed + i) for i in range(episodes)]
    dist = EvalDistribution([r.mean_score for r in records])
    return RolloutResult(dist, records, tuple(env.action_tags), cage=_subnet_lookup(env) is not None)


def behaviour_report(records: Sequence[EpisodeRecord], action_tags: Iterable[str],
                     cage: bool = False) -> dict:
    """Mean per-episode counters, keyed by metric name.

    With ``cage`` set, impact and per-subnet privileged-access counters are
    included even when they are all zero.
    """
    n = len(records)
    if n == 0:
        raise EmptyInputError("no episodes to summarise")
    out = {}
    for tag in action_tags:
        out[tag] = sum(r.blue_action_counts[tag] for r in records) / n
    targeted = sorted({k for r in records for k in r.targeted_action_counts})
    for key in targeted:
        out[key] = sum(r.targeted_action_counts[key] for r in records) / n
    if cage:
        out["impact_count"] = sum(r.impact_count for r in records) / n
        for subnet in ("user", "enterprise", "operational"):
            out[f"privileged_access:{subnet}"] = sum(
                r.privileged_access_counts[subnet] for r in records) / n
    return out


def fmt(x: float) -> str:
    return f"{x:.6f}"


def write_evaluation_csv(path, records: Sequence[EpisodeRecord], action_tags: Sequence[str]):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["episode_index", "mean_score_gt", "episodic_reward", *action_tags])
        for i, r in enumerate(records):
            w.writerow([i, fmt(r.mean_score), fmt(r.episodic_reward),
                        *(r.blue_action_counts[t] for t in action_tags)])


def read_evaluation_csv(path) -> np.ndarray:
    with open(path, newline="") as fh:
        return np.array([float(row["mean_score_gt"]) for row in csv.DictReader(fh)])


def write_behaviour_csv(path, behaviour: dict, label: str):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["metric", label])
        for key, value in behaviour.items():
            w.writerow([key, fmt(value)])


def read_behaviour_csv(path) -> tuple[str, dict]:
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        return header[1], {row[0]: float(row[1]) for row in reader}

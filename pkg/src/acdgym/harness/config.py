"""Experiment configuration: one JSON document, every hyperparameter explicit.

``defaults.json`` next to this module is the schema: a user config may only
override keys that exist there, and the merged result is what gets written
into each run directory.
"""

from __future__ import annotations

import copy
import json
from dataclasses import dataclass
from importlib import resources
from pathlib import Path
from typing import Any, Optional

from ..cage import CageConfig, CageEnv
from ..errors import ConfigurationError
from ..learners import DqnConfig, PpoConfig, QTableConfig
from ..learners.scripted import SCRIPTED_POLICIES
from ..rewards import EnvKind, RewardKind, RewardSpec
from ..yt import ActionSpace, AgentOrder, YtConfig, YtEnv

TRAINABLE = ("PPO", "DQN", "QTABLE")

# Training budget per YT network size when ``total_steps`` is null.
DEFAULT_YT_STEPS = {2: 500_000, 5: 1_000_000, 10: 1_500_000, 20: 2_000_000, 50: 2_500_000}
DEFAULT_CAGE_STEPS = 2_500_000


def _load_json_resource(name: str) -> dict:
    return json.loads(resources.files(__package__).joinpath(name).read_text())


def schema_defaults() -> dict:
    return _load_json_resource("defaults.json")


def presets() -> dict:
    return _load_json_resource("presets.json")


def _merge(base: dict, override: dict, path: str = "") -> dict:
    out = copy.deepcopy(base)
    for key, value in override.items():
        where = f"{path}{key}"
        if key not in base:
            raise ConfigurationError(f"unknown config key {where!r}")
        if isinstance(base[key], dict):
            if not isinstance(value, dict):
                raise ConfigurationError(f"config key {where!r} must be an object")
            out[key] = _merge(base[key], value, where + ".")
        else:
            out[key] = value
    return out


def default_total_steps(raw: dict) -> int:
    if raw["environment"] == "CAGE":
        return DEFAULT_CAGE_STEPS
    n = raw["yt"]["node_count"]
    if n not in DEFAULT_YT_STEPS:
        raise ConfigurationError(
            f"no default training budget for {n} nodes; set total_steps explicitly")
    return DEFAULT_YT_STEPS[n]


@dataclass
class ExperimentConfig:
    raw: dict

    def __post_init__(self):
        self.validate()

    # -- construction -------------------------------------------------------
    @classmethod
    def from_dict(cls, overrides: Optional[dict] = None, preset: Optional[str] = None,
                  changes: Optional[dict] = None):
        """Merge defaults, then ``preset``, then ``overrides``, then dotted ``changes``.

        A null ``total_steps`` is resolved last, so it follows the final
        network size.
        """
        merged = schema_defaults()
        if preset is not None:
            table = presets()
            if preset not in table:
                raise ConfigurationError(
                    f"unknown preset {preset!r}; choose from {', '.join(sorted(table))}")
            merged = _merge(merged, table[preset])
        if overrides:
            merged = _merge(merged, overrides)
        for dotted, value in (changes or {}).items():
            *parents, leaf = dotted.split(".")
            nested = {leaf: value}
            for p in reversed(parents):
                nested = {p: nested}
            merged = _merge(merged, nested)
        if merged["total_steps"] is None and merged["learner"] in TRAINABLE:
            merged["total_steps"] = default_total_steps(merged)
        return cls(merged)

    @classmethod
    def load(cls, path=None, preset: Optional[str] = None, changes: Optional[dict] = None):
        overrides = None
        if path is not None:
            try:
                overrides = json.loads(Path(path).read_text())
            except FileNotFoundError:
                raise ConfigurationError(f"config file {path} does not exist") from None
            except json.JSONDecodeError as exc:
                raise ConfigurationError(f"config file {path} is not valid JSON: {exc}") from None
            if not isinstance(overrides, dict):
                raise ConfigurationError(f"config file {path} must hold a JSON object")
        return cls.from_dict(overrides, preset, changes)

    def with_overrides(self, **changes) -> "ExperimentConfig":
        """Copy with top-level or dotted keys (``"yt.node_count"``) replaced."""
        raw = copy.deepcopy(self.raw)
        for dotted, value in changes.items():
            node = raw
            *parents, leaf = dotted.split(".")
            for p in parents:
                node = node[p]
            if leaf not in node:
                raise ConfigurationError(f"unknown config key {dotted!r}")
            node[leaf] = value
        return ExperimentConfig(raw)

    def to_json(self) -> str:
        return json.dumps(self.raw, indent=2, sort_keys=True) + "\n"

    # -- validation ---------------------------------------------------------
    def validate(self):
        r = self.raw
        try:
            EnvKind(r["environment"])
        except ValueError:
            raise ConfigurationError(f"environment must be YT or CAGE, got {r['environment']!r}") from None
        try:
            RewardSpec.parse(r["reward"], r["environment"])
        except (ValueError, KeyError) as exc:
            raise ConfigurationError(f"bad reward {r['reward']!r}: {exc}") from None
        if r["environment"] == "YT":
            y = r["yt"]
            if not isinstance(y["node_count"], int) or y["node_count"] < 2:
                raise ConfigurationError("yt.node_count must be an integer >= 2")
            for key, enum in (("action_space", ActionSpace), ("agent_order", AgentOrder)):
                try:
                    enum[y[key]]
                except KeyError:
                    raise ConfigurationError(
                        f"yt.{key} must be one of {[e.name for e in enum]}") from None
            if not 0.0 <= y["red_attack_probability"] <= 1.0:
                raise ConfigurationError("yt.red_attack_probability must lie in [0, 1]")
        learner = r["learner"]
        if learner not in TRAINABLE and learner not in SCRIPTED_POLICIES:
            raise ConfigurationError(
                f"learner must be one of {list(TRAINABLE) + sorted(SCRIPTED_POLICIES)}, got {learner!r}")
        if learner in TRAINABLE:
            if not isinstance(r["total_steps"], int) or r["total_steps"] <= 0:
                raise ConfigurationError("total_steps must be a positive integer")
        for key in ("runs", "eval_episodes", "eval_interval", "eval_interval_episodes", "workers"):
            if not isinstance(r[key], int) or r[key] < 1:
                raise ConfigurationError(f"{key} must be a positive integer")
        if self.episode_length < 1:
            raise ConfigurationError("episode_length must be positive")
        if r["dt_window"] is not None and (not isinstance(r["dt_window"], int) or r["dt_window"] < 2):
            raise ConfigurationError("dt_window must be null or an integer >= 2")
        # Fail early on bad learner hyperparameters.
        self.learner_config()

    # -- accessors ----------------------------------------------------------
    def __getitem__(self, key: str) -> Any:
        return self.raw[key]

    @property
    def environment(self) -> str:
        return self.raw["environment"]

    @property
    def learner(self) -> str:
        return self.raw["learner"]

    @property
    def episode_length(self) -> int:
        return self.raw["yt" if self.environment == "YT" else "cage"]["episode_length"]

    @property
    def is_scripted(self) -> bool:
        return self.learner not in TRAINABLE

    def group_key(self) -> tuple:
        """Report grouping: (reward, environment, order, size)."""
        if self.environment == "YT":
            y = self.raw["yt"]
            return (self.raw["reward"], "YT", y["agent_order"], y["node_count"])
        return (self.raw["reward"], "CAGE", "RED_THEN_BLUE", 13)

    def learner_config(self):
        section = {"PPO": "ppo", "DQN": "dqn", "QTABLE": "qtable"}.get(self.learner)
        if section is None:
            return None
        cls = {"ppo": PpoConfig, "dqn": DqnConfig, "qtable": QTableConfig}[section]
        try:
            return cls(**self.raw[section])
        except (TypeError, ValueError) as exc:
            raise ConfigurationError(f"bad {section} settings: {exc}") from None

    def make_env(self, seed: int):
        reward = RewardKind[self.raw["reward"]]
        if self.environment == "YT":
            y = self.raw["yt"]
            return YtEnv(YtConfig(
                node_count=y["node_count"],
                action_space=ActionSpace[y["action_space"]],
                agent_order=AgentOrder[y["agent_order"]],
                episode_length=y["episode_length"],
                red_attack_probability=y["red_attack_probability"],
                reward=reward,
                rng_seed=seed,
            ))
        return CageEnv(CageConfig(
            episode_length=self.raw["cage"]["episode_length"], reward=reward, rng_seed=seed))

"""Tabular Q-learning keyed on the binary part of the observation."""

from __future__ import annotations

from dataclasses import asdict, dataclass
from typing import Callable, Optional

import numpy as np

from .dqn import linear_epsilon


@dataclass
class QTableConfig:
    learning_rate: float = 0.1
    gamma: float = 0.99
    exploration_initial_eps: float = 1.0
    exploration_final_eps: float = 0.01
    exploration_fraction: float = 0.5

    def to_dict(self) -> dict:
        return asdict(self)


def yt_state_key(obs: np.ndarray) -> int:
    """Compromise bitmask (bit i set when node i is compromised) from a YT observation."""
    n = int(round(np.sqrt(obs.size + 1))) - 1
    key = 0
    for i, bit in enumerate(obs[-n:]):
        if bit > 0.5:
            key |= 1 << i
    return key


def bits_state_key(obs: np.ndarray) -> int:
    """Pack a 0/1 observation vector (e.g. CAGE's 52 bits) into an integer."""
    key = 0
    for i, bit in enumerate(obs):
        if bit > 0.5:
            key |= 1 << i
    return key


class QTable:
    def __init__(self, n_actions: int, config: Optional[QTableConfig] = None, seed: int = 0,
                 key_fn: Callable[[np.ndarray], int] = yt_state_key):
        self.n_actions = n_actions
        self.config = config or QTableConfig()
        self.rng = np.random.default_rng(seed)
        self.key_fn = key_fn
        self.values: dict[int, np.ndarray] = {}
        self.epsilon = self.config.exploration_initial_eps

    def q(self, key: int) -> np.ndarray:
        row = self.values.get(key)
        if row is None:
            row = self.values[key] = np.zeros(self.n_actions)
        return row

    def act(self, obs: np.ndarray) -> int:
        return int(np.argmax(self.q(self.key_fn(obs))))

    def explore(self, obs: np.ndarray) -> int:
        if self.rng.random() < self.epsilon:
            return int(self.rng.integers(self.n_actions))
        return self.act(obs)

    def update(self, s: int, a: int, r: float, s_next: int, done: bool) -> float:
        cfg = self.config
        bootstrap = 0.0 if done else cfg.gamma * float(self.q(s_next).max())
        row = self.q(s)
        td = r + bootstrap - row[a]
        row[a] += cfg.learning_rate * td
        return td

    def learn(self, env, total_steps: int, on_step: Optional[Callable[[int], None]] = None):
        cfg = self.config
        obs = env.reset()
        key = self.key_fn(obs)
        for step in range(1, total_steps + 1):
            self.epsilon = linear_epsilon(step - 1, total_steps, cfg.exploration_initial_eps,
                                          cfg.exploration_final_eps, cfg.exploration_fraction)
            action = self.explore(obs)
            rec = env.step(action)
            next_key = self.key_fn(rec.observation)
            self.update(key, action, rec.reward, next_key, rec.done)
            if rec.done:
                obs = env.reset()
                key = self.key_fn(obs)
            else:
                obs, key = rec.observation, next_key
            if on_step is not None:
                on_step(step)
        self.epsilon = cfg.exploration_final_eps
        return self

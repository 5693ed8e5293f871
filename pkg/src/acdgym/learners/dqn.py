"""Deep Q-network with experience replay and a periodically synced target net."""

from __future__ import annotations

from dataclasses import asdict, dataclass
from typing import Callable, Optional

import numpy as np

from .mlp import Adam, Mlp, clip_grad_norm


@dataclass
class DqnConfig:
    learning_rate: float = 1e-4
    batch_size: int = 32
    gamma: float = 0.99
    train_freq: int = 4
    gradient_steps: int = 1
    buffer_size: int = 200_000
    learning_starts: int = 100
    target_update_interval: int = 10_000
    exploration_fraction: float = 0.1
    exploration_initial_eps: float = 1.0
    exploration_final_eps: float = 0.005
    max_grad_norm: float = 10.0
    hidden_sizes: tuple = (64, 64)

    def __post_init__(self):
        self.hidden_sizes = tuple(self.hidden_sizes)
        if self.buffer_size < self.batch_size:
            raise ValueError("buffer_size must be at least batch_size")

    def to_dict(self) -> dict:
        d = asdict(self)
        d["hidden_sizes"] = list(self.hidden_sizes)
        return d


def linear_epsilon(step: int, total_steps: int, initial: float, final: float,
                   fraction: float) -> float:
    """Linear decay from ``initial`` to ``final`` over ``fraction * total_steps`` steps."""
    horizon = fraction * total_steps
    if horizon <= 0 or step >= horizon:
        return final
    return initial + (final - initial) * step / horizon


def dqn_targets(rewards, next_q_target, dones, gamma: float) -> np.ndarray:
    """``r + gamma * (1 - done) * max_a Q_target(s', a)``."""
    rewards = np.asarray(rewards, dtype=np.float64)
    dones = np.asarray(dones, dtype=np.float64)
    best_next = np.asarray(next_q_target, dtype=np.float64).max(axis=-1)
    return rewards + gamma * (1.0 - dones) * best_next


class ReplayBuffer:
    def __init__(self, capacity: int, obs_size: int):
        self.capacity = capacity
        self.obs = np.zeros((capacity, obs_size))
        self.next_obs = np.zeros((capacity, obs_size))
        self.actions = np.zeros(capacity, dtype=np.int64)
        self.rewards = np.zeros(capacity)
        self.dones = np.zeros(capacity)
        self.pos = 0
        self.full = False

    def add(self, obs, action, reward, next_obs, done):
        i = self.pos
        self.obs[i] = obs
        self.actions[i] = action
        self.rewards[i] = reward
        self.next_obs[i] = next_obs
        self.dones[i] = done
        self.pos = (i + 1) % self.capacity
        self.full = self.full or self.pos == 0

    def __len__(self):
        return self.capacity if self.full else self.pos

    def sample(self, batch_size: int, rng: np.random.Generator):
        if len(self) < batch_size:
            raise ValueError(f"replay buffer holds {len(self)} transitions, need {batch_size}")
        idx = rng.integers(0, len(self), size=batch_size)
        return self.obs[idx], self.actions[idx], self.rewards[idx], self.next_obs[idx], self.dones[idx]


class DqnAgent:
    def __init__(self, obs_size: int, n_actions: int, config: Optional[DqnConfig] = None,
                 seed: int = 0):
        self.config = config or DqnConfig()
        self.obs_size = obs_size
        self.n_actions = n_actions
        self.rng = np.random.default_rng(seed)
        sizes = [obs_size, *self.config.hidden_sizes, n_actions]
        self.q_net = Mlp(sizes, "relu", self.rng)
        self.target_net = Mlp(sizes, "relu", self.rng)
        self.target_net.copy_from(self.q_net)
        self.optimizer = Adam(self.q_net.params, self.config.learning_rate)
        self.epsilon = self.config.exploration_initial_eps

    def act(self, obs: np.ndarray) -> int:
        return int(np.argmax(self.q_net.predict(obs)))

    def explore(self, obs: np.ndarray) -> int:
        if self.rng.random() < self.epsilon:
            return int(self.rng.integers(self.n_actions))
        return self.act(obs)

    def update(self, batch) -> float:
        obs, actions, rewards, next_obs, dones = batch
        B = obs.shape[0]
        targets = dqn_targets(rewards, self.target_net.predict(next_obs), dones, self.config.gamma)
        q = self.q_net.forward(obs)
        idx = np.arange(B)
        err = q[idx, actions] - targets
        grad = np.zeros_like(q)
        grad[idx, actions] = 2.0 * err / B
        grads = self.q_net.backward(grad)
        clip_grad_norm(grads, self.config.max_grad_norm)
        self.optimizer.step(grads)
        return float(np.mean(err ** 2))

    def sync_target(self):
        self.target_net.copy_from(self.q_net)

    def learn(self, env, total_steps: int, on_step: Optional[Callable[[int], None]] = None):
        cfg = self.config
        buffer = ReplayBuffer(min(cfg.buffer_size, max(total_steps, cfg.batch_size)), self.obs_size)
        obs = env.reset()
        for step in range(1, total_steps + 1):
            self.epsilon = linear_epsilon(step - 1, total_steps, cfg.exploration_initial_eps,
                                          cfg.exploration_final_eps, cfg.exploration_fraction)
            action = self.explore(obs)
            rec = env.step(action)
            buffer.add(obs, action, rec.reward, rec.observation, rec.done)
            obs = env.reset() if rec.done else rec.observation
            if step > cfg.learning_starts and step % cfg.train_freq == 0 and len(buffer) >= cfg.batch_size:
                for _ in range(cfg.gradient_steps):
                    self.update(buffer.sample(cfg.batch_size, self.rng))
            if step % cfg.target_update_interval == 0:
                self.sync_target()
            if on_step is not None:
                on_step(step)
        self.epsilon = cfg.exploration_final_eps
        return self

    def networks(self) -> dict:
        return {"q_net": self.q_net, "target_net": self.target_net}

"""Proximal policy optimisation with a clipped surrogate and GAE."""

from __future__ import annotations

from dataclasses import asdict, dataclass
from typing import Callable, Optional

import numpy as np

from .mlp import Adam, Mlp, clip_grad_norm


@dataclass
class PpoConfig:
    learning_rate: float = 3e-4
    n_steps: int = 2048
    batch_size: int = 64
    n_epochs: int = 10
    gamma: float = 0.99
    gae_lambda: float = 0.95
    clip_range: float = 0.2
    value_coef: float = 0.5
    entropy_coef: float = 0.0
    max_grad_norm: float = 0.5
    hidden_sizes: tuple = (64, 64)

    def __post_init__(self):
        self.hidden_sizes = tuple(self.hidden_sizes)
        if not 0.0 < self.gamma <= 1.0:
            raise ValueError("gamma must lie in (0, 1]")
        if not 0.0 <= self.gae_lambda <= 1.0:
            raise ValueError("gae_lambda must lie in [0, 1]")
        if self.clip_range <= 0.0:
            raise ValueError("clip_range must be positive")

    def to_dict(self) -> dict:
        d = asdict(self)
        d["hidden_sizes"] = list(self.hidden_sizes)
        return d


def gae_advantages(rewards, values, dones, last_value: float, gamma: float, lam: float):
    """Generalised advantage estimates and value targets.

    ``dones[t]`` marks that the episode ended after step ``t``, so the
    value of the following state is not bootstrapped.  ``last_value`` is
    V of the state after the final step.
    """
    rewards = np.asarray(rewards, dtype=np.float64)
    values = np.asarray(values, dtype=np.float64)
    dones = np.asarray(dones, dtype=np.float64)
    if not (rewards.shape == values.shape == dones.shape):
        raise ValueError("rewards, values and dones must have equal length")
    T = rewards.size
    adv = np.zeros(T)
    next_value = float(last_value)
    running = 0.0
    for t in range(T - 1, -1, -1):
        not_done = 1.0 - dones[t]
        delta = rewards[t] + gamma * next_value * not_done - values[t]
        running = delta + gamma * lam * not_done * running
        adv[t] = running
        next_value = values[t]
    return adv, adv + values


def softmax(logits: np.ndarray) -> np.ndarray:
    z = logits - logits.max(axis=-1, keepdims=True)
    e = np.exp(z)
    return e / e.sum(axis=-1, keepdims=True)


def clipped_surrogate(ratio, advantages, clip_range: float) -> np.ndarray:
    """Per-sample ``min(r * A, clip(r, 1 - eps, 1 + eps) * A)``."""
    ratio = np.asarray(ratio, dtype=np.float64)
    advantages = np.asarray(advantages, dtype=np.float64)
    return np.minimum(ratio * advantages,
                      np.clip(ratio, 1.0 - clip_range, 1.0 + clip_range) * advantages)


class RolloutBuffer:
    def __init__(self, size: int, obs_size: int):
        self.obs = np.zeros((size, obs_size))
        self.actions = np.zeros(size, dtype=np.int64)
        self.rewards = np.zeros(size)
        self.dones = np.zeros(size)
        self.values = np.zeros(size)
        self.log_probs = np.zeros(size)
        self.pos = 0

    def add(self, obs, action, reward, done, value, log_prob):
        i = self.pos
        self.obs[i] = obs
        self.actions[i] = action
        self.rewards[i] = reward
        self.dones[i] = done
        self.values[i] = value
        self.log_probs[i] = log_prob
        self.pos += 1

    def __len__(self):
        return self.pos


class PpoAgent:
    def __init__(self, obs_size: int, n_actions: int, config: Optional[PpoConfig] = None,
                 seed: int = 0):
        self.config = config or PpoConfig()
        self.obs_size = obs_size
        self.n_actions = n_actions
        self.rng = np.random.default_rng(seed)
        hidden = list(self.config.hidden_sizes)
        self.actor = Mlp([obs_size, *hidden, n_actions], "tanh", self.rng, output_gain=0.01)
        self.critic = Mlp([obs_size, *hidden, 1], "tanh", self.rng, output_gain=1.0)
        self.optimizer = Adam(self.actor.params + self.critic.params, self.config.learning_rate)

    # -- acting -------------------------------------------------------------
    def act(self, obs: np.ndarray) -> int:
        """Greedy action, used for evaluation."""
        return int(np.argmax(self.actor.predict(obs)))

    def sample(self, obs: np.ndarray):
        probs = softmax(self.actor.predict(obs))
        action = int(np.searchsorted(np.cumsum(probs), self.rng.random() * probs.sum()))
        action = min(action, self.n_actions - 1)
        value = float(self.critic.predict(obs)[0])
        return action, float(np.log(probs[action] + 1e-12)), value

    def value(self, obs: np.ndarray) -> float:
        return float(self.critic.predict(obs)[0])

    # -- learning -----------------------------------------------------------
    def minibatch_step(self, obs, actions, old_log_probs, advantages, returns) -> dict:
        cfg = self.config
        B = obs.shape[0]
        if B > 1:
            advantages = (advantages - advantages.mean()) / (advantages.std(ddof=1) + 1e-8)

        logits = self.actor.forward(obs)
        probs = softmax(logits)
        idx = np.arange(B)
        log_p = np.log(probs[idx, actions] + 1e-12)
        ratio = np.exp(log_p - old_log_probs)
        unclipped = ratio * advantages
        clipped = np.clip(ratio, 1.0 - cfg.clip_range, 1.0 + cfg.clip_range) * advantages
        policy_loss = -np.mean(np.minimum(unclipped, clipped))
        # gradient only flows where the unclipped branch is the active minimum
        active = unclipped <= clipped
        d_logp = np.where(active, -advantages * ratio, 0.0) / B
        one_hot = np.zeros_like(probs)
        one_hot[idx, actions] = 1.0
        d_logits = d_logp[:, None] * (one_hot - probs)

        log_probs_all = np.log(probs + 1e-12)
        entropy = -np.sum(probs * log_probs_all, axis=1)
        if cfg.entropy_coef:
            d_ent = -probs * (log_probs_all + entropy[:, None])
            d_logits -= cfg.entropy_coef * d_ent / B
        actor_grads = self.actor.backward(d_logits)

        values = self.critic.forward(obs)[:, 0]
        value_loss = np.mean((returns - values) ** 2)
        d_values = cfg.value_coef * 2.0 * (values - returns) / B
        critic_grads = self.critic.backward(d_values[:, None])

        grads = actor_grads + critic_grads
        clip_grad_norm(grads, cfg.max_grad_norm)
        self.optimizer.step(grads)
        return {
            "policy_loss": float(policy_loss),
            "value_loss": float(value_loss),
            "entropy": float(entropy.mean()),
            "clip_fraction": float(np.mean(np.abs(ratio - 1.0) > cfg.clip_range)),
        }

    def update(self, buffer: RolloutBuffer, last_value: float) -> dict:
        n = len(buffer)
        if n == 0:
            raise ValueError("cannot update from an empty rollout buffer")
        cfg = self.config
        adv, returns = gae_advantages(buffer.rewards[:n], buffer.values[:n], buffer.dones[:n],
                                      last_value, cfg.gamma, cfg.gae_lambda)
        stats = []
        for _ in range(cfg.n_epochs):
            order = self.rng.permutation(n)
            for start in range(0, n, cfg.batch_size):
                mb = order[start:start + cfg.batch_size]
                stats.append(self.minibatch_step(buffer.obs[mb], buffer.actions[mb],
                                                 buffer.log_probs[mb], adv[mb], returns[mb]))
        return {k: float(np.mean([s[k] for s in stats])) for k in stats[0]}

    def learn(self, env, total_steps: int, on_step: Optional[Callable[[int], None]] = None):
        cfg = self.config
        obs = env.reset()
        step = 0
        while step < total_steps:
            horizon = min(cfg.n_steps, total_steps - step)
            buffer = RolloutBuffer(horizon, self.obs_size)
            for _ in range(horizon):
                action, log_prob, value = self.sample(obs)
                rec = env.step(action)
                buffer.add(obs, action, rec.reward, rec.done, value, log_prob)
                obs = env.reset() if rec.done else rec.observation
                step += 1
                if on_step is not None:
                    on_step(step)
            last_value = 0.0 if buffer.dones[horizon - 1] else self.value(obs)
            self.update(buffer, last_value)
        return self

    # -- persistence --------------------------------------------------------
    def networks(self) -> dict:
        return {"actor": self.actor, "critic": self.critic}

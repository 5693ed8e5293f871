"""Independent reference implementations used to cross-check the package.

Nothing here imports from ``acdgym``: each oracle recomputes its quantity
from first principles (sorting and enumeration, plain loops).
"""

from __future__ import annotations

import itertools
import math


def quantile(values, q):
    """Linear interpolation between order statistics at position (n - 1) * q."""
    xs = sorted(float(v) for v in values)
    n = len(xs)
    h = (n - 1) * q
    lo = math.floor(h)
    hi = min(lo + 1, n - 1)
    return xs[lo] + (h - lo) * (xs[hi] - xs[lo])


def iqr(values):
    return quantile(values, 0.75) - quantile(values, 0.25)


def cvar_lower(values, alpha):
    v = quantile(values, alpha)
    tail = [x for x in sorted(values) if x <= v] or [min(values)]
    return sum(tail) / len(tail)


def cvar_upper(values, alpha):
    v = quantile(values, 1.0 - alpha)
    tail = [x for x in sorted(values) if x >= v] or [max(values)]
    return sum(tail) / len(tail)


def dt(curve, window):
    diffs = [curve[i + 1] - curve[i] for i in range(len(curve) - 1)]
    scores = [iqr(diffs[i:i + window]) for i in range(len(diffs) - window + 1)]
    return sum(scores) / len(scores)


def dr_prime(runs, fraction=0.2):
    means = []
    for r in runs:
        k = max(1, math.ceil(fraction * len(r)))
        tail = r[-k:]
        means.append(sum(tail) / len(tail))
    mu = sum(means) / len(means)
    sigma = math.sqrt(sum((m - mu) ** 2 for m in means) / len(means))
    if sigma == 0:
        return 0.0
    return iqr([(m - mu) / sigma for m in means])


def mc_advantages(rewards, values, dones, last_value, gamma):
    """Discounted return to the end of each episode segment, minus V(s)."""
    n = len(rewards)
    out = []
    for t in range(n):
        g, discount, k = 0.0, 1.0, t
        while True:
            g += discount * rewards[k]
            if dones[k]:
                break
            if k == n - 1:
                g += discount * gamma * last_value
                break
            discount *= gamma
            k += 1
        out.append(g - values[t])
    return out


def finite_difference(f, params, h=1e-5):
    """Central differences of scalar ``f()`` w.r.t. every entry of every array."""
    grads = []
    for p in params:
        g = []
        # index in place; reshape could silently return a copy for
        # non-contiguous arrays
        for idx in itertools.product(*(range(d) for d in p.shape)):
            old = p[idx]
            p[idx] = old + h
            up = f()
            p[idx] = old - h
            down = f()
            p[idx] = old
            g.append((up - down) / (2 * h))
        grads.append(g)
    return grads


class _Rec:
    def __init__(self, observation, reward, done):
        self.observation = observation
        self.reward = reward
        self.done = done


class OneHotChain:
    """Deterministic chain s0 -> s1 -> ... -> terminal with one-hot observations.

    ``rewards[s][a]`` is paid for taking action ``a`` in state ``s``; action 0
    advances, any other action also advances (so values are easy to derive).
    A length-1 chain is a contextual-free bandit.
    """

    def __init__(self, rewards):
        self.rewards = rewards
        self.n_states = len(rewards)
        self.n_actions = len(rewards[0])
        self.observation_size = self.n_states
        self.s = 0

    def _obs(self):
        import numpy as np
        o = np.zeros(self.n_states)
        o[min(self.s, self.n_states - 1)] = 1.0
        return o

    def reset(self, seed=None):
        self.s = 0
        return self._obs()

    def step(self, action):
        r = self.rewards[self.s][int(action)]
        self.s += 1
        done = self.s >= self.n_states
        return _Rec(self._obs(), r, done)


def chain_optimal_q(rewards, gamma):
    """Q*(s, a) for OneHotChain by backward induction."""
    q = [[0.0] * len(rewards[0]) for _ in rewards]
    v_next = 0.0
    for s in range(len(rewards) - 1, -1, -1):
        for a in range(len(rewards[0])):
            q[s][a] = rewards[s][a] + gamma * v_next
        v_next = max(q[s])
    return q

"""Hand-written blue policies used as baselines and analytic-optimum checks.

All of them act on the observation vector alone, like a learned policy.
"""

from __future__ import annotations

import numpy as np

from ..cage import N_HOSTS, Monitor, Restore
from ..errors import ConfigurationError
from ..yt import PlaceDecoy, RestoreNode, ScanNetwork


def _yt_node_count(obs: np.ndarray) -> int:
    return int(round(np.sqrt(obs.size + 1))) - 1


def _frontier(compromised: np.ndarray, adjacency: np.ndarray, entry: int):
    """Red's next target given end-of-step compromise bits (None if saturated)."""
    for i in range(compromised.size):
        if compromised[i]:
            continue
        if i == entry or (adjacency[i] & compromised).any():
            return i
    return None


class YtPolicy:
    def __init__(self, env):
        self.env = env
        self.entry = env.topology.entry_node

    def _split(self, obs):
        n = _yt_node_count(obs)
        adjacency = obs[: n * n].reshape(n, n) > 0.5
        compromised = obs[-n:] > 0.5
        return adjacency, compromised


class NoOpBlue(YtPolicy):
    def act(self, obs):
        return self.env.encode_action(ScanNetwork())


class RestoreFrontier(YtPolicy):
    """Restore the lowest-index compromised node.

    On a clean network it restores the node red will attack next, which
    undoes that attack within the step when red moves first.
    """

    def act(self, obs):
        adjacency, compromised = self._split(obs)
        hits = np.flatnonzero(compromised)
        if hits.size:
            return self.env.encode_action(RestoreNode(int(hits[0])))
        target = _frontier(compromised, adjacency, self.entry)
        if target is None:
            return self.env.encode_action(ScanNetwork())
        return self.env.encode_action(RestoreNode(target))


class DecoyFrontier(YtPolicy):
    """Decoy red's next target; restore first if anything is compromised."""

    def act(self, obs):
        adjacency, compromised = self._split(obs)
        hits = np.flatnonzero(compromised)
        if hits.size:
            return self.env.encode_action(RestoreNode(int(hits[0])))
        target = _frontier(compromised, adjacency, self.entry)
        if target is None:
            return self.env.encode_action(ScanNetwork())
        return self.env.encode_action(PlaceDecoy(target))


class SleepBlue:
    def __init__(self, env=None):
        self.env = env

    def act(self, obs):
        return 0


class RestoreKnown:
    """Restore the deepest host whose access bits show anything; otherwise monitor."""

    def __init__(self, env):
        self.env = env

    def act(self, obs):
        for host in range(N_HOSTS - 1, -1, -1):
            if obs[4 * host + 2] > 0.5 or obs[4 * host + 3] > 0.5:
                return self.env.encode_action(Restore(host))
        return self.env.encode_action(Monitor())


class RandomBlue:
    def __init__(self, env, seed: int = 0):
        self.n_actions = env.n_actions
        self.rng = np.random.default_rng(seed)

    def act(self, obs):
        return int(self.rng.integers(self.n_actions))


YT_SCRIPTED = {"NoOpBlue": NoOpBlue, "RestoreFrontier": RestoreFrontier, "DecoyFrontier": DecoyFrontier}
CAGE_SCRIPTED = {"SleepBlue": SleepBlue, "RestoreKnown": RestoreKnown}
SCRIPTED_POLICIES = {**YT_SCRIPTED, **CAGE_SCRIPTED}


def make_scripted(name: str, env):
    table = YT_SCRIPTED if env.environment.value == "YT" else CAGE_SCRIPTED
    try:
        return table[name](env)
    except KeyError:
        raise ConfigurationError(
            f"no scripted policy {name!r} for {env.environment.value}; choose from {sorted(table)}"
        ) from None

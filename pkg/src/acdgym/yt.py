"""Yawning-Titan-style linear network environment.

Red and blue each take one sub-action per step, in an order fixed by
``AgentOrder``.  The compromised-node count is sampled after every
sub-action so that compromises which are remediated within the same step
still show up in the ground-truth score.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, Optional, Union

import numpy as np

from .errors import EpisodeFinishedError, InvalidActionError
from .net import NetworkState, Topology, compromised_count, make_linear_topology
from .rewards import EnvKind, RewardKind, RewardSpec, TransitionSummary, reward_yt


class ActionSpace(str, Enum):
    BASIC = "BASIC"
    EXTENDED = "EXTENDED"


class AgentOrder(str, Enum):
    RED_THEN_BLUE = "RED_THEN_BLUE"
    BLUE_THEN_RED = "BLUE_THEN_RED"
    RANDOM = "RANDOM"


# ---------------------------------------------------------------------------
# actions
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ScanNetwork:
    tag = "scan_network"


@dataclass(frozen=True)
class RestoreNode:
    target: int
    tag = "restore_node"


@dataclass(frozen=True)
class PlaceDecoy:
    target: int
    tag = "place_decoy"


BlueActionYt = Union[ScanNetwork, RestoreNode, PlaceDecoy]


@dataclass(frozen=True)
class DoNothing:
    tag = "do_nothing"


@dataclass(frozen=True)
class BasicAttack:
    target: int
    tag = "basic_attack"


RedActionYt = Union[DoNothing, BasicAttack]

YT_ACTION_TAGS = ("scan_network", "restore_node", "place_decoy")


@dataclass
class YtConfig:
    node_count: int
    action_space: ActionSpace = ActionSpace.BASIC
    agent_order: AgentOrder = AgentOrder.RED_THEN_BLUE
    episode_length: int = 100
    red_attack_probability: float = 0.9
    reward: RewardKind = RewardKind.SP
    rng_seed: int = 0

    def __post_init__(self):
        self.action_space = ActionSpace(self.action_space)
        self.agent_order = AgentOrder(self.agent_order)
        self.reward = RewardKind(self.reward)
        if not 0.0 <= self.red_attack_probability <= 1.0:
            raise ValueError("red_attack_probability must lie in [0, 1]")
        if self.episode_length < 1:
            raise ValueError("episode_length must be at least 1")
        if self.reward is RewardKind.SPN and self.node_count < 2:
            # +1 and -1 would fire together on a single node
            raise ValueError("SPN needs at least two nodes")


@dataclass
class StepRecord:
    m_intra: int
    m_end: int
    score_gt: int
    reward: float
    blue_action: object
    red_action: object
    observation: np.ndarray
    done: bool
    info: dict = field(default_factory=dict)


# ---------------------------------------------------------------------------
# red agent
# ---------------------------------------------------------------------------

def red_frontier(state: NetworkState) -> Optional[int]:
    """Lowest-index clean node that is the entry node or touches a compromised node."""
    topo = state.topology
    statuses = state.statuses
    for i, s in enumerate(statuses):
        if s.compromised:
            continue
        if i == topo.entry_node:
            return i
        for j in topo.neighbours(i):
            if statuses[j].compromised:
                return i
    return None


def red_target(state: NetworkState, roll: float, attack_probability: float = 0.9) -> RedActionYt:
    """Red's action given a uniform ``roll`` in [0, 1).

    The roll is passed in rather than drawn here so that the caller controls
    exactly one RNG draw per step.
    """
    if roll >= attack_probability:
        return DoNothing()
    target = red_frontier(state)
    if target is None:
        return DoNothing()
    return BasicAttack(target)


def apply_red(state: NetworkState, action: RedActionYt) -> NetworkState:
    """Apply a red action in place; decoys absorb an attack and are consumed."""
    if isinstance(action, BasicAttack):
        status = state.statuses[action.target]
        if status.decoy_active:
            status.decoy_active = False
        else:
            status.compromised = True
    return state


def apply_blue(state: NetworkState, action: BlueActionYt,
               action_space: ActionSpace = ActionSpace.EXTENDED) -> NetworkState:
    """Apply a blue action in place."""
    n = state.topology.node_count
    if isinstance(action, ScanNetwork):
        return state
    if isinstance(action, (RestoreNode, PlaceDecoy)):
        if not 0 <= action.target < n:
            raise InvalidActionError(f"target {action.target} out of range for {n} nodes")
        status = state.statuses[action.target]
        if isinstance(action, RestoreNode):
            status.compromised = False
            return state
        if action_space is not ActionSpace.EXTENDED:
            raise InvalidActionError("place decoy requires the extended action space")
        if not status.compromised:
            status.decoy_active = True
        return state
    raise InvalidActionError(f"unknown blue action {action!r}")


# ---------------------------------------------------------------------------
# environment
# ---------------------------------------------------------------------------

class YtEnv:
    """Linear-topology defence environment with intra-step ground-truth tracking."""

    environment = EnvKind.YT

    def __init__(self, config: YtConfig, topology: Optional[Topology] = None):
        self.config = config
        self.topology = topology or make_linear_topology(config.node_count)
        self.reward_spec = RewardSpec(config.reward, EnvKind.YT)
        self.rng = np.random.default_rng(config.rng_seed)
        n = self.topology.node_count
        self.n_actions = 1 + n + (n if config.action_space is ActionSpace.EXTENDED else 0)
        self.observation_size = n * n + 2 * n
        self._obs_prefix = self.topology.adjacency.astype(np.float64).ravel()
        # called with the state at the start of every step; used by tests
        self.step_start_hook: Optional[Callable[[NetworkState], None]] = None
        self.state = NetworkState.clean(self.topology)
        self.t = 0
        self.done = False
        self.first_red = True
        self._draw_initial_order()

    # -- episode control ----------------------------------------------------
    def _draw_initial_order(self):
        order = self.config.agent_order
        if order is AgentOrder.RANDOM:
            self.first_red = bool(self.rng.random() < 0.5)
        else:
            self.first_red = order is AgentOrder.RED_THEN_BLUE

    def reset(self, seed: Optional[int] = None) -> np.ndarray:
        if seed is not None:
            self.rng = np.random.default_rng(seed)
        self.state = NetworkState.clean(self.topology)
        self.t = 0
        self.done = False
        self._draw_initial_order()
        return self.observe()

    def red_moves_first(self, t: Optional[int] = None) -> bool:
        t = self.t if t is None else t
        if self.config.agent_order is AgentOrder.RANDOM:
            return self.first_red if t % 2 == 0 else not self.first_red
        return self.first_red

    # -- action encoding ----------------------------------------------------
    def decode_action(self, index: int) -> BlueActionYt:
        n = self.topology.node_count
        index = int(index)
        if index == 0:
            return ScanNetwork()
        if 1 <= index <= n:
            return RestoreNode(index - 1)
        if self.config.action_space is ActionSpace.EXTENDED and n < index <= 2 * n:
            return PlaceDecoy(index - 1 - n)
        raise InvalidActionError(f"action index {index} outside [0, {self.n_actions})")

    def encode_action(self, action: BlueActionYt) -> int:
        n = self.topology.node_count
        if isinstance(action, ScanNetwork):
            return 0
        if isinstance(action, RestoreNode):
            return 1 + action.target
        if isinstance(action, PlaceDecoy):
            if self.config.action_space is not ActionSpace.EXTENDED:
                raise InvalidActionError("place decoy requires the extended action space")
            return 1 + n + action.target
        raise InvalidActionError(f"unknown blue action {action!r}")

    @property
    def action_tags(self) -> tuple[str, ...]:
        if self.config.action_space is ActionSpace.EXTENDED:
            return YT_ACTION_TAGS
        return YT_ACTION_TAGS[:2]

    # -- dynamics -----------------------------------------------------------
    def observe(self) -> np.ndarray:
        statuses = self.state.statuses
        vuln = [s.vulnerability for s in statuses]
        comp = [1.0 if s.compromised else 0.0 for s in statuses]
        return np.concatenate([self._obs_prefix, vuln, comp])

    def step(self, action: Union[int, BlueActionYt]) -> StepRecord:
        if self.done:
            raise EpisodeFinishedError("episode is finished; call reset()")
        blue = self.decode_action(action) if isinstance(action, (int, np.integer)) else action
        state = self.state
        if self.step_start_hook is not None:
            self.step_start_hook(state)

        roll = self.rng.random()
        space = self.config.action_space
        p_attack = self.config.red_attack_probability
        samples = []
        red = DoNothing()
        if self.red_moves_first():
            red = red_target(state, roll, p_attack)
            apply_red(state, red)
            samples.append(compromised_count(state))
            apply_blue(state, blue, space)
            samples.append(compromised_count(state))
        else:
            apply_blue(state, blue, space)
            samples.append(compromised_count(state))
            red = red_target(state, roll, p_attack)
            apply_red(state, red)
            samples.append(compromised_count(state))

        for s in state.statuses:
            s.decoy_active = False

        m_intra = max(samples)
        m_end = samples[-1]
        summary = TransitionSummary(m_end, self.topology.node_count, blue.tag)
        reward = reward_yt(self.reward_spec, summary)
        self.t += 1
        self.done = self.t >= self.config.episode_length
        return StepRecord(
            m_intra=m_intra,
            m_end=m_end,
            score_gt=max(m_intra, m_end),
            reward=reward,
            blue_action=blue,
            red_action=red,
            observation=self.observe(),
            done=self.done,
        )

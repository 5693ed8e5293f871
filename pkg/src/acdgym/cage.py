"""CAGE-lite: a reduced 13-host, three-subnet defence scenario.

Red is a deterministic b-line attacker walking user -> enterprise ->
operational server.  Blue picks one of 54 discrete actions (sleep,
monitor, and analyse/remove/restore/decoy on each host) and sees a 52-bit
observation, 4 bits per host.  Step order is always red then blue.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum, IntEnum
from typing import Optional, Union

import numpy as np

from .errors import EpisodeFinishedError, InvalidActionError
from .rewards import EnvKind, RewardKind, RewardSpec, TransitionSummary, reward_cage
from .yt import StepRecord


class Subnet(str, Enum):
    USER = "user"
    ENTERPRISE = "enterprise"
    OPERATIONAL = "operational"


class HostRole(str, Enum):
    USER_HOST = "user_host"
    ENTERPRISE_HOST = "enterprise_host"
    DEFENDER_HOST = "defender_host"
    OP_HOST = "op_host"
    OP_SERVER = "op_server"


class RedAccess(str, Enum):
    NONE = "none"
    USER = "user"
    PRIVILEGED = "privileged"


class Activity(IntEnum):
    NONE = 0
    SCANNED = 1
    EXPLOITED = 2


# 2-bit access codes in the observation
ACCESS_NONE, ACCESS_UNKNOWN, ACCESS_USER, ACCESS_PRIVILEGED = 0, 1, 2, 3
_ACCESS_CODE = {RedAccess.NONE: ACCESS_NONE, RedAccess.USER: ACCESS_USER,
                RedAccess.PRIVILEGED: ACCESS_PRIVILEGED}

HOST_LAYOUT: tuple[tuple[str, Subnet, HostRole], ...] = (
    ("User0", Subnet.USER, HostRole.USER_HOST),
    ("User1", Subnet.USER, HostRole.USER_HOST),
    ("User2", Subnet.USER, HostRole.USER_HOST),
    ("User3", Subnet.USER, HostRole.USER_HOST),
    ("User4", Subnet.USER, HostRole.USER_HOST),
    ("Enterprise0", Subnet.ENTERPRISE, HostRole.ENTERPRISE_HOST),
    ("Enterprise1", Subnet.ENTERPRISE, HostRole.ENTERPRISE_HOST),
    ("Enterprise2", Subnet.ENTERPRISE, HostRole.ENTERPRISE_HOST),
    ("Defender", Subnet.ENTERPRISE, HostRole.DEFENDER_HOST),
    ("Op_Host0", Subnet.OPERATIONAL, HostRole.OP_HOST),
    ("Op_Host1", Subnet.OPERATIONAL, HostRole.OP_HOST),
    ("Op_Host2", Subnet.OPERATIONAL, HostRole.OP_HOST),
    ("Op_Server0", Subnet.OPERATIONAL, HostRole.OP_SERVER),
)
N_HOSTS = len(HOST_LAYOUT)
USER0, ENTERPRISE0, DEFENDER, OP_SERVER = 0, 5, 8, 12
OBSERVATION_BITS = 4 * N_HOSTS


@dataclass
class Host:
    id: int
    subnet: Subnet
    role: HostRole
    red_access: RedAccess = RedAccess.NONE
    decoy_active: bool = False
    activity_this_step: Activity = Activity.NONE

    @property
    def name(self) -> str:
        return HOST_LAYOUT[self.id][0]


def make_hosts() -> list[Host]:
    return [Host(i, subnet, role) for i, (_, subnet, role) in enumerate(HOST_LAYOUT)]


# ---------------------------------------------------------------------------
# actions
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Exploit:
    target: int
    tag = "exploit"


@dataclass(frozen=True)
class PrivEsc:
    target: int
    tag = "privesc"


@dataclass(frozen=True)
class Impact:
    target: int = OP_SERVER
    tag = "impact"


RedActionCage = Union[Exploit, PrivEsc, Impact]


@dataclass(frozen=True)
class Sleep:
    tag = "sleep"


@dataclass(frozen=True)
class Monitor:
    tag = "monitor"


@dataclass(frozen=True)
class Analyse:
    host: int
    tag = "analyse"


@dataclass(frozen=True)
class Remove:
    host: int
    tag = "remove"


@dataclass(frozen=True)
class Restore:
    host: int
    tag = "restore"


@dataclass(frozen=True)
class Decoy:
    host: int
    tag = "decoy"


BlueActionCage = Union[Sleep, Monitor, Analyse, Remove, Restore, Decoy]
CAGE_ACTION_TAGS = ("sleep", "monitor", "analyse", "remove", "restore", "decoy")
_TARGETED = (Analyse, Remove, Restore, Decoy)
N_CAGE_ACTIONS = 2 + len(_TARGETED) * N_HOSTS


# ---------------------------------------------------------------------------
# b-line attacker
# ---------------------------------------------------------------------------

# hosts red walks through, shallowest first
_CHAIN = (USER0, ENTERPRISE0, OP_SERVER)


@dataclass(frozen=True)
class BLineState:
    phase: int
    current_foothold: Optional[int]


def bline_state(hosts: list[Host]) -> BLineState:
    """Chain phase implied by the deepest host red still holds.

    Phases: 0 exploit user0, 1 privesc user0, 2 exploit enterprise0,
    3 privesc enterprise0, 4 exploit op server, 5 privesc op server,
    6 impact.
    """
    for depth in range(len(_CHAIN) - 1, -1, -1):
        host = hosts[_CHAIN[depth]]
        if host.red_access is RedAccess.PRIVILEGED:
            return BLineState(2 * depth + 2, host.id)
        if host.red_access is RedAccess.USER:
            return BLineState(2 * depth + 1, host.id)
    return BLineState(0, None)


def bline_next(hosts: list[Host]) -> RedActionCage:
    phase = bline_state(hosts).phase
    if phase >= 2 * len(_CHAIN):
        return Impact(OP_SERVER)
    host = _CHAIN[phase // 2]
    return Exploit(host) if phase % 2 == 0 else PrivEsc(host)


def apply_red_cage(hosts: list[Host], action: RedActionCage) -> dict:
    """Apply red's action in place and return the step's red events."""
    events = {"impacted": False, "privesc_subnet": None, "exploit_absorbed": False}
    host = hosts[action.target]
    if isinstance(action, Exploit):
        host.activity_this_step = Activity.EXPLOITED
        if host.decoy_active:
            host.decoy_active = False
            events["exploit_absorbed"] = True
        elif host.red_access is RedAccess.NONE and host.role is not HostRole.DEFENDER_HOST:
            host.red_access = RedAccess.USER
    elif isinstance(action, PrivEsc):
        host.activity_this_step = Activity.EXPLOITED
        if host.red_access is RedAccess.USER:
            host.red_access = RedAccess.PRIVILEGED
            events["privesc_subnet"] = host.subnet
    elif isinstance(action, Impact):
        if host.role is HostRole.OP_SERVER and host.red_access is RedAccess.PRIVILEGED:
            events["impacted"] = True
    return events


def apply_blue_cage(hosts: list[Host], action: BlueActionCage) -> list[Host]:
    """Apply blue's action to host state in place (knowledge is tracked by the env)."""
    if isinstance(action, (Sleep, Monitor)):
        return hosts
    if not isinstance(action, _TARGETED):
        raise InvalidActionError(f"unknown blue action {action!r}")
    if not 0 <= action.host < N_HOSTS:
        raise InvalidActionError(f"host {action.host} out of range")
    host = hosts[action.host]
    if isinstance(action, Remove):
        if host.red_access is RedAccess.USER:
            host.red_access = RedAccess.NONE
    elif isinstance(action, Restore):
        host.red_access = RedAccess.NONE
    elif isinstance(action, Decoy):
        if host.red_access is RedAccess.NONE:
            host.decoy_active = True
    return hosts


def red_confined_to_user_subnet(hosts: list[Host]) -> bool:
    for h in hosts:
        if h.red_access is RedAccess.NONE:
            continue
        if h.red_access is RedAccess.PRIVILEGED or h.subnet is not Subnet.USER:
            return False
    return True


def compromised_host_count(hosts: list[Host]) -> int:
    return sum(1 for h in hosts if h.red_access is not RedAccess.NONE)


# ---------------------------------------------------------------------------
# environment
# ---------------------------------------------------------------------------

@dataclass
class CageConfig:
    episode_length: int = 100
    reward: RewardKind = RewardKind.CDN
    rng_seed: int = 0

    def __post_init__(self):
        self.reward = RewardKind(self.reward)
        if self.episode_length < 1:
            raise ValueError("episode_length must be at least 1")


class CageEnv:
    environment = EnvKind.CAGE
    n_actions = N_CAGE_ACTIONS
    observation_size = OBSERVATION_BITS
    action_tags = CAGE_ACTION_TAGS

    def __init__(self, config: Optional[CageConfig] = None):
        self.config = config or CageConfig()
        self.reward_spec = RewardSpec(self.config.reward, EnvKind.CAGE)
        # red is deterministic; the generator exists so all envs share one seeding contract
        self.rng = np.random.default_rng(self.config.rng_seed)
        self.reset()

    def reset(self, seed: Optional[int] = None) -> np.ndarray:
        if seed is not None:
            self.rng = np.random.default_rng(seed)
        self.hosts = make_hosts()
        self.knowledge = [ACCESS_NONE] * N_HOSTS
        self.analysed: set[int] = set()
        self.monitored = False
        self.t = 0
        self.done = False
        return self.observe()

    def decode_action(self, index: int) -> BlueActionCage:
        index = int(index)
        if index == 0:
            return Sleep()
        if index == 1:
            return Monitor()
        if 2 <= index < N_CAGE_ACTIONS:
            family, host = divmod(index - 2, N_HOSTS)
            return _TARGETED[family](host)
        raise InvalidActionError(f"action index {index} outside [0, {N_CAGE_ACTIONS})")

    def encode_action(self, action: BlueActionCage) -> int:
        if isinstance(action, Sleep):
            return 0
        if isinstance(action, Monitor):
            return 1
        for family, cls in enumerate(_TARGETED):
            if isinstance(action, cls):
                return 2 + family * N_HOSTS + action.host
        raise InvalidActionError(f"unknown blue action {action!r}")

    def observe(self) -> np.ndarray:
        obs = np.zeros(OBSERVATION_BITS)
        for h in self.hosts:
            activity = int(h.activity_this_step) if self.monitored else 0
            if h.id in self.analysed:
                access = _ACCESS_CODE[h.red_access]
            else:
                access = self.knowledge[h.id]
            base = 4 * h.id
            obs[base] = activity >> 1 & 1
            obs[base + 1] = activity & 1
            obs[base + 2] = access >> 1 & 1
            obs[base + 3] = access & 1
        return obs

    def _update_knowledge(self, blue: BlueActionCage):
        if isinstance(blue, Monitor):
            for h in self.hosts:
                if h.activity_this_step is not Activity.NONE:
                    self.knowledge[h.id] = _ACCESS_CODE[h.red_access]
        elif isinstance(blue, Analyse):
            self.analysed.add(blue.host)
            self.knowledge[blue.host] = _ACCESS_CODE[self.hosts[blue.host].red_access]
        elif isinstance(blue, Restore):
            self.knowledge[blue.host] = ACCESS_NONE
        elif isinstance(blue, Remove):
            # blue cannot tell whether a privileged foothold survived the removal
            if self.knowledge[blue.host] != ACCESS_NONE:
                self.knowledge[blue.host] = ACCESS_UNKNOWN

    def step(self, action: Union[int, BlueActionCage]) -> StepRecord:
        if self.done:
            raise EpisodeFinishedError("episode is finished; call reset()")
        blue = self.decode_action(action) if isinstance(action, (int, np.integer)) else action
        hosts = self.hosts
        for h in hosts:
            h.activity_this_step = Activity.NONE

        red = bline_next(hosts)
        events = apply_red_cage(hosts, red)
        samples = [compromised_host_count(hosts)]
        apply_blue_cage(hosts, blue)
        samples.append(compromised_host_count(hosts))
        self.monitored = isinstance(blue, Monitor)
        self._update_knowledge(blue)

        m_intra, m_end = max(samples), samples[-1]
        summary = TransitionSummary(
            end_compromised_count=m_end,
            total_nodes=N_HOSTS,
            blue_action=blue.tag,
            host_access=tuple((h.role.value, h.red_access.value) for h in hosts),
            impacted_this_step=events["impacted"],
            red_confined_to_user_subnet=red_confined_to_user_subnet(hosts),
        )
        reward = reward_cage(self.reward_spec, summary)
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
            info=events,
        )

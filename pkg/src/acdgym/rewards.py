"""Per-step reward functions for the YT and CAGE-lite environments.

Every function here is pure: the reward depends only on the
``TransitionSummary`` built by the environment at the end of a step.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

from .errors import ConfigurationError


class RewardKind(str, Enum):
    SP = "SP"
    SN = "SN"
    SPN = "SPN"
    DN = "DN"
    CDN = "CDN"
    ABLATED_SP = "ABLATED_SP"


class EnvKind(str, Enum):
    YT = "YT"
    CAGE = "CAGE"


YT_ONLY = frozenset({RewardKind.DN, RewardKind.ABLATED_SP})

# blue action costs under the complex dense reward
YT_CDN_ACTION_COST = {
    "scan_network": 0.0,
    "restore_node": -0.5,
    "place_decoy": -0.25,
}

# per-step penalty for each privileged host, keyed by host role
CAGE_CDN_PRIVILEGED_COST = {
    "user_host": -0.1,
    "op_host": -0.1,
    "enterprise_host": -1.0,
    "op_server": -1.0,
}
CAGE_CDN_IMPACT_COST = -10.0
CAGE_CDN_RESTORE_COST = -1.0


@dataclass(frozen=True)
class RewardSpec:
    kind: RewardKind
    environment: EnvKind

    def __post_init__(self):
        object.__setattr__(self, "kind", RewardKind(self.kind))
        object.__setattr__(self, "environment", EnvKind(self.environment))
        if self.environment is EnvKind.CAGE and self.kind in YT_ONLY:
            raise ConfigurationError(f"reward {self.kind.value} is not defined for CAGE")

    @classmethod
    def parse(cls, kind: str, environment: str) -> "RewardSpec":
        try:
            return cls(RewardKind(kind.upper()), EnvKind(environment.upper()))
        except ValueError as exc:
            raise ConfigurationError(str(exc)) from exc


@dataclass(frozen=True)
class TransitionSummary:
    end_compromised_count: int
    total_nodes: int
    blue_action: str
    # CAGE only
    host_access: tuple[tuple[str, str], ...] = ()
    impacted_this_step: bool = False
    red_confined_to_user_subnet: bool = False

    def __post_init__(self):
        if not 0 <= self.end_compromised_count <= self.total_nodes:
            raise ValueError(
                f"compromised count {self.end_compromised_count} outside [0, {self.total_nodes}]"
            )


def _yt_sparse_positive(s: TransitionSummary) -> float:
    return 1.0 if s.end_compromised_count == 0 else 0.0


def _yt_sparse_negative(s: TransitionSummary) -> float:
    return -1.0 if s.end_compromised_count == s.total_nodes else 0.0


def reward_yt(spec: RewardSpec, summary: TransitionSummary) -> float:
    if spec.environment is not EnvKind.YT:
        raise ConfigurationError(f"reward_yt called with a {spec.environment.value} reward spec")
    kind = spec.kind
    if kind is RewardKind.SP:
        return _yt_sparse_positive(summary)
    if kind is RewardKind.SN:
        return _yt_sparse_negative(summary)
    if kind is RewardKind.SPN:
        return _yt_sparse_positive(summary) + _yt_sparse_negative(summary)
    if kind is RewardKind.DN:
        return -float(summary.end_compromised_count)
    if kind is RewardKind.CDN:
        try:
            cost = YT_CDN_ACTION_COST[summary.blue_action]
        except KeyError:
            raise ConfigurationError(f"no CDN cost for YT action {summary.blue_action!r}") from None
        return -float(summary.end_compromised_count) + cost
    if kind is RewardKind.ABLATED_SP:
        return _yt_sparse_positive(summary) - 1.0
    raise ConfigurationError(f"unsupported reward kind {kind}")


def _cage_sparse_positive(s: TransitionSummary) -> float:
    return 1.0 if s.red_confined_to_user_subnet else 0.0


def _cage_sparse_negative(s: TransitionSummary) -> float:
    return -1.0 if s.impacted_this_step else 0.0


def cage_cdn(summary: TransitionSummary) -> float:
    """Default CAGE-style dense reward: privileged-host, impact and restore penalties."""
    total = 0.0
    for role, access in summary.host_access:
        if access == "privileged":
            total += CAGE_CDN_PRIVILEGED_COST[role]
    if summary.impacted_this_step:
        total += CAGE_CDN_IMPACT_COST
    if summary.blue_action == "restore":
        total += CAGE_CDN_RESTORE_COST
    return total


def reward_cage(spec: RewardSpec, summary: TransitionSummary) -> float:
    if spec.environment is not EnvKind.CAGE:
        raise ConfigurationError(f"reward_cage called with a {spec.environment.value} reward spec")
    kind = spec.kind
    if kind is RewardKind.SP:
        return _cage_sparse_positive(summary)
    if kind is RewardKind.SN:
        return _cage_sparse_negative(summary)
    if kind is RewardKind.SPN:
        return _cage_sparse_positive(summary) + _cage_sparse_negative(summary)
    if kind is RewardKind.CDN:
        return cage_cdn(summary)
    raise ConfigurationError(f"reward {kind.value} is not defined for CAGE")


def compute_reward(spec: RewardSpec, summary: TransitionSummary) -> float:
    if spec.environment is EnvKind.YT:
        return reward_yt(spec, summary)
    return reward_cage(spec, summary)

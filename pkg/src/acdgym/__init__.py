"""Autonomous cyber-defence gym with ground-truth scoring and reliability metrics."""

from .cage import CageConfig, CageEnv
from .rewards import EnvKind, RewardKind, RewardSpec
from .scoring import EvalDistribution, EpisodeRecord, rollout
from .yt import ActionSpace, AgentOrder, StepRecord, YtConfig, YtEnv

__version__ = "0.1.0"

__all__ = [
    "ActionSpace", "AgentOrder", "CageConfig", "CageEnv", "EnvKind", "EpisodeRecord",
    "EvalDistribution", "RewardKind", "RewardSpec", "StepRecord", "YtConfig", "YtEnv", "rollout",
]

from .checkpoint import load_checkpoint, save_checkpoint
from .dqn import DqnAgent, DqnConfig, ReplayBuffer, dqn_targets, linear_epsilon
from .mlp import Adam, Mlp
from .ppo import PpoAgent, PpoConfig, clipped_surrogate, gae_advantages
from .qtable import QTable, QTableConfig, bits_state_key, yt_state_key
from .scripted import SCRIPTED_POLICIES, make_scripted

__all__ = [
    "Adam", "DqnAgent", "DqnConfig", "Mlp", "PpoAgent", "PpoConfig", "QTable", "QTableConfig",
    "ReplayBuffer", "SCRIPTED_POLICIES", "bits_state_key", "clipped_surrogate", "dqn_targets",
    "gae_advantages", "linear_epsilon", "load_checkpoint", "make_scripted", "save_checkpoint",
    "yt_state_key",
]

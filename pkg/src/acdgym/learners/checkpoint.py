"""JSON checkpoints: a version header, the learner config and raw parameters."""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .dqn import DqnAgent, DqnConfig
from .ppo import PpoAgent, PpoConfig
from .qtable import QTable, QTableConfig, bits_state_key, yt_state_key

FORMAT = "acdgym-checkpoint"
VERSION = 1


def _dump_mlp(net) -> dict:
    return {
        "sizes": net.sizes,
        "activation": net.activation,
        "params": [p.tolist() for p in net.params],
    }


def _load_mlp(net, blob: dict):
    if list(blob["sizes"]) != net.sizes:
        raise ValueError(f"checkpoint layer sizes {blob['sizes']} != {net.sizes}")
    net.set_params([np.asarray(p, dtype=np.float64) for p in blob["params"]])


def save_checkpoint(path, learner) -> Path:
    path = Path(path)
    blob = {"format": FORMAT, "version": VERSION}
    if isinstance(learner, PpoAgent):
        blob.update(learner="PPO", obs_size=learner.obs_size, n_actions=learner.n_actions,
                    config=learner.config.to_dict(),
                    networks={k: _dump_mlp(v) for k, v in learner.networks().items()})
    elif isinstance(learner, DqnAgent):
        blob.update(learner="DQN", obs_size=learner.obs_size, n_actions=learner.n_actions,
                    config=learner.config.to_dict(),
                    networks={k: _dump_mlp(v) for k, v in learner.networks().items()})
    elif isinstance(learner, QTable):
        blob.update(learner="QTABLE", n_actions=learner.n_actions, config=learner.config.to_dict(),
                    key_fn="bits" if learner.key_fn is bits_state_key else "yt",
                    table={str(k): v.tolist() for k, v in sorted(learner.values.items())})
    else:
        raise TypeError(f"cannot checkpoint {type(learner).__name__}")
    path.write_text(json.dumps(blob))
    return path


def load_checkpoint(path):
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"checkpoint {path} does not exist")
    blob = json.loads(path.read_text())
    if blob.get("format") != FORMAT:
        raise ValueError(f"{path} is not an {FORMAT} file")
    if blob.get("version") != VERSION:
        raise ValueError(f"unsupported checkpoint version {blob.get('version')}")
    kind = blob["learner"]
    if kind == "PPO":
        agent = PpoAgent(blob["obs_size"], blob["n_actions"], PpoConfig(**blob["config"]))
    elif kind == "DQN":
        agent = DqnAgent(blob["obs_size"], blob["n_actions"], DqnConfig(**blob["config"]))
    elif kind == "QTABLE":
        key_fn = bits_state_key if blob.get("key_fn") == "bits" else yt_state_key
        agent = QTable(blob["n_actions"], QTableConfig(**blob["config"]), key_fn=key_fn)
        agent.values = {int(k): np.asarray(v) for k, v in blob["table"].items()}
        return agent
    else:
        raise ValueError(f"unknown learner {kind!r} in checkpoint")
    for name, net in agent.networks().items():
        _load_mlp(net, blob["networks"][name])
    return agent

import json

import numpy as np
import pytest

import oracles
from acdgym.learners import (DqnAgent, DqnConfig, PpoAgent, PpoConfig, QTable, bits_state_key,
                             load_checkpoint, save_checkpoint)


def probe_actions(agent, size):
    rng = np.random.default_rng(0)
    return [agent.act(rng.integers(0, 2, size=size).astype(float)) for _ in range(30)]


@pytest.mark.parametrize("make", [
    lambda: PpoAgent(6, 4, PpoConfig(hidden_sizes=(8, 8)), seed=3),
    lambda: DqnAgent(6, 4, DqnConfig(hidden_sizes=(8,)), seed=3),
])
def test_network_roundtrip(tmp_path, make):
    agent = make()
    path = save_checkpoint(tmp_path / "ck.json", agent)
    loaded = load_checkpoint(path)
    for a, b in zip(agent.networks().values(), loaded.networks().values()):
        for p, q in zip(a.params, b.params):
            np.testing.assert_array_equal(p, q)
    assert probe_actions(agent, 6) == probe_actions(loaded, 6)
    blob = json.loads(path.read_text())
    assert blob["format"] == "acdgym-checkpoint" and blob["version"] == 1


def test_qtable_roundtrip(tmp_path):
    env = oracles.OneHotChain([[0.0, 1.0], [1.0, 0.0]])
    agent = QTable(2, seed=0, key_fn=bits_state_key).learn(env, 500)
    loaded = load_checkpoint(save_checkpoint(tmp_path / "q.json", agent))
    assert loaded.key_fn is bits_state_key
    assert set(loaded.values) == set(agent.values)
    for k in agent.values:
        np.testing.assert_array_equal(loaded.values[k], agent.values[k])


def test_missing_checkpoint(tmp_path):
    with pytest.raises(FileNotFoundError):
        load_checkpoint(tmp_path / "nope.json")


def test_bad_header(tmp_path):
    path = tmp_path / "x.json"
    path.write_text(json.dumps({"format": "other"}))
    with pytest.raises(ValueError):
        load_checkpoint(path)
    path.write_text(json.dumps({"format": "acdgym-checkpoint", "version": 99}))
    with pytest.raises(ValueError):
        load_checkpoint(path)


def test_unsupported_object(tmp_path):
    with pytest.raises(TypeError):
        save_checkpoint(tmp_path / "x.json", object())

import numpy as np
import pytest

import oracles
from acdgym.learners.qtable import QTable, QTableConfig, bits_state_key, yt_state_key
from acdgym.learners.scripted import RestoreFrontier
from acdgym.scoring import rollout
from acdgym.yt import ActionSpace, AgentOrder, YtConfig, YtEnv


def test_yt_state_key_is_compromise_bitmask():
    env = YtEnv(YtConfig(node_count=3))
    env.reset(seed=0)
    assert yt_state_key(env.observe()) == 0
    env.state.statuses[0].compromised = True
    env.state.statuses[2].compromised = True
    assert yt_state_key(env.observe()) == 0b101


def test_bits_state_key():
    assert bits_state_key(np.array([1.0, 0.0, 1.0, 1.0])) == 0b1101


def test_update_is_one_step_td():
    q = QTable(2, QTableConfig(learning_rate=0.5, gamma=0.9))
    q.values[1] = np.array([0.0, 4.0])
    td = q.update(0, 1, 1.0, 1, done=False)
    assert td == pytest.approx(1.0 + 0.9 * 4.0)
    assert q.q(0)[1] == pytest.approx(0.5 * (1.0 + 3.6))
    td = q.update(0, 0, 2.0, 1, done=True)
    assert q.q(0)[0] == pytest.approx(1.0)


def test_converges_on_chain():
    rewards = [[0.0, 1.0], [2.0, 0.0], [0.0, 3.0]]
    gamma = 0.9
    env = oracles.OneHotChain(rewards)
    cfg = QTableConfig(learning_rate=0.2, gamma=gamma, exploration_fraction=0.8)
    agent = QTable(2, cfg, seed=0, key_fn=bits_state_key).learn(env, 6000)
    expected = oracles.chain_optimal_q(rewards, gamma)
    for s in range(3):
        obs = np.eye(3)[s]
        np.testing.assert_allclose(agent.q(bits_state_key(obs)), expected[s], atol=1e-3)


def test_learns_red_first_optimum_on_two_nodes():
    env = YtEnv(YtConfig(node_count=2, action_space=ActionSpace.BASIC,
                         agent_order=AgentOrder.RED_THEN_BLUE, rng_seed=0))
    agent = QTable(env.n_actions, seed=1).learn(env, 30_000)
    learned = rollout(env, agent, 100, base_seed=100).distribution.mean
    optimum = rollout(env, RestoreFrontier(env), 100, base_seed=100).distribution.mean
    assert learned <= optimum + 0.05


def test_epsilon_schedule_ends_at_final():
    env = oracles.OneHotChain([[0.0, 1.0]])
    agent = QTable(2, QTableConfig(exploration_final_eps=0.01), seed=0)
    agent.learn(env, 100)
    assert agent.epsilon == 0.01

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import oracles
from acdgym.learners.ppo import (PpoAgent, PpoConfig, RolloutBuffer, clipped_surrogate,
                                 gae_advantages, softmax)

rollouts = st.integers(1, 30).flatmap(lambda n: st.tuples(
    st.lists(st.floats(-5, 5), min_size=n, max_size=n),
    st.lists(st.floats(-5, 5), min_size=n, max_size=n),
    st.lists(st.booleans(), min_size=n, max_size=n),
    st.floats(-5, 5),
))


@settings(max_examples=200)
@given(rollouts, st.floats(0.5, 1.0))
def test_gae_lambda_one_is_monte_carlo(data, gamma):
    rewards, values, dones, last_value = data
    adv, returns = gae_advantages(rewards, values, dones, last_value, gamma, 1.0)
    expected = oracles.mc_advantages(rewards, values, dones, last_value, gamma)
    np.testing.assert_allclose(adv, expected, rtol=0, atol=1e-10)
    np.testing.assert_allclose(returns, np.asarray(expected) + values, rtol=0, atol=1e-10)


@given(rollouts, st.floats(0.5, 1.0))
def test_gae_lambda_zero_is_td_error(data, gamma):
    rewards, values, dones, last_value = data
    adv, _ = gae_advantages(rewards, values, dones, last_value, gamma, 0.0)
    nxt = list(values[1:]) + [last_value]
    for t in range(len(rewards)):
        delta = rewards[t] + gamma * (0.0 if dones[t] else nxt[t]) - values[t]
        assert adv[t] == pytest.approx(delta, abs=1e-12)


def test_gae_hand_example():
    # two steps, terminal at the end: returns are 1 + 0.5*2 and 2
    adv, ret = gae_advantages([1.0, 2.0], [0.0, 0.0], [False, True], 99.0, 0.5, 1.0)
    np.testing.assert_allclose(ret, [2.0, 2.0])


def test_clipped_surrogate():
    ratio = np.array([0.5, 1.0, 1.5, 0.5, 1.5])
    adv = np.array([1.0, 1.0, 1.0, -1.0, -1.0])
    # positive advantage caps the ratio above; negative caps it below
    np.testing.assert_allclose(clipped_surrogate(ratio, adv, 0.2), [0.5, 1.0, 1.2, -0.8, -1.5])


def test_softmax_rows_sum_to_one():
    p = softmax(np.array([[1000.0, 0.0], [1.0, 2.0]]))
    np.testing.assert_allclose(p.sum(axis=1), 1.0)
    assert p[0, 0] == pytest.approx(1.0)


def _ppo_loss(agent, obs, actions, old_log_probs, adv, returns):
    """Independent re-statement of the PPO objective minimised per minibatch."""
    cfg = agent.config
    a = (adv - adv.mean()) / (adv.std(ddof=1) + 1e-8)
    logits = agent.actor.predict(obs)
    z = logits - logits.max(axis=1, keepdims=True)
    logp_all = z - np.log(np.exp(z).sum(axis=1, keepdims=True))
    logp = logp_all[np.arange(len(actions)), actions]
    ratio = np.exp(logp - old_log_probs)
    surrogate = np.minimum(ratio * a, np.clip(ratio, 1 - cfg.clip_range, 1 + cfg.clip_range) * a)
    entropy = -(np.exp(logp_all) * logp_all).sum(axis=1).mean()
    values = agent.critic.predict(obs)[:, 0]
    return (-surrogate.mean() - cfg.entropy_coef * entropy
            + cfg.value_coef * np.mean((returns - values) ** 2))


@pytest.mark.parametrize("entropy_coef", [0.0, 0.05])
def test_minibatch_gradient_matches_finite_differences(entropy_coef):
    rng = np.random.default_rng(3)
    cfg = PpoConfig(hidden_sizes=(5,), entropy_coef=entropy_coef, max_grad_norm=None)
    agent = PpoAgent(4, 3, cfg, seed=1)
    obs = rng.normal(size=(8, 4))
    actions = rng.integers(0, 3, size=8)
    logits = agent.actor.predict(obs)
    logp = np.log(softmax(logits)[np.arange(8), actions])
    # ratios spread across the clip boundaries but away from the kinks
    old_log_probs = logp - rng.choice([-0.5, -0.1, 0.1, 0.5], size=8)
    adv = rng.normal(size=8)
    returns = rng.normal(size=8)

    captured = {}
    agent.optimizer.step = lambda grads: captured.setdefault("g", [g.copy() for g in grads])
    agent.minibatch_step(obs, actions, old_log_probs, adv, returns)
    params = agent.actor.params + agent.critic.params
    numeric = oracles.finite_difference(
        lambda: _ppo_loss(agent, obs, actions, old_log_probs, adv, returns), params)
    a = np.concatenate([g.ravel() for g in captured["g"]])
    n = np.concatenate([np.asarray(g) for g in numeric])
    assert np.linalg.norm(a - n) / (np.linalg.norm(a) + np.linalg.norm(n)) < 1e-6


def test_heads_use_small_and_unit_gains():
    agent = PpoAgent(10, 4, seed=0)
    actor_head, critic_head = agent.actor.weights[-1], agent.critic.weights[-1]
    # orthogonal columns scaled by the head gain
    np.testing.assert_allclose(np.linalg.norm(actor_head, axis=0), 0.01, rtol=1e-9)
    np.testing.assert_allclose(np.linalg.norm(critic_head, axis=0), 1.0, rtol=1e-9)
    assert agent.actor.sizes == [10, 64, 64, 4]


def test_rollout_buffer():
    buf = RolloutBuffer(3, 2)
    buf.add(np.ones(2), 1, 0.5, False, 0.1, -0.2)
    assert len(buf) == 1
    assert buf.actions[0] == 1 and buf.rewards[0] == 0.5


def test_update_rejects_empty_buffer():
    with pytest.raises(ValueError):
        PpoAgent(2, 2).update(RolloutBuffer(4, 2), 0.0)


def test_config_validation():
    with pytest.raises(ValueError):
        PpoConfig(gamma=0.0)
    with pytest.raises(ValueError):
        PpoConfig(gae_lambda=1.5)
    with pytest.raises(ValueError):
        PpoConfig(clip_range=0.0)


def test_learns_bandit():
    env = oracles.OneHotChain([[0.0, 1.0, 0.2]])
    agent = PpoAgent(1, 3, PpoConfig(n_steps=64, batch_size=16, learning_rate=3e-3), seed=0)
    agent.learn(env, 3000)
    assert agent.act(env.reset()) == 1


def test_learning_is_seed_deterministic():
    def run(seed):
        env = oracles.OneHotChain([[0.0, 1.0], [1.0, 0.0]])
        agent = PpoAgent(2, 2, PpoConfig(n_steps=32, batch_size=8), seed=seed)
        agent.learn(env, 200)
        return np.concatenate([p.ravel() for p in agent.actor.params])
    np.testing.assert_array_equal(run(5), run(5))
    assert not np.array_equal(run(5), run(6))


def test_on_step_called_every_step():
    env = oracles.OneHotChain([[0.0, 1.0]])
    seen = []
    PpoAgent(1, 2, PpoConfig(n_steps=16, batch_size=8), seed=0).learn(env, 50, on_step=seen.append)
    assert seen == list(range(1, 51))

import numpy as np
import pytest

import oracles
from acdgym.learners.mlp import Adam, Mlp, clip_grad_norm, orthogonal


def relative_error(a, b):
    a = np.concatenate([np.ravel(x) for x in a])
    b = np.concatenate([np.ravel(x) for x in b])
    return np.linalg.norm(a - b) / max(np.linalg.norm(a) + np.linalg.norm(b), 1e-12)


def random_net(seed):
    rng = np.random.default_rng(seed)
    depth = int(rng.integers(1, 4))
    sizes = [int(rng.integers(1, 7)) for _ in range(depth + 1)]
    activation = "tanh" if seed % 2 == 0 else "relu"
    net = Mlp(sizes, activation, rng, output_gain=float(rng.uniform(0.1, 2.0)))
    for b in net.biases:
        b[...] = rng.normal(scale=0.3, size=b.shape)
    x = rng.normal(size=(int(rng.integers(1, 6)), sizes[0]))
    g = rng.normal(size=(x.shape[0], sizes[-1]))
    return net, x, g


@pytest.mark.parametrize("seed", range(20))
def test_backward_matches_finite_differences(seed):
    net, x, g = random_net(seed)

    def loss():
        return float(np.sum(net.predict(x) * g))

    net.forward(x)
    analytic = net.backward(g)
    numeric = oracles.finite_difference(loss, net.params, h=1e-5)
    assert relative_error(analytic, numeric) <= 1e-4


def test_single_sample_forward_squeezes():
    net = Mlp([3, 4, 2], "tanh", np.random.default_rng(0))
    x = np.array([0.1, -0.2, 0.3])
    out = net.forward(x)
    assert out.shape == (2,)
    np.testing.assert_allclose(out, net.predict(x[None, :])[0])
    grads = net.backward(np.ones(2))
    assert [g.shape for g in grads] == [p.shape for p in net.params]


def test_shape_errors():
    net = Mlp([3, 2], "tanh")
    with pytest.raises(ValueError):
        net.forward(np.zeros(4))
    with pytest.raises(RuntimeError):
        Mlp([3, 2]).backward(np.zeros(2))
    net.forward(np.zeros((2, 3)))
    with pytest.raises(ValueError):
        net.backward(np.zeros((2, 3)))
    with pytest.raises(ValueError):
        Mlp([3], "tanh")
    with pytest.raises(ValueError):
        Mlp([3, 2], "sigmoid")


@pytest.mark.parametrize("shape", [(4, 4), (6, 3), (3, 6)])
def test_orthogonal_init(shape):
    w = orthogonal(shape, 2.0, np.random.default_rng(1))
    small = min(shape)
    gram = w.T @ w if shape[0] >= shape[1] else w @ w.T
    np.testing.assert_allclose(gram, 4.0 * np.eye(small), atol=1e-12)


def test_clip_grad_norm():
    grads = [np.array([3.0]), np.array([4.0])]
    total = clip_grad_norm(grads, 1.0)
    assert total == 5.0
    assert np.sqrt(sum(float(g @ g) for g in grads)) == pytest.approx(1.0, abs=1e-5)
    untouched = [np.array([0.3])]
    clip_grad_norm(untouched, 1.0)
    assert untouched[0][0] == 0.3


def test_adam_minimises_quadratic():
    p = np.array([5.0, -3.0])
    opt = Adam([p], lr=0.1)
    for _ in range(500):
        opt.step([2 * p])
    np.testing.assert_allclose(p, 0.0, atol=1e-2)


def test_adam_first_step_is_lr_sized():
    p = np.array([1.0])
    Adam([p], lr=0.01).step([np.array([123.0])])
    assert p[0] == pytest.approx(0.99, abs=1e-6)

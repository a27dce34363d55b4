import numpy as np
import pytest

from uavland.nn import Mlp, soft_update


def numerical_grads(net, x, coef, eps=1e-5):
    """Central differences of L = sum(coef * net(x)) w.r.t. every parameter and the input."""
    def loss():
        return float(np.sum(coef * net.forward(x)))

    grads = []
    for p in net.parameters():
        g = np.zeros_like(p)
        for idx in np.ndindex(p.shape):
            old = p[idx]
            p[idx] = old + eps
            up = loss()
            p[idx] = old - eps
            down = loss()
            p[idx] = old
            g[idx] = (up - down) / (2 * eps)
        grads.append(g)
    gx = np.zeros_like(x)
    for idx in np.ndindex(x.shape):
        old = x[idx]
        x[idx] = old + eps
        up = loss()
        x[idx] = old - eps
        down = loss()
        x[idx] = old
        gx[idx] = (up - down) / (2 * eps)
    return grads, gx


def rel_error(a, b):
    return float(np.max(np.abs(a - b) / np.maximum(1e-8, np.abs(a) + np.abs(b))))


def analytic_grads(net, x, coef):
    net.zero_grad()
    net.forward(x)
    gx = net.backward(coef)
    return [g.copy() for g in net.gradients()], gx


@pytest.mark.parametrize("hidden", [(), (5,), (6, 4), (5, 4, 3)])
@pytest.mark.parametrize("output", ["linear", "tanh"])
def test_gradient_check(hidden, output):
    rng = np.random.default_rng(len(hidden) * 10 + (output == "tanh"))
    net = Mlp((3, *hidden, 2), output, rng)
    x = rng.normal(size=(4, 3))
    coef = rng.normal(size=(4, 2))
    ana, ana_x = analytic_grads(net, x, coef)
    num, num_x = numerical_grads(net, x, coef)
    for a, n in zip(ana, num):
        assert rel_error(a, n) < 1e-4
    assert rel_error(ana_x, num_x) < 1e-4


def test_hand_chain_rule_single_unit():
    net = Mlp((1, 1))
    net.weights[0][...] = 3.0
    net.biases[0][...] = 0.0
    y = net.forward(np.array([2.0]))
    assert y[0] == 6.0
    net.backward(2 * y)  # L = y^2
    assert net.grad_w[0][0, 0] == 24.0
    assert net.grad_b[0][0] == 12.0


def test_forward_zero_net_and_relu_identity():
    net = Mlp((4, 3, 2))
    for p in net.parameters():
        p[...] = 0.0
    np.testing.assert_array_equal(net.forward(np.array([1.0, -2.0, 3.0, 4.0])), [0.0, 0.0])

    # single layer with identity weights and a ReLU, expressed as hidden layer + identity head
    relu = Mlp((3, 3, 3))
    relu.weights[0][...] = np.eye(3)
    relu.weights[1][...] = np.eye(3)
    relu.biases[0][...] = 0.0
    relu.biases[1][...] = 0.0
    x = np.array([-1.0, 0.5, 2.0])
    np.testing.assert_array_equal(relu.forward(x), np.maximum(x, 0.0))


def test_forward_is_pure_and_batched():
    rng = np.random.default_rng(0)
    net = Mlp((6, 8, 8, 2), "tanh", rng)
    x = rng.normal(size=(5, 6))
    before = [p.copy() for p in net.parameters()]
    y1 = net.forward(x)
    y2 = net.forward(x)
    np.testing.assert_array_equal(y1, y2)
    np.testing.assert_allclose(net.forward(x[2]), y1[2], rtol=1e-12)
    for a, b in zip(before, net.parameters()):
        np.testing.assert_array_equal(a, b)


def test_shape_errors():
    net = Mlp((3, 2))
    with pytest.raises(ValueError):
        net.forward(np.zeros(4))
    with pytest.raises(RuntimeError):
        Mlp((3, 2)).backward(np.zeros(2))
    net.forward(np.zeros((2, 3)))
    with pytest.raises(ValueError):
        net.backward(np.zeros((3, 2)))


def test_zero_upstream_gives_zero_gradients():
    rng = np.random.default_rng(1)
    net = Mlp((3, 4, 2), rng=rng)
    net.forward(rng.normal(size=(3, 3)))
    gx = net.backward(np.zeros((3, 2)))
    assert not gx.any()
    assert not any(g.any() for g in net.gradients())


def test_adam_first_step_matches_scalar_oracle():
    lr, b1, b2, eps = 0.01, 0.9, 0.999, 1e-8
    net = Mlp((1, 1))
    net.weights[0][...] = 0.5
    net.biases[0][...] = -0.25
    g_w, g_b = 0.3, -2.0
    net.grad_w[0][...] = g_w
    net.grad_b[0][...] = g_b
    net.adam_step(lr, b1, b2, eps)
    for theta0, g, got in ((0.5, g_w, net.weights[0][0, 0]), (-0.25, g_b, net.biases[0][0])):
        m_hat = ((1 - b1) * g) / (1 - b1)
        v_hat = ((1 - b2) * g * g) / (1 - b2)
        expected = theta0 - lr * m_hat / (np.sqrt(v_hat) + eps)
        assert got == pytest.approx(expected, abs=1e-15)
        assert got == pytest.approx(theta0 - lr * g / (abs(g) + eps), abs=1e-12)
    assert not any(g.any() for g in net.gradients())


def test_adam_zero_gradient_keeps_parameters():
    net = Mlp((3, 4, 2), rng=0)
    before = [p.copy() for p in net.parameters()]
    net.adam_step(0.1)
    for a, b in zip(before, net.parameters()):
        np.testing.assert_array_equal(a, b)


def test_adam_deterministic():
    a, b = Mlp((3, 4, 2), rng=9), Mlp((3, 4, 2), rng=9)
    x = np.random.default_rng(2).normal(size=(6, 3))
    for net in (a, b):
        for _ in range(3):
            net.forward(x)
            net.backward(np.ones((6, 2)))
            net.adam_step(1e-3)
    for p, q in zip(a.parameters(), b.parameters()):
        np.testing.assert_array_equal(p, q)


@pytest.mark.parametrize("tau", [0.0, 0.005, 0.5, 1.0])
def test_soft_update_law(tau):
    src, tgt = Mlp((3, 4, 2), rng=1), Mlp((3, 4, 2), rng=2)
    old = [p.copy() for p in tgt.parameters()]
    src_before = [p.copy() for p in src.parameters()]
    soft_update(tgt, src, tau)
    for t_new, t_old, s in zip(tgt.parameters(), old, src.parameters()):
        np.testing.assert_array_equal(t_new, tau * s + (1 - tau) * t_old)
    if tau == 1.0:
        for t, s in zip(tgt.parameters(), src.parameters()):
            np.testing.assert_array_equal(t, s)
    if tau == 0.0:
        for t, o in zip(tgt.parameters(), old):
            np.testing.assert_array_equal(t, o)
    for s, s0 in zip(src.parameters(), src_before):
        np.testing.assert_array_equal(s, s0)


def test_soft_update_scalar_and_contraction():
    src, tgt = Mlp((1, 1)), Mlp((1, 1))
    src.weights[0][...] = 1.0
    tgt.weights[0][...] = 0.0
    soft_update(tgt, src, 0.005)
    assert tgt.weights[0][0, 0] == pytest.approx(0.005, abs=1e-18)
    tau = 0.1
    gap0 = 1.0 - tgt.weights[0][0, 0]
    for n in range(1, 30):
        soft_update(tgt, src, tau)
        assert 1.0 - tgt.weights[0][0, 0] == pytest.approx(gap0 * (1 - tau) ** n, rel=1e-9)


def test_soft_update_topology_mismatch():
    with pytest.raises(ValueError):
        soft_update(Mlp((3, 4, 2)), Mlp((3, 5, 2)), 0.5)


def test_save_load_round_trip(tmp_path):
    net = Mlp((6, 7, 5, 2), "tanh", rng=4, out_scale=0.1)
    path = tmp_path / "net.npz"
    net.save(path)
    back = Mlp.load(path)
    assert back.layer_sizes == net.layer_sizes and back.output == "tanh"
    for p, q in zip(net.parameters(), back.parameters()):
        np.testing.assert_array_equal(p, q)

"""Check hand-written backpropagation against central differences.

The networks in ``uavland.nn`` are plain numpy, so their gradients are
verified numerically. This builds a few random nets, compares every
parameter gradient with a finite-difference estimate and prints the worst
relative error per net.
"""
import numpy as np

from uavland.nn import Mlp


def worst_relative_error(net, x, coef, eps=1e-6):
    net.zero_grad()
    net.forward(x)
    net.backward(coef)
    worst = 0.0
    for p, g in zip(net.parameters(), net.gradients()):
        for idx in np.ndindex(p.shape):
            old = p[idx]
            p[idx] = old + eps
            up = np.sum(coef * net.forward(x))
            p[idx] = old - eps
            down = np.sum(coef * net.forward(x))
            p[idx] = old
            num = (up - down) / (2 * eps)
            worst = max(worst, abs(g[idx] - num) / max(1e-8, abs(g[idx]) + abs(num)))
    return worst


if __name__ == "__main__":
    rng = np.random.default_rng(0)
    for sizes, head in [((6, 16, 1), "linear"), ((6, 32, 32, 2), "tanh"), ((8, 12, 10, 6, 4), "linear")]:
        net = Mlp(sizes, head, rng)
        x = rng.normal(size=(5, sizes[0]))
        coef = rng.normal(size=(5, sizes[-1]))
        print(f"{str(sizes):22s} {head:6s}  worst relative error {worst_relative_error(net, x, coef):.2e}")

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field, fields

import numpy as np

from uavland.nn import Mlp


@dataclass
class AgentConfig:
    gamma: float = 0.99
    tau: float = 0.005
    actor_lr: float = 1e-4
    critic_lr: float = 1e-3
    explore_sigma: float = 0.1
    smooth_sigma: float = 0.2
    smooth_clip: float = 0.5
    policy_delay: int = 2
    entropy_alpha: float = 0.2
    # Linear anneal of the entropy weight over this many learn calls; 0 disables it.
    entropy_alpha_final: float | None = None
    entropy_anneal_steps: int = 0
    batch: int = 128
    hidden: tuple = field(default=(64, 64))

    def __post_init__(self):
        self.hidden = tuple(int(h) for h in self.hidden)
        if not 0 < self.gamma <= 1:
            raise ValueError("gamma must be in (0, 1]")
        if not 0 < self.tau <= 1:
            raise ValueError("tau must be in (0, 1]")
        if min(self.actor_lr, self.critic_lr, self.explore_sigma, self.smooth_sigma) <= 0:
            raise ValueError("learning rates and noise scales must be positive")
        if self.policy_delay < 1:
            raise ValueError("policy_delay must be >= 1")
        if self.entropy_alpha < 0 or self.batch < 1:
            raise ValueError("entropy_alpha must be >= 0 and batch >= 1")

    @classmethod
    def from_dict(cls, data: dict) -> "AgentConfig":
        known = {f.name for f in fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise ValueError(f"unknown agent fields: {sorted(unknown)}")
        return cls(**data)

    def to_dict(self) -> dict:
        d = asdict(self)
        d["hidden"] = list(self.hidden)
        return d


def bootstrap_target(rewards, gamma, next_values, dones):
    """``r + gamma * (1 - done) * V(s')``, elementwise."""
    return rewards + gamma * (1.0 - dones) * next_values


def twin_min_target(rewards, gamma, q1_next, q2_next, dones):
    return bootstrap_target(rewards, gamma, np.minimum(q1_next, q2_next), dones)


def sac_q_target(r, gamma, v_next, done):
    return bootstrap_target(r, gamma, v_next, np.asarray(done, dtype=float))


def sac_v_target(q_min, alpha, log_prob):
    """Single-sample soft value: ``q_min - alpha * log_prob``."""
    return q_min - alpha * log_prob


def entropy(probabilities) -> float:
    """Shannon entropy in nats of a discrete distribution (``0 ln 0 = 0``)."""
    p = np.asarray(probabilities, dtype=float)
    if p.ndim != 1 or p.size == 0 or (p < 0).any() or not math.isclose(p.sum(), 1.0, abs_tol=1e-9):
        raise ValueError(f"not a probability vector: {probabilities!r}")
    nz = p[p > 0]
    return float(-(nz * np.log(nz)).sum())


def critic_input(states, actions):
    return np.concatenate([states, actions], axis=1)


def mse_and_grad(pred, target):
    """Mean squared error and its gradient w.r.t. ``pred`` as a column vector."""
    diff = pred - target
    return float(np.mean(diff ** 2)), (2.0 / diff.size) * diff[:, None]


class Agent:
    """Shared plumbing: config, RNG and the named set of networks."""

    algorithm = ""

    def __init__(self, config: AgentConfig | None = None, state_dim=6, action_dim=2, seed=None):
        self.config = config or AgentConfig()
        self.state_dim = state_dim
        self.action_dim = action_dim
        self.rng = np.random.default_rng(seed)
        self.learn_steps = 0

    def _critic(self) -> Mlp:
        return Mlp((self.state_dim + self.action_dim, *self.config.hidden, 1), "linear", self.rng)

    def _value(self) -> Mlp:
        return Mlp((self.state_dim, *self.config.hidden, 1), "linear", self.rng)

    def networks(self) -> dict:
        raise NotImplementedError

    def all_finite(self) -> bool:
        return all(net.all_finite() for net in self.networks().values())

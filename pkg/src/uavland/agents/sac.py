from __future__ import annotations

import math

import numpy as np

from uavland.agents.common import (
    Agent, critic_input, mse_and_grad, sac_q_target, sac_v_target,
)
from uavland.nn import Mlp, soft_update

LOG_STD_MIN = -20.0
LOG_STD_MAX = 2.0
SQUASH_EPS = 1e-6
_HALF_LOG_2PI = 0.5 * math.log(2.0 * math.pi)


def squashed_gaussian(mean, log_std, noise):
    """Reparameterized tanh-Gaussian sample and its log-density.

    Returns ``(action, log_prob)`` with ``action = tanh(mean + exp(log_std) * noise)``.
    The last axis is the action dimension and is summed over for ``log_prob``.
    """
    u = mean + np.exp(log_std) * noise
    a = np.tanh(u)
    gauss = -0.5 * noise ** 2 - log_std - _HALF_LOG_2PI
    log_prob = (gauss - np.log(1.0 - a ** 2 + SQUASH_EPS)).sum(axis=-1)
    return a, log_prob


class SacAgent(Agent):
    """Soft actor-critic with a state-value network and its soft-tracked target.

    Networks: stochastic actor, Q1, Q2, V and V-target. The actor emits the
    Gaussian mean and (clamped) log-std per action dimension.
    """

    algorithm = "sac"

    def __init__(self, config=None, state_dim=6, action_dim=2, seed=None):
        super().__init__(config, state_dim, action_dim, seed)
        self.actor = Mlp((state_dim, *self.config.hidden, 2 * action_dim), "linear", self.rng,
                         out_scale=0.1)
        self.q1 = self._critic()
        self.q2 = self._critic()
        self.value = self._value()
        self.value_target = self.value.copy()

    def networks(self):
        return {"actor": self.actor, "q1": self.q1, "q2": self.q2,
                "value": self.value, "value_target": self.value_target}

    @property
    def alpha(self) -> float:
        c = self.config
        if c.entropy_alpha_final is None or c.entropy_anneal_steps <= 0:
            return c.entropy_alpha
        frac = min(self.learn_steps / c.entropy_anneal_steps, 1.0)
        return c.entropy_alpha + frac * (c.entropy_alpha_final - c.entropy_alpha)

    def policy(self, states):
        """Gaussian mean, clamped log-std and the raw log-std head output."""
        out = self.actor.forward(states)
        k = self.action_dim
        raw = out[..., k:]
        return out[..., :k], np.clip(raw, LOG_STD_MIN, LOG_STD_MAX), raw

    def act_with_log_prob(self, obs, explore=False):
        mean, log_std, _ = self.policy(np.asarray(obs, dtype=float))
        noise = self.rng.standard_normal(mean.shape) if explore else np.zeros_like(mean)
        a, logp = squashed_gaussian(mean, log_std, noise)
        return a, float(logp)

    def act(self, obs, explore=False) -> np.ndarray:
        return self.act_with_log_prob(obs, explore)[0]

    def actor_gradient(self, states, noise, alpha=None, critic=None):
        """Accumulate the gradient of ``mean(alpha * log_pi - Q(s, a))`` into the actor.

        ``noise`` is the standard-normal reparameterization draw. Returns the
        sampled actions, their log-probs and the critic values at them.
        """
        alpha = self.alpha if alpha is None else alpha
        critic = critic or self.q1
        n = len(states)
        mean, log_std, raw = self.policy(states)
        std = np.exp(log_std)
        a, logp = squashed_gaussian(mean, log_std, noise)
        q = critic.forward(critic_input(states, a))[:, 0]
        g_a = critic.backward(np.full((n, 1), -1.0 / n))[:, self.state_dim:]
        critic.zero_grad()
        one_m = 1.0 - a ** 2
        g_u = g_a * one_m + (alpha / n) * 2.0 * a * one_m / (one_m + SQUASH_EPS)
        g_log_std = (g_u * std * noise - alpha / n) * ((raw >= LOG_STD_MIN) & (raw <= LOG_STD_MAX))
        self.actor.backward(np.concatenate([g_u, g_log_std], axis=1))
        return a, logp, q

    def soft_value_targets(self, states, noise, alpha=None):
        """``min(Q1, Q2)(s, a~) - alpha * log_pi(a~|s)`` for a fresh reparameterized sample."""
        alpha = self.alpha if alpha is None else alpha
        mean, log_std, _ = self.policy(states)
        a, logp = squashed_gaussian(mean, log_std, noise)
        x = critic_input(states, a)
        q_min = np.minimum(self.q1.forward(x)[:, 0], self.q2.forward(x)[:, 0])
        return sac_v_target(q_min, alpha, logp)

    def learn(self, batch, noise=None) -> dict:
        """One update of every network, all losses taken at the pre-update parameters."""
        c = self.config
        alpha = self.alpha
        self.learn_steps += 1
        if noise is None:
            noise = self.rng.standard_normal((len(batch.states), self.action_dim))

        y_q = sac_q_target(batch.rewards, c.gamma, self.value_target.forward(batch.next_states)[:, 0],
                           batch.dones)

        y_v = self.soft_value_targets(batch.states, noise, alpha)
        _, logp, q1_new = self.actor_gradient(batch.states, noise, alpha)
        self.actor.adam_step(c.actor_lr)

        report = {"actor_loss": float(np.mean(alpha * logp - q1_new))}
        x = critic_input(batch.states, batch.actions)
        for name, net in (("q1_loss", self.q1), ("q2_loss", self.q2)):
            loss, g = mse_and_grad(net.forward(x)[:, 0], y_q)
            net.backward(g)
            net.adam_step(c.critic_lr)
            report[name] = loss

        loss, g = mse_and_grad(self.value.forward(batch.states)[:, 0], y_v)
        self.value.backward(g)
        self.value.adam_step(c.critic_lr)
        report["value_loss"] = loss
        report["entropy_estimate"] = float(-logp.mean())
        soft_update(self.value_target, self.value, c.tau)
        return report

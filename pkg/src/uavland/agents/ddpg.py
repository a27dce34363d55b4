from __future__ import annotations

import numpy as np

from uavland.agents.common import Agent, bootstrap_target, critic_input, mse_and_grad
from uavland.nn import Mlp, soft_update


class DdpgAgent(Agent):
    """Deterministic actor ``mu`` and critic ``Q`` with soft-tracked targets."""

    algorithm = "ddpg"

    def __init__(self, config=None, state_dim=6, action_dim=2, seed=None):
        super().__init__(config, state_dim, action_dim, seed)
        self.actor = Mlp((state_dim, *self.config.hidden, action_dim), "tanh", self.rng, out_scale=0.1)
        self.critic = self._critic()
        self.actor_target = self.actor.copy()
        self.critic_target = self.critic.copy()

    def networks(self):
        return {"actor": self.actor, "critic": self.critic,
                "actor_target": self.actor_target, "critic_target": self.critic_target}

    def act(self, obs, explore=False) -> np.ndarray:
        a = self.actor.forward(np.asarray(obs, dtype=float))
        if explore:
            a = a + self.rng.normal(0.0, self.config.explore_sigma, a.shape)
        return np.clip(a, -1.0, 1.0)

    def critic_target_values(self, batch):
        a2 = self.actor_target.forward(batch.next_states)
        q2 = self.critic_target.forward(critic_input(batch.next_states, a2))[:, 0]
        return bootstrap_target(batch.rewards, self.config.gamma, q2, batch.dones)

    def _fit_critic(self, critic, states, actions, y):
        q = critic.forward(critic_input(states, actions))[:, 0]
        loss, g = mse_and_grad(q, y)
        critic.backward(g)
        critic.adam_step(self.config.critic_lr)
        return loss

    def actor_gradient(self, states, critic=None):
        """Accumulate the gradient of ``-mean Q(s, mu(s))`` into the actor; return the objective."""
        critic = critic or self.critic
        mu = self.actor.forward(states)
        q = critic.forward(critic_input(states, mu))[:, 0]
        g_in = critic.backward(np.full((len(states), 1), -1.0 / len(states)))
        critic.zero_grad()
        self.actor.backward(g_in[:, self.state_dim:])
        return float(q.mean())

    def learn(self, batch) -> dict:
        self.learn_steps += 1
        y = self.critic_target_values(batch)
        critic_loss = self._fit_critic(self.critic, batch.states, batch.actions, y)
        q_pi = self.actor_gradient(batch.states)
        self.actor.adam_step(self.config.actor_lr)
        soft_update(self.critic_target, self.critic, self.config.tau)
        soft_update(self.actor_target, self.actor, self.config.tau)
        return {"critic_loss": critic_loss, "actor_loss": -q_pi}

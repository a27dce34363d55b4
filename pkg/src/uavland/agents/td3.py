from __future__ import annotations

import numpy as np

from uavland.agents.common import critic_input, twin_min_target
from uavland.agents.ddpg import DdpgAgent
from uavland.nn import soft_update


class Td3Agent(DdpgAgent):
    """Twin critics, target-policy smoothing and delayed actor updates.

    ``critic``/``critic_target`` (inherited) play the role of Q1; the actor
    ascends Q1 only.
    """

    algorithm = "td3"

    def __init__(self, config=None, state_dim=6, action_dim=2, seed=None):
        super().__init__(config, state_dim, action_dim, seed)
        self.critic2 = self._critic()
        self.critic2_target = self.critic2.copy()

    @property
    def critic1(self):
        return self.critic

    def networks(self):
        nets = super().networks()
        nets.update(critic2=self.critic2, critic2_target=self.critic2_target)
        return nets

    def smoothing_noise(self, shape):
        c = self.config
        return np.clip(self.rng.normal(0.0, c.smooth_sigma, shape), -c.smooth_clip, c.smooth_clip)

    def critic_target_values(self, batch, noise=None):
        a2 = self.actor_target.forward(batch.next_states)
        if noise is None:
            noise = self.smoothing_noise(a2.shape)
        a2 = np.clip(a2 + noise, -1.0, 1.0)
        x2 = critic_input(batch.next_states, a2)
        q1 = self.critic_target.forward(x2)[:, 0]
        q2 = self.critic2_target.forward(x2)[:, 0]
        return twin_min_target(batch.rewards, self.config.gamma, q1, q2, batch.dones)

    def learn(self, batch) -> dict:
        self.learn_steps += 1
        c = self.config
        y = self.critic_target_values(batch)
        loss1 = self._fit_critic(self.critic, batch.states, batch.actions, y)
        loss2 = self._fit_critic(self.critic2, batch.states, batch.actions, y)
        report = {"critic1_loss": loss1, "critic2_loss": loss2, "actor_updated": False}
        if self.learn_steps % c.policy_delay == 0:
            report["actor_loss"] = -self.actor_gradient(batch.states)
            self.actor.adam_step(c.actor_lr)
            soft_update(self.actor_target, self.actor, c.tau)
            soft_update(self.critic_target, self.critic, c.tau)
            soft_update(self.critic2_target, self.critic2, c.tau)
            report["actor_updated"] = True
        return report

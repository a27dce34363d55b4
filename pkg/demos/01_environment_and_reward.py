"""Fly the landing simulator by hand and watch the shaped reward.

A zero command lets the drone drop straight down from its start offset.
A small proportional controller steers it toward the pad center first and
collects the red-zone bonus. Both episodes print their per-step rewards,
and the sum is checked against the change in shaping potential.
"""
import numpy as np

from uavland import LandingEnv
from uavland.env import Termination
from uavland.reward import landed_bonus, shaping


def fly(env, controller, seed):
    s = env.reset(seed=seed)
    phi_0 = shaping(s.position, s.velocity, (0.0, 0.0))
    total = 0.0
    print(f"start at ({s.p_x:+.3f}, {s.p_y:+.3f}, {s.p_z:.1f})")
    while not env.done:
        a = np.clip(controller(env.observe()), -1.0, 1.0)
        out = env.step(a)
        total += out.reward
        if env.steps % 6 == 0 or out.done:
            print(f"  step {env.steps:2d}  z={out.next_state.p_z:5.3f}  r={out.reward:+8.3f}")
    s = out.next_state
    c = landed_bonus(out.zone) if out.termination is Termination.LANDED else 0.0
    phi_t = shaping(s.position, s.velocity, a, c)
    print(f"  {out.termination.value} in zone {out.zone.value}, return {total:.3f}")
    print(f"  telescoping gap {abs(total - (phi_t - phi_0)):.2e}\n")
    return total


if __name__ == "__main__":
    env = LandingEnv()
    print("zero command")
    fly(env, lambda obs: np.zeros(2), seed=4)
    print("proportional steering toward the pad center")
    fly(env, lambda obs: -2.0 * obs[:2] - 0.5 * obs[3:5], seed=4)

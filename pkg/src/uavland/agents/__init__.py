"""Off-policy actor-critic learners: DDPG, TD3 and SAC."""
from __future__ import annotations

import json

import numpy as np

from uavland.agents.common import (
    AgentConfig, entropy, sac_q_target, sac_v_target, twin_min_target,
)
from uavland.agents.ddpg import DdpgAgent
from uavland.agents.sac import SacAgent, squashed_gaussian
from uavland.agents.td3 import Td3Agent
from uavland.nn import Mlp

ALGORITHMS = {"ddpg": DdpgAgent, "td3": Td3Agent, "sac": SacAgent}


class CheckpointError(ValueError):
    pass


def make_agent(algorithm: str, config: AgentConfig | None = None, seed=None, **kwargs):
    try:
        cls = ALGORITHMS[algorithm]
    except KeyError:
        raise ValueError(f"unknown algorithm {algorithm!r}; choose from {sorted(ALGORITHMS)}") from None
    return cls(config, seed=seed, **kwargs)


def save_checkpoint(agent, path, extra: dict | None = None):
    """Write every network plus a JSON manifest (algorithm, agent config, extras) to one .npz."""
    manifest = {"algorithm": agent.algorithm, "agent": agent.config.to_dict(),
                "state_dim": agent.state_dim, "action_dim": agent.action_dim,
                "learn_steps": agent.learn_steps}
    manifest.update(extra or {})
    arrays = {"manifest": np.array(json.dumps(manifest, sort_keys=True))}
    for name, net in agent.networks().items():
        arrays.update(net.to_arrays(prefix=f"{name}/"))
    with open(path, "wb") as fh:
        np.savez(fh, **arrays)


def load_checkpoint(path, algorithm: str | None = None):
    """Rebuild an agent from ``save_checkpoint`` output; returns ``(agent, manifest)``."""
    with np.load(path, allow_pickle=False) as data:
        manifest = json.loads(str(data["manifest"]))
        if algorithm is not None and manifest["algorithm"] != algorithm:
            raise CheckpointError(
                f"checkpoint holds a {manifest['algorithm']} agent, expected {algorithm}")
        agent = make_agent(manifest["algorithm"], AgentConfig.from_dict(manifest["agent"]),
                           state_dim=manifest["state_dim"], action_dim=manifest["action_dim"])
        for name, net in agent.networks().items():
            loaded = Mlp.from_arrays(data, prefix=f"{name}/")
            if not loaded.same_topology(net):
                raise CheckpointError(f"network {name} does not match the manifest config")
            for dst, src in zip(net.parameters(), loaded.parameters()):
                dst[...] = src
    agent.learn_steps = manifest.get("learn_steps", 0)
    return agent, manifest


__all__ = [
    "AgentConfig", "DdpgAgent", "Td3Agent", "SacAgent", "ALGORITHMS", "CheckpointError",
    "make_agent", "save_checkpoint", "load_checkpoint", "entropy", "sac_q_target",
    "sac_v_target", "twin_min_target", "squashed_gaussian",
]

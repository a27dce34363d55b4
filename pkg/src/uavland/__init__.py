"""Reinforcement-learning suite for autonomous quadrotor landing on a pad.

Submodules: ``env`` (simulator), ``reward`` (shaping), ``nn`` (MLP + Adam),
``replay``, ``agents`` (DDPG/TD3/SAC), ``bridge`` (TCP environment protocol)
and ``harness`` (train/evaluate/plot).
"""
from uavland.env import (
    ActionCmd, LandingEnv, ScenarioConfig, StepOutcome, Termination, VehicleState, Zone,
)

__version__ = "0.1.0"

__all__ = ["ActionCmd", "LandingEnv", "ScenarioConfig", "StepOutcome", "Termination",
           "VehicleState", "Zone", "__version__"]

"""Landing simulator: scenario geometry, kinematics and episode lifecycle.

Positions are relative to the top-center of the landing pad, so ``p_z`` is
the height above the pad surface. The vertical speed is not controlled by
the agent; it follows a clamped linear law in the height.
"""
from __future__ import annotations

import enum
import math
from dataclasses import asdict, dataclass, fields

import numpy as np

from uavland import reward as _reward

STATE_DIM = 6
ACTION_DIM = 2


class LifecycleError(RuntimeError):
    """Raised when ``step`` is called on an environment that is not running."""


class Termination(str, enum.Enum):
    RUNNING = "Running"
    LANDED = "Landed"
    TIMEOUT = "TimeOut"
    OUT_OF_RANGE = "OutOfRange"


class Zone(str, enum.Enum):
    NONE = "None"
    RED = "Red"
    GREEN = "Green"
    OFF = "Off"


@dataclass(frozen=True)
class ScenarioConfig:
    dt: float = 0.1
    max_steps: int = 40
    pad_half_green: float = 2.0
    pad_half_red: float = 0.25
    start_height: float = 2.0
    start_box_half: float = 1.0
    alpha_descent: float = 0.8
    v_desc_min: float = 0.2
    v_desc_max: float = 1.5
    landed_threshold: float = 0.05
    abort_radius: float = 5.0
    vel_time_constant: float = 0.3
    a_max: float = 1.0

    def __post_init__(self):
        problems = []
        if not self.dt > 0:
            problems.append("dt must be positive")
        if self.max_steps < 1:
            problems.append("max_steps must be >= 1")
        if not 0 < self.pad_half_red < self.pad_half_green:
            problems.append("need 0 < pad_half_red < pad_half_green")
        if not 0 < self.landed_threshold < self.start_height:
            problems.append("need 0 < landed_threshold < start_height")
        if not self.v_desc_min <= self.v_desc_max:
            problems.append("need v_desc_min <= v_desc_max")
        if not self.vel_time_constant > 0:
            problems.append("vel_time_constant must be positive")
        if self.start_box_half < 0 or self.a_max <= 0 or self.abort_radius <= 0:
            problems.append("start_box_half, a_max and abort_radius must be non-negative/positive")
        if problems:
            raise ValueError("invalid scenario: " + "; ".join(problems))

    @classmethod
    def from_dict(cls, data: dict) -> "ScenarioConfig":
        known = {f.name for f in fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise ValueError(f"unknown scenario fields: {sorted(unknown)}")
        return cls(**data)

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass(frozen=True)
class VehicleState:
    p_x: float
    p_y: float
    p_z: float
    v_x: float
    v_y: float
    v_z: float

    def __post_init__(self):
        if not all(math.isfinite(x) for x in self.as_tuple()):
            raise ValueError(f"non-finite vehicle state: {self.as_tuple()}")

    def as_tuple(self) -> tuple:
        return (self.p_x, self.p_y, self.p_z, self.v_x, self.v_y, self.v_z)

    @property
    def position(self) -> np.ndarray:
        return np.array([self.p_x, self.p_y, self.p_z])

    @property
    def velocity(self) -> np.ndarray:
        return np.array([self.v_x, self.v_y, self.v_z])

    @classmethod
    def from_vector(cls, vec) -> "VehicleState":
        vec = [float(x) for x in vec]
        if len(vec) != STATE_DIM:
            raise ValueError(f"expected {STATE_DIM} components, got {len(vec)}")
        return cls(*vec)


@dataclass(frozen=True)
class ActionCmd:
    """Horizontal velocity command in m/s."""

    a_x: float
    a_y: float

    @classmethod
    def clamped(cls, action, a_max: float = 1.0) -> "ActionCmd":
        a_x, a_y = (float(x) for x in np.asarray(action, dtype=float).reshape(ACTION_DIM))
        if not (math.isfinite(a_x) and math.isfinite(a_y)):
            raise ValueError(f"non-finite action: {(a_x, a_y)}")
        return cls(min(max(a_x, -a_max), a_max), min(max(a_y, -a_max), a_max))

    def as_tuple(self) -> tuple:
        return (self.a_x, self.a_y)


@dataclass(frozen=True)
class StepOutcome:
    next_state: VehicleState
    reward: float
    done: bool
    termination: Termination
    zone: Zone


def observe(state: VehicleState) -> np.ndarray:
    """Pack a state as ``(p_x, p_y, p_z, v_x, v_y, v_z)``, unnormalized."""
    return np.array(state.as_tuple(), dtype=float)


def descent_rate(p_z: float, config: ScenarioConfig = ScenarioConfig()) -> float:
    """Downward speed for a given height: ``clamp(alpha * p_z, v_min, v_max)``."""
    if p_z < 0:
        raise ValueError(f"height must be non-negative, got {p_z}")
    return min(max(config.alpha_descent * p_z, config.v_desc_min), config.v_desc_max)


def classify_zone(p_x: float, p_y: float, config: ScenarioConfig = ScenarioConfig()) -> Zone:
    d = max(abs(p_x), abs(p_y))
    if d <= config.pad_half_red:
        return Zone.RED
    if d <= config.pad_half_green:
        return Zone.GREEN
    return Zone.OFF


def advance(state: VehicleState, action: ActionCmd, steps_done: int,
            config: ScenarioConfig = ScenarioConfig()):
    """Integrate one control period.

    ``steps_done`` is the number of steps already taken in the episode.
    Returns ``(next_state, termination, zone)``.
    """
    gain = config.dt / config.vel_time_constant
    v_x = state.v_x + (action.a_x - state.v_x) * gain
    v_y = state.v_y + (action.a_y - state.v_y) * gain
    v_z = -descent_rate(state.p_z, config)
    p_x = state.p_x + v_x * config.dt
    p_y = state.p_y + v_y * config.dt
    p_z = state.p_z + v_z * config.dt
    nxt = VehicleState(p_x, p_y, p_z, v_x, v_y, v_z)

    if p_z <= config.landed_threshold:
        return nxt, Termination.LANDED, classify_zone(p_x, p_y, config)
    if max(abs(p_x), abs(p_y)) > config.abort_radius:
        return nxt, Termination.OUT_OF_RANGE, Zone.NONE
    if steps_done + 1 >= config.max_steps:
        return nxt, Termination.TIMEOUT, Zone.NONE
    return nxt, Termination.RUNNING, Zone.NONE


class LandingEnv:
    """Seedable single-drone landing environment.

    ``step`` returns the shaped reward: the change in the shaping potential
    between consecutive post-step snapshots.
    """

    state_dim = STATE_DIM
    action_dim = ACTION_DIM

    def __init__(self, config: ScenarioConfig | None = None, seed=None):
        self.config = config or ScenarioConfig()
        self._rng = np.random.default_rng(seed)
        self.state: VehicleState | None = None
        self.steps = 0
        self.done = True
        self._prev_shaping = 0.0

    def reset(self, seed=None, start_xy=None) -> VehicleState:
        """Start a new episode.

        ``seed`` (int or Generator) reseeds the start draw; ``start_xy`` bypasses
        the draw and starts at the given horizontal offset.
        """
        if seed is not None:
            self._rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
        if start_xy is None:
            h = self.config.start_box_half
            p_x, p_y = self._rng.uniform(-h, h, size=2)
        else:
            p_x, p_y = start_xy
        self.state = VehicleState(float(p_x), float(p_y), self.config.start_height, 0.0, 0.0, 0.0)
        self.steps = 0
        self.done = False
        self._prev_shaping = _reward.shaping(self.state.position, self.state.velocity, (0.0, 0.0), 0.0)
        return self.state

    def step(self, action) -> StepOutcome:
        if self.done or self.state is None:
            raise LifecycleError("step() called on a finished episode; call reset() first")
        if isinstance(action, ActionCmd):
            action = action.as_tuple()
        cmd = ActionCmd.clamped(action, self.config.a_max)
        nxt, term, zone = advance(self.state, cmd, self.steps, self.config)
        self.steps += 1
        self.state = nxt
        self.done = term is not Termination.RUNNING

        c = _reward.landed_bonus(zone)
        current = _reward.shaping(nxt.position, nxt.velocity, cmd.as_tuple(), c)
        r = _reward.step_reward(current, self._prev_shaping)
        self._prev_shaping = current
        return StepOutcome(nxt, r, self.done, term, zone)

    def observe(self) -> np.ndarray:
        if self.state is None:
            raise LifecycleError("no state before the first reset()")
        return observe(self.state)

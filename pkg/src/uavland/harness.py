"""Seeded training/evaluation loops, metrics persistence and reward-curve plots."""
from __future__ import annotations

import csv
import functools
import json
import logging
import time
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from uavland.agents import AgentConfig, load_checkpoint, make_agent, save_checkpoint
from uavland.env import LandingEnv, ScenarioConfig, Zone, observe
from uavland.replay import ReplayBuffer, Transition

log = logging.getLogger(__name__)

METRICS_HEADER = ["episode", "return", "steps", "termination", "zone", "wall_ms", "avg50"]
WINDOW = 50
CONVERGENCE_MARGIN = 10.0


@dataclass
class ReplayConfig:
    capacity: int = 100_000
    warmup: int = 1_000


@dataclass
class RunConfig:
    algorithm: str = "sac"
    episodes: int = 600
    seed: int = 0
    scenario: ScenarioConfig = field(default_factory=ScenarioConfig)
    agent: AgentConfig = field(default_factory=AgentConfig)
    replay: ReplayConfig = field(default_factory=ReplayConfig)
    # "builtin" or {"remote": "host:port"}
    env: object = "builtin"
    output_dir: str = "runs/default"
    checkpoint_every: int = 100

    def __post_init__(self):
        if self.algorithm not in ("ddpg", "td3", "sac"):
            raise ValueError(f"unknown algorithm {self.algorithm!r}")
        if self.episodes < 1:
            raise ValueError("episodes must be >= 1")
        if isinstance(self.scenario, dict):
            self.scenario = ScenarioConfig.from_dict(self.scenario)
        if isinstance(self.agent, dict):
            self.agent = AgentConfig.from_dict(self.agent)
        if isinstance(self.replay, dict):
            self.replay = ReplayConfig(**self.replay)
        if self.env != "builtin" and not (isinstance(self.env, dict) and "remote" in self.env):
            raise ValueError(f"env must be 'builtin' or {{'remote': 'host:port'}}, got {self.env!r}")

    @classmethod
    def from_dict(cls, data: dict) -> "RunConfig":
        return cls(**data)

    @classmethod
    def load(cls, path) -> "RunConfig":
        with open(path) as fh:
            return cls.from_dict(json.load(fh))

    def to_dict(self) -> dict:
        d = asdict(self)
        d["agent"] = self.agent.to_dict()
        return d


@dataclass
class EpisodeRecord:
    episode: int
    ret: float
    steps: int
    termination: str
    zone: str
    wall_ms: float
    avg50: float

    def row(self) -> list:
        return [self.episode, repr(self.ret), self.steps, self.termination, self.zone,
                repr(self.wall_ms), repr(self.avg50)]


def make_env(env_spec="builtin", scenario: ScenarioConfig | None = None):
    if env_spec == "builtin":
        return LandingEnv(scenario)
    from uavland.bridge import remote_env
    return remote_env(env_spec["remote"])


def moving_average(values, window=WINDOW) -> np.ndarray:
    """Trailing mean: entry k averages values[max(0, k-window+1) .. k]."""
    v = np.asarray(values, dtype=float)
    csum = np.concatenate([[0.0], np.cumsum(v)])
    k = np.arange(1, len(v) + 1)
    lo = np.maximum(0, k - window)
    return (csum[k] - csum[lo]) / (k - lo)


def straight_down_return(start_xy, scenario: ScenarioConfig | None = None) -> float:
    """Episode return of the zero-command policy from a given horizontal start."""
    env = LandingEnv(scenario)
    env.reset(start_xy=start_xy)
    total = 0.0
    while not env.done:
        total += env.step((0.0, 0.0)).reward
    return total


@functools.lru_cache(maxsize=16)
def convergence_threshold(scenario: ScenarioConfig | None = None, grid=64) -> float:
    """Expected straight-down return over the start box (midpoint rule) plus the margin."""
    scenario = scenario or ScenarioConfig()
    h = scenario.start_box_half
    pts = (np.arange(grid) + 0.5) / grid * 2 * h - h if h > 0 else np.zeros(1)
    mean = float(np.mean([straight_down_return((x, y), scenario) for x in pts for y in pts]))
    return mean + CONVERGENCE_MARGIN


def episodes_to_threshold(returns, threshold, window=WINDOW):
    """First 1-based episode whose full-window moving average exceeds ``threshold``."""
    avg = moving_average(returns, window)
    for k in range(window - 1, len(avg)):
        if avg[k] > threshold:
            return k + 1
    return None


def _seed_streams(seed):
    ss = np.random.SeedSequence(seed)
    env_ss, agent_ss, replay_ss = ss.spawn(3)
    return np.random.default_rng(env_ss), agent_ss, replay_ss


def train(config: RunConfig) -> dict:
    """Run the off-policy loop; writes metrics.csv, timing.csv, config.json, checkpoints."""
    out = Path(config.output_dir)
    (out / "checkpoints").mkdir(parents=True, exist_ok=True)
    with open(out / "config.json", "w") as fh:
        json.dump(config.to_dict(), fh, indent=2, sort_keys=True)

    episode_rng, agent_ss, replay_ss = _seed_streams(config.seed)
    env = make_env(config.env, config.scenario)
    agent = make_agent(config.algorithm, config.agent, seed=agent_ss)
    buffer = ReplayBuffer(config.replay.capacity, seed=replay_ss)
    batch = config.agent.batch
    warmup = max(config.replay.warmup, batch)
    ckpt_extra = {"scenario": config.scenario.to_dict(), "seed": config.seed}

    returns = []
    records = []
    nan_episode = None
    t_start = time.perf_counter()
    metrics_fh = open(out / "metrics.csv", "w", newline="")
    timing_fh = open(out / "timing.csv", "w", newline="")
    try:
        writer = csv.writer(metrics_fh, lineterminator="\n")
        writer.writerow(METRICS_HEADER)
        timing = csv.writer(timing_fh, lineterminator="\n")
        timing.writerow(["episode", "compute_ms"])
        for ep in range(1, config.episodes + 1):
            t0 = time.perf_counter()
            state = env.reset(seed=int(episode_rng.integers(2**63)))
            obs = observe(state)
            ret, steps = 0.0, 0
            while True:
                action = agent.act(obs, explore=True)
                outcome = env.step(action)
                obs2 = observe(outcome.next_state)
                buffer.push(Transition(obs, action, outcome.reward, obs2, outcome.done))
                ret += outcome.reward
                steps += 1
                if len(buffer) >= warmup:
                    agent.learn(buffer.sample_batch(batch))
                obs = obs2
                if outcome.done:
                    break
            returns.append(ret)
            avg = float(np.mean(returns[-WINDOW:]))
            flight_ms = steps * config.scenario.dt * 1000.0
            rec = EpisodeRecord(ep, ret, steps, outcome.termination.value, outcome.zone.value,
                                flight_ms, avg)
            records.append(rec)
            writer.writerow(rec.row())
            metrics_fh.flush()
            timing.writerow([ep, f"{(time.perf_counter() - t0) * 1000.0:.3f}"])
            if nan_episode is None and not agent.all_finite():
                nan_episode = ep
                log.warning("non-finite parameters after episode %d", ep)
            if config.checkpoint_every and ep % config.checkpoint_every == 0:
                save_checkpoint(agent, out / "checkpoints" / f"ckpt_{ep:06d}.npz",
                                dict(ckpt_extra, episode=ep))
    finally:
        metrics_fh.close()
        timing_fh.close()
        if hasattr(env, "close"):
            env.close()

    final = out / "checkpoints" / "final.npz"
    save_checkpoint(agent, final, dict(ckpt_extra, episode=config.episodes))
    threshold = convergence_threshold(config.scenario)
    summary = {
        "algorithm": config.algorithm,
        "seed": config.seed,
        "episodes": config.episodes,
        "threshold": threshold,
        "converged_episode": episodes_to_threshold(returns, threshold),
        "final_avg50": records[-1].avg50,
        "nan_episode": nan_episode,
        "learn_steps": agent.learn_steps,
        "runtime_s": time.perf_counter() - t_start,
        "metrics": str(out / "metrics.csv"),
        "checkpoint": str(final),
    }
    with open(out / "summary.json", "w") as fh:
        json.dump(summary, fh, indent=2, sort_keys=True)
    return summary


def evaluate(checkpoint, episodes: int, seed: int, algorithm: str | None = None,
             scenario: ScenarioConfig | None = None, env_spec="builtin") -> dict:
    """Greedy (exploration-off) evaluation of a saved agent."""
    if episodes < 1:
        raise ValueError("episodes must be >= 1")
    agent, manifest = load_checkpoint(checkpoint, algorithm)
    saved = ScenarioConfig.from_dict(manifest["scenario"]) if "scenario" in manifest else None
    if scenario is not None and saved is not None and scenario != saved:
        raise ValueError("scenario does not match the checkpoint manifest")
    env = make_env(env_spec, scenario or saved)
    rng = np.random.default_rng(seed)
    zones, returns, speeds = [], [], []
    try:
        for _ in range(episodes):
            obs = observe(env.reset(seed=int(rng.integers(2**63))))
            ret = 0.0
            while True:
                outcome = env.step(agent.act(obs, explore=False))
                ret += outcome.reward
                obs = observe(outcome.next_state)
                if outcome.done:
                    break
            zones.append(outcome.zone)
            returns.append(ret)
            speeds.append(float(np.linalg.norm(outcome.next_state.velocity)))
    finally:
        if hasattr(env, "close"):
            env.close()
    success = sum(z in (Zone.RED, Zone.GREEN) for z in zones)
    red = sum(z is Zone.RED for z in zones)
    return {
        "algorithm": manifest["algorithm"],
        "episodes": episodes,
        "success_rate": success / episodes,
        "red_rate": red / episodes,
        "mean_return": float(np.mean(returns)),
        "mean_terminal_speed": float(np.mean(speeds)),
    }


def read_metrics(path) -> dict:
    with open(path, newline="") as fh:
        rows = list(csv.DictReader(fh))
    if not rows:
        raise ValueError(f"{path} holds no episode rows")
    return {
        "episode": np.array([int(r["episode"]) for r in rows]),
        "return": np.array([float(r["return"]) for r in rows]),
        "termination": [r["termination"] for r in rows],
        "zone": [r["zone"] for r in rows],
    }


def plot(metrics_path, image_path, title=None):
    """Reward-per-episode curve with a trailing 50-episode mean overlay."""
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    data = read_metrics(metrics_path)
    avg = moving_average(data["return"])
    fig, ax = plt.subplots(figsize=(7, 4))
    ax.plot(data["episode"], data["return"], lw=0.6, alpha=0.45, label="episode return")
    ax.plot(data["episode"], avg, lw=1.8, label=f"{WINDOW}-episode mean")
    ax.set_xlabel("episode")
    ax.set_ylabel("return")
    ax.set_title(title or Path(metrics_path).parent.name)
    ax.legend(loc="lower right")
    fig.tight_layout()
    fig.savefig(image_path, dpi=120)
    plt.close(fig)
    return avg

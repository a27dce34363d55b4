"""Train an agent, evaluate it greedily and plot its reward curve.

With default hyperparameters SAC usually crosses the convergence threshold
within about 60 episodes, so the default of 150 episodes runs in well under
a minute. Outputs land in ``runs/demo-<algo>`` (override with ``--out``).

    python demos/03_train_and_evaluate.py --algo td3 --episodes 300
"""
import argparse
from pathlib import Path

from uavland.harness import RunConfig, evaluate, plot, train

if __name__ == "__main__":
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--algo", default="sac", choices=["ddpg", "td3", "sac"])
    parser.add_argument("--episodes", type=int, default=150)
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--out")
    args = parser.parse_args()
    out = Path(args.out or f"runs/demo-{args.algo}")

    summary = train(RunConfig(algorithm=args.algo, episodes=args.episodes, seed=args.seed,
                              output_dir=str(out), checkpoint_every=50))
    print(f"threshold {summary['threshold']:.2f}, converged at episode {summary['converged_episode']}, "
          f"final 50-episode mean {summary['final_avg50']:.2f} ({summary['runtime_s']:.0f} s)")

    result = evaluate(summary["checkpoint"], episodes=100, seed=1)
    print(f"greedy: {result['success_rate']:.0%} on the pad, {result['red_rate']:.0%} in the red zone, "
          f"mean terminal speed {result['mean_terminal_speed']:.3f} m/s")

    plot(summary["metrics"], out / "reward.png", title=f"{args.algo.upper()} seed {args.seed}")
    print(f"curve written to {out / 'reward.png'}")

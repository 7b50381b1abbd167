"""Critical mu curves for the subgraph, PLS and CCA methods.

Writes phase_diagram.csv (empty cells mean the method never succeeds on the
mu range) and prints whether the subgraph curve lies below both baselines.
"""
import argparse
import json

from corrspike.harness import ExperimentConfig, Mode, PhaseConfig, run


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--gamma", type=float, default=0.25)
    ap.add_argument("--rho", type=float, default=0.99)
    ap.add_argument("--grid", type=int, default=200)
    ap.add_argument("--lambda-max", type=float, default=1.0)
    ap.add_argument("--out", default="runs/phase")
    args = ap.parse_args()
    cfg = ExperimentConfig(Mode.PHASE_DIAGRAM,
                           phase=PhaseConfig(args.gamma, args.rho, args.grid, args.lambda_max),
                           output_path=args.out)
    print(json.dumps(run(cfg).summary))


if __name__ == "__main__":
    main()

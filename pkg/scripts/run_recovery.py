"""Overlap and conditional-mean diagnostics for pivot-row recovery.

    python scripts/run_recovery.py --config scripts/configs/recover_wigner.json
"""
import argparse
import json

from corrspike.harness import parse_config, run


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--config", required=True)
    ap.add_argument("--out", default="runs/recovery")
    ap.add_argument("--threads", type=int, default=None)
    args = ap.parse_args()
    with open(args.config) as fh:
        cfg = parse_config(fh.read(), {"output_path": args.out, "threads": args.threads})
    man = run(cfg)
    print(json.dumps(man.summary, indent=2))


if __name__ == "__main__":
    main()

"""Mine rules from structureless random walks and report their held-out Q.

Rules found in pure noise should predict no better than chance, so the
mean Q should sit near 1.

    python3 scripts/random_walk_control.py --theta 4 --normalize
    python3 scripts/random_walk_control.py --theta 40
"""

import argparse

import numpy as np

from motifrules.evaluation import evaluate_rule
from motifrules.miner import MinerConfig, find_top_rules
from motifrules.series import TimeSeries


def main():
    ap = argparse.ArgumentParser(description="random-walk negative control")
    ap.add_argument("--seeds", type=int, default=10)
    ap.add_argument("--length", type=int, default=10000)
    ap.add_argument("--theta", type=float, default=4.0)
    ap.add_argument("--tau", type=float, default=101.0)
    ap.add_argument("--normalize", action="store_true")
    ap.add_argument("--repetitions", type=int, default=1000)
    args = ap.parse_args()

    pooled, silent = [], 0
    for seed in range(args.seeds):
        rng = np.random.default_rng(seed)
        A, B, tA, tB = (TimeSeries(np.cumsum(rng.normal(size=args.length))) for _ in range(4))
        cfg = MinerConfig(motif_lengths=[50, 30], tau=args.tau, theta=args.theta, normalize=args.normalize)
        qs = []
        for sr in find_top_rules(A, B, cfg):
            q = evaluate_rule(sr.rule, tA, tB, args.repetitions, seed, args.normalize)["Q"]
            if q is None:
                silent += 1
            else:
                qs.append(q)
        pooled += qs
        print(f"seed {seed}: " + " ".join(f"{q:.3f}" for q in qs))
    print(f"mean Q over {len(pooled)} rules = {np.mean(pooled):.3f} ({silent} never fired)")


if __name__ == "__main__":
    main()

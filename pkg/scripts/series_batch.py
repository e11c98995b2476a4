"""Run the series verifier on random consistent and perturbed jet data; summarize by branch."""
import argparse
from collections import Counter

import numpy as np

from wlab import series_verify as sv


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--count", type=int, default=200)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    rng = np.random.default_rng(args.seed)
    good = sv.verify_batch(sv.consistent_instance(rng) for _ in range(args.count))
    bad = sv.verify_batch(sv.perturbed_instance(rng) for _ in range(args.count))
    print("consistent:", Counter((v.branch, v.consistent) for v in good))
    print("  worst residual %.2e" % max(v.max_relation_residual for v in good))
    print("perturbed:", Counter((v.branch, v.consistent) for v in bad))
    print("  smallest max residual %.2e" % min(v.max_relation_residual for v in bad))
    failing = Counter(name for v in bad for name, r in v.residuals.items() if r > 1e-4)
    print("  relations violated:", dict(failing))


if __name__ == "__main__":
    main()

"""Theorem suites and conjecture harness on fresh random corpora."""

import argparse
import json

from bikemono.scan import conjecture_harness, theorem_suites


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--n-convex", type=int, default=500)
    ap.add_argument("--n-low", type=int, default=100)
    ap.add_argument("--n-conj", type=int, default=50)
    ap.add_argument("--threads", type=int, default=1)
    args = ap.parse_args()
    thm = theorem_suites(seed=args.seed, n_convex=args.n_convex, n_low=args.n_low, threads=args.threads)
    conj = conjecture_harness(seed=args.seed, n=args.n_conj, threads=args.threads)
    short = {k: {kk: (len(vv) if isinstance(vv, list) else vv) for kk, vv in v.items()}
             for k, v in thm.items() if isinstance(v, dict)}
    print(json.dumps({"theorems": short, "ok": thm["ok"], "conjectures": {
        "curves": conj["curves"], "C1": len(conj["C1"]), "C2": len(conj["C2"]),
        "excluded_cells": conj["excluded_cells"]}}, indent=2))


if __name__ == "__main__":
    main()

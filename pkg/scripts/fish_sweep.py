"""Fish front: back tracks for a few bike lengths and the sweep with its elliptic gap."""

import argparse
from pathlib import Path

from bikemono.cli import main as cli_main


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--out", default="results/fish")
    ap.add_argument("--ell", default="0.5:2:150")
    args = ap.parse_args()
    Path(args.out).mkdir(parents=True, exist_ok=True)
    return cli_main(["fish-demo", "--out", args.out, "--ell", args.ell])


if __name__ == "__main__":
    raise SystemExit(main())

"""Monodromy of inscribed polygons against the smooth curve (operator-norm error per vertex count)."""

import argparse

import numpy as np

from bikemono.geom2d import parse_curve_spec
from bikemono.transport import polygonal_convergence


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--curve", default="ellipse:2,1")
    ap.add_argument("--ell", type=float, default=1.0)
    ap.add_argument("--kmax", type=int, default=14)
    args = ap.parse_args()
    ns = [2**k for k in range(3, args.kmax + 1)]
    res = polygonal_convergence(parse_curve_spec(args.curve), ns, args.ell)
    ref = None
    for n, e in zip(res["ns"], res["errors"]):
        rate = "" if ref is None else f"  order {np.log2(ref / e):.3f}"
        print(f"n={n:6d}  error={e:.3e}{rate}")
        ref = e


if __name__ == "__main__":
    main()

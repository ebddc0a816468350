"""Ellipse phase diagram by numerical transport; reports the thin hyperbolic tail with area < pi.

    python3 scripts/ellipse_phase.py --n 30 --threads 4
"""

import argparse
import math
from pathlib import Path

from bikemono.output import phase_grid_svg, write_csv, write_json
from bikemono.scan import MARGINAL, scan_ellipses


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--n", type=int, default=30)
    ap.add_argument("--max", type=float, default=3.0)
    ap.add_argument("--ell", type=float, default=1.0)
    ap.add_argument("--threads", type=int, default=1)
    ap.add_argument("--out", default="results/ellipse")
    args = ap.parse_args()
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    config = vars(args)

    grid = scan_ellipses((args.max / args.n, args.max, args.n), ell=args.ell, threads=args.threads)
    write_csv(out / "ellipses.csv", grid.to_csv_rows(), config)
    phase_grid_svg(grid, config).save(out / "ellipses.svg")

    thin, big_not_hyp = [], []
    for i, a in enumerate(grid.a_values):
        for j, b in enumerate(grid.b_values):
            c = grid.classes[i][j]
            area = math.pi * a * b
            if c == "Hyperbolic" and area < math.pi * args.ell**2:
                thin.append((float(a), float(b)))
            if c not in ("Hyperbolic", MARGINAL) and area > math.pi * args.ell**2:
                big_not_hyp.append((float(a), float(b), c))
    summary = {"counts": grid.counts(), "hyperbolic_small_area": thin, "large_area_not_hyperbolic": big_not_hyp}
    write_json(out / "summary.json", summary, config)
    print({"counts": grid.counts(), "thin": len(thin), "violations": len(big_not_hyp)})


if __name__ == "__main__":
    main()

"""Command-line front end.

Exit codes: 0 success, 1 numerical failure (diagnostic JSON on stderr),
2 usage or parse error, 3 counterexample found by ``verify``.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import asdict, dataclass, field
from pathlib import Path

from bikemono import __version__
from bikemono.geom2d import CurveError, curve_spec_json, fish_front, parse_curve_spec
from bikemono.hyperdev import develop
from bikemono.moebius import PARABOLIC_TOL, MarginalClassificationError
from bikemono.output import (
    backtrack_svg,
    csv_text,
    development_svg,
    dumps_json,
    fish_demo_svg,
    phase_grid_svg,
    sweep_svg,
    write_csv,
    write_json,
)
from bikemono.scan import (
    conjecture_harness,
    invariant_suites,
    parse_range,
    scan_ellipses,
    scan_rectangles,
    sweep_bike_length,
    theorem_suites,
)
from bikemono.tracks import closed_back_tracks
from bikemono.transport import DEFAULT_STEPS, MAX_STEPS, TARGET_ERROR, monodromy


class UsageError(ValueError):
    pass


@dataclass
class RunConfig:
    subcommand: str
    curve: str | None = None
    ell: float = 1.0
    ell_range: str | None = None
    a_range: str | None = None
    b_range: str | None = None
    steps: int = DEFAULT_STEPS
    max_steps: int = MAX_STEPS
    target: float = TARGET_ERROR
    tol: float = PARABOLIC_TOL
    bisection_tol: float = 1e-9
    seed: int = 0
    threads: int = 1
    out: str | None = None
    svg: str | None = None
    json_out: str | None = None
    extra: dict = field(default_factory=dict)

    def validate(self) -> None:
        for name in ("ell", "steps", "max_steps", "target", "tol", "bisection_tol", "threads"):
            if not getattr(self, name) > 0:
                raise UsageError(f"--{name.replace('_', '-')} must be positive")
        if self.steps & (self.steps - 1) or self.steps < 64:
            raise UsageError("--steps must be a power of two >= 64")
        for r in (self.ell_range, self.a_range, self.b_range):
            if r is not None:
                try:
                    parse_range(r)
                except ValueError as exc:
                    raise UsageError(str(exc)) from None
        for path in (self.out, self.svg, self.json_out):
            if path is not None:
                parent = Path(path).resolve().parent
                if not parent.is_dir() or not os.access(parent, os.W_OK):
                    raise UsageError(f"output directory not writable: {parent}")

    def echo(self) -> dict:
        d = asdict(self)
        d["version"] = __version__
        return d


def _emit(text: str, path: str | None) -> None:
    if path is None:
        sys.stdout.write(text)
    else:
        with open(path, "w") as fh:
            fh.write(text)


def _curve(cfg: RunConfig):
    if cfg.curve is None:
        raise UsageError("--curve is required")
    try:
        return parse_curve_spec(cfg.curve)
    except (CurveError, ValueError, json.JSONDecodeError) as exc:
        raise UsageError(f"bad curve spec {cfg.curve!r}: {exc}") from None


def cmd_classify(cfg: RunConfig) -> int:
    curve = _curve(cfg)
    rep = monodromy(curve, cfg.ell, steps=cfg.steps, tol=cfg.tol, target=cfg.target, max_steps=cfg.max_steps)
    _emit(dumps_json({**rep.to_json(), "spec": curve_spec_json(curve)}, cfg.echo()), cfg.out)
    return 0


def cmd_develop(cfg: RunConfig) -> int:
    curve = _curve(cfg)
    dev = develop(curve, cfg.ell, steps=min(cfg.steps, 2**16))
    rows = [("t", "x", "y")] + [(repr(float(t)), repr(float(z.real)), repr(float(z.imag)))
                                for t, z in zip(dev.ts, dev.z)]
    _emit(csv_text(rows, cfg.echo()), cfg.out)
    if cfg.svg:
        development_svg(dev, cfg.echo()).save(cfg.svg)
    return 0


def cmd_backtrack(cfg: RunConfig) -> int:
    curve = _curve(cfg)
    rep = monodromy(curve, cfg.ell, steps=cfg.steps, tol=cfg.tol, target=cfg.target, max_steps=cfg.max_steps)
    tracks = closed_back_tracks(curve, cfg.ell, rep, steps=cfg.steps)
    rows = [("track", "t", "gx", "gy", "theta", "s")]
    for k, bt in enumerate(tracks):
        it = bt.to_csv_rows()
        next(it)
        rows.extend((str(k), *r) for r in it)
    _emit(csv_text(rows, cfg.echo()), cfg.out)
    if cfg.json_out:
        write_json(cfg.json_out, {"monodromy": rep.to_json(), "tracks": [bt.to_json() for bt in tracks]}, cfg.echo())
    if cfg.svg:
        backtrack_svg(curve, tracks, cfg.echo()).save(cfg.svg)
    return 0


def cmd_scan_rect(cfg: RunConfig) -> int:
    grid = scan_rectangles(cfg.a_range or "0.1:4:40", cfg.b_range or cfg.a_range or "0.1:4:40", threads=cfg.threads)
    _emit(csv_text(grid.to_csv_rows(), cfg.echo()), cfg.out)
    if cfg.svg:
        phase_grid_svg(grid, cfg.echo()).save(cfg.svg)
    return 0


def cmd_scan_ellipse(cfg: RunConfig) -> int:
    grid = scan_ellipses(cfg.a_range or "0.1:3:30", cfg.b_range or cfg.a_range or "0.1:3:30", ell=cfg.ell,
                         tol=cfg.tol, threads=cfg.threads)
    _emit(csv_text(grid.to_csv_rows(), cfg.echo()), cfg.out)
    if cfg.svg:
        phase_grid_svg(grid, cfg.echo()).save(cfg.svg)
    return 0


def cmd_sweep(cfg: RunConfig) -> int:
    curve = _curve(cfg)
    lo, hi, n = parse_range(cfg.ell_range or "0.5:2:150")
    res = sweep_bike_length(curve, lo, hi, n, bisection_tol=cfg.bisection_tol, steps=cfg.steps, tol=cfg.tol)
    _emit(csv_text(res.to_csv_rows(), cfg.echo()), cfg.out)
    if cfg.json_out:
        write_json(cfg.json_out, res.to_json(), cfg.echo())
    if cfg.svg:
        sweep_svg(res, cfg.echo()).save(cfg.svg)
    return 0


def cmd_verify(cfg: RunConfig) -> int:
    n_convex = int(cfg.extra.get("n_convex", 500))
    n_low = int(cfg.extra.get("n_low", 100))
    thm = theorem_suites(seed=cfg.seed, n_convex=n_convex, n_low=n_low, tol=cfg.tol, threads=cfg.threads)
    inv = invariant_suites()
    report = {"theorems": thm, "invariants": inv}
    _emit(dumps_json(report, cfg.echo()), cfg.out)
    return 0 if thm["ok"] and inv["ok"] else 3


def cmd_conjectures(cfg: RunConfig) -> int:
    res = conjecture_harness(ells=cfg.ell_range or "0.1:3:30", tol=cfg.tol, threads=cfg.threads, seed=cfg.seed,
                             n=int(cfg.extra.get("n", 50)))
    _emit(dumps_json(res, cfg.echo()), cfg.out)
    return 0


FISH_PANELS = (0.5, 0.8, 1.0, 1.5)


def cmd_fish_demo(cfg: RunConfig) -> int:
    out_dir = Path(cfg.out or ".")
    out_dir.mkdir(parents=True, exist_ok=True)
    front = fish_front()
    panels = []
    for ell in FISH_PANELS:
        panels.append((ell, closed_back_tracks(front, ell)))
    fish_demo_svg(front, panels, cfg.echo()).save(out_dir / "fish_tracks.svg")
    lo, hi, n = parse_range(cfg.ell_range or "0.5:2:150")
    res = sweep_bike_length(front, lo, hi, n, bisection_tol=cfg.bisection_tol, tol=cfg.tol)
    sweep_svg(res, cfg.echo()).save(out_dir / "fish_sweep.svg")
    write_csv(out_dir / "fish_sweep.csv", res.to_csv_rows(), cfg.echo())
    summary = {"panels": [{"ell": ell, "tracks": [bt.to_json() for bt in tr]} for ell, tr in panels],
               "transitions": res.transitions}
    write_json(out_dir / "fish_demo.json", summary, cfg.echo())
    sys.stdout.write(dumps_json({"transitions": res.transitions}, cfg.echo()))
    return 0


COMMANDS = {
    "classify": cmd_classify,
    "develop": cmd_develop,
    "backtrack": cmd_backtrack,
    "scan-rect": cmd_scan_rect,
    "scan-ellipse": cmd_scan_ellipse,
    "sweep-ell": cmd_sweep,
    "verify": cmd_verify,
    "conjectures": cmd_conjectures,
    "fish-demo": cmd_fish_demo,
}


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="bikemono", description="Bicycle monodromy of plane curves.")
    p.add_argument("--version", action="version", version=f"bikemono {__version__}")
    sub = p.add_subparsers(dest="subcommand", required=True)
    env_threads = int(os.environ.get("BIKEMONO_THREADS", "1"))

    def common(sp, curve=False, ell=False, ell_range=False, ab=False, svg=False, json_out=False):
        if curve:
            sp.add_argument("--curve", required=True, help='e.g. "ellipse:2,1", "fish", or a JSON spec')
        if ell:
            sp.add_argument("--ell", type=float, default=1.0, help="bike length (default 1)")
        if ell_range:
            sp.add_argument("--ell", dest="ell_range", help="bike lengths min:max:count")
        if ab:
            sp.add_argument("--a", dest="a_range", help="min:max:count")
            sp.add_argument("--b", dest="b_range", help="min:max:count")
        sp.add_argument("--steps", type=int, default=DEFAULT_STEPS)
        sp.add_argument("--max-steps", type=int, default=MAX_STEPS)
        sp.add_argument("--target", type=float, default=TARGET_ERROR, help="step-doubling target for |tr_n - tr_2n|")
        sp.add_argument("--tol", type=float, default=PARABOLIC_TOL, help="parabolic tolerance on |tr| - 2")
        sp.add_argument("--bisection-tol", type=float, default=1e-9)
        sp.add_argument("--seed", type=int, default=0)
        sp.add_argument("--threads", type=int, default=env_threads, help="worker processes (env BIKEMONO_THREADS)")
        sp.add_argument("--out", help="output file (stdout when omitted)")
        if svg:
            sp.add_argument("--svg", help="also write an SVG figure")
        if json_out:
            sp.add_argument("--json", dest="json_out", help="also write a JSON report")

    common(sub.add_parser("classify", help="monodromy report as JSON"), curve=True, ell=True)
    common(sub.add_parser("develop", help="hyperbolic development as CSV"), curve=True, ell=True, svg=True)
    common(sub.add_parser("backtrack", help="closed back tracks as CSV"), curve=True, ell=True, svg=True,
           json_out=True)
    common(sub.add_parser("scan-rect", help="rectangle phase diagram"), ab=True, svg=True)
    common(sub.add_parser("scan-ellipse", help="ellipse phase diagram"), ab=True, ell=True, svg=True)
    common(sub.add_parser("sweep-ell", help="classes along the bike length"), curve=True, ell_range=True,
           svg=True, json_out=True)
    sp = sub.add_parser("verify", help="theorem and invariant suites; exit 3 on a violation")
    common(sp)
    sp.add_argument("--n-convex", type=int, default=500)
    sp.add_argument("--n-low", type=int, default=100)
    sp = sub.add_parser("conjectures", help="conjecture harness on random strictly convex curves")
    common(sp, ell_range=True)
    sp.add_argument("--n", type=int, default=50)
    common(sub.add_parser("fish-demo", help="fish front: four back-track panels and the ell sweep "
                                            "(--out is a directory)"), ell_range=True)
    return p


def config_from_args(ns: argparse.Namespace) -> RunConfig:
    d = vars(ns).copy()
    extra = {k: d.pop(k) for k in ("n_convex", "n_low", "n") if k in d}
    fields = RunConfig.__dataclass_fields__
    cfg = RunConfig(**{k: v for k, v in d.items() if k in fields}, extra=extra)
    cfg.validate()
    return cfg


def main(argv=None) -> int:
    parser = build_parser()
    ns = parser.parse_args(argv)
    try:
        cfg = config_from_args(ns)
        return COMMANDS[cfg.subcommand](cfg)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"bikemono: error: {exc}", file=sys.stderr)
        return 2
    except (MarginalClassificationError, ArithmeticError, RuntimeError, ValueError) as exc:
        sys.stderr.write(json.dumps({"error": type(exc).__name__, "message": str(exc),
                                     "subcommand": ns.subcommand}, sort_keys=True) + "\n")
        return 1


if __name__ == "__main__":
    sys.exit(main())

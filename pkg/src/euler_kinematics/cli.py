"""``euler-kin`` command line entry point.

Exit codes: 0 success, 2 invalid input, 3 a check command exceeded its tolerance.
"""
import argparse
import logging
import sys

from .commands import COMMANDS, RunConfig, report_text, run
from .errors import EulerKinError
from .scenes import parse_scene

EXIT_OK, EXIT_INVALID, EXIT_TOLERANCE = 0, 2, 3


def _grid(text):
    parts = text.split(",")
    if len(parts) != 3:
        raise argparse.ArgumentTypeError("grid is nr,ns,rmax")
    try:
        return int(parts[0]), int(parts[1]), float(parts[2])
    except ValueError as e:
        raise argparse.ArgumentTypeError(str(e)) from e


def build_parser():
    p = argparse.ArgumentParser(prog="euler-kin", description="Euler calculus and kinematic formulas.")
    p.add_argument("command", choices=COMMANDS)
    p.add_argument("--scene", help="scene JSON file")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--samples", type=int, default=1000)
    p.add_argument("--grid", type=_grid, default=None, help="nr,ns,rmax")
    p.add_argument("--tol", type=float, default=None)
    p.add_argument("--out", help="report path (stdout if omitted)")
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--timing", action="store_true", help="include wall time in JSON reports")
    p.add_argument("-v", "--verbose", action="store_true")
    return p


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        kw = {} if args.grid is None else {"grid": args.grid}
        config = RunConfig(seed=args.seed, samples=args.samples, tolerance=args.tol,
                           output_format=args.format, workers=args.workers, **kw)
        scene = parse_scene(args.scene) if args.scene else None
        report = run(args.command, scene, config)
    except (EulerKinError, OSError) as e:
        code = getattr(e, "code", "io")
        print(f"euler-kin: error[{code}]: {e}", file=sys.stderr)
        return EXIT_INVALID
    text = report_text(report, args.format, timing=args.timing)
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    logging.getLogger(__name__).info("%s finished in %.3f s", args.command, report.wall_time)
    return EXIT_OK if report.passed else EXIT_TOLERANCE


if __name__ == "__main__":
    sys.exit(main())

"""Command line entry point: ``idslab run | validate | list-checks``."""

import argparse
import sys

from .config import FORMATS, serialize_config, validate_config
from .runner import list_checks, run_experiment


def _parser():
    p = argparse.ArgumentParser(prog="idslab", description="Config-driven bound checks and tables.")
    sub = p.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run an experiment config")
    run.add_argument("config", help="path, or name of a bundled config")
    run.add_argument("--seed", type=int, help="override every seed in the config")
    run.add_argument("--out-dir", help="artifact directory (default: output.dir)")
    run.add_argument("--workers", type=int, help="worker processes (default: $IDSLAB_WORKERS or 1)")
    run.add_argument("--format", action="append", choices=FORMATS, dest="formats",
                     help="artifact format; repeat for several (default: output.formats)")

    val = sub.add_parser("validate", help="check a config and print its canonical form")
    val.add_argument("config")

    sub.add_parser("list-checks", help="list the available inequality checks")
    return p


def main(argv=None):
    args = _parser().parse_args(argv)
    if args.command == "list-checks":
        for cid, doc in list_checks():
            print(f"{cid:22s} {doc}")
        return 0

    cfg, errors = validate_config(args.config)
    if errors:
        for e in errors:
            print(f"error: {e}", file=sys.stderr)
        return 2
    if args.command == "validate":
        sys.stdout.write(serialize_config(cfg))
        return 0

    manifest = run_experiment(cfg, out_dir=args.out_dir, workers=args.workers,
                              formats=args.formats, seed=args.seed)
    for k, r in enumerate(manifest.reports):
        status = "PASS" if r.passed else "FAIL"
        print(f"[{status}] {k:02d} {r.check:22s} lhs={float(r.lhs):.6g} rhs={float(r.rhs):.6g} "
              f"margin={float(r.margin):.3g} {r.diagnostic}".rstrip())
    for e in manifest.errors:
        print(f"error: {e}", file=sys.stderr)
    print(f"{len(manifest.reports)} reports, {len(manifest.failed)} failed; artifacts in {manifest.out_dir}")
    return manifest.exit_status


if __name__ == "__main__":
    sys.exit(main())

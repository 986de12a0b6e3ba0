"""Command-line entry point: ``windsolar <verb> [options]``.

Verbs run in order ingest -> fit -> tree -> generate -> ut / validate,
each reading the previous step's files from ``--out`` (or the explicit
path flags). Exit codes: 0 success, 2 validation, 3 fit, 4 I/O.
"""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import pipeline as P
from .dataset import ingest
from .errors import DependencyError, WindSolarError
from .unscented import InputMoments


def _dataset(args):
    path = Path(args.data)
    if not path.exists():
        raise DependencyError(f"data file not found: {path}")
    ds = ingest(path)
    if args.date_from or args.date_to:
        ds = ds.window(args.date_from, args.date_to)
    return ds


def _models_path(args):
    return Path(args.models) if args.models else Path(args.out) / "models.json"


def run_ingest(args, cfg):
    ds = _dataset(args)
    summary = json.dumps(ds.summary(), sort_keys=True, indent=1) + "\n"
    return P.write_files(args.out, {"dataset.csv": ds.to_csv(), "ingest.json": summary})


def run_fit(args, cfg):
    bundle = P.cmd_fit(_dataset(args), cfg)
    return P.write_files(args.out, P.fit_outputs(bundle))


def run_tree(args, cfg):
    tree = P.cmd_tree(P.load_bundle(_models_path(args)), cfg)
    return P.write_files(args.out, P.tree_outputs(tree))


def run_generate(args, cfg):
    bundle = P.load_bundle(_models_path(args))
    sets = P.cmd_generate(bundle, cfg, args.mode)
    return P.write_files(args.out, P.generate_outputs(sets, cfg.require_seed(), args.mode))


def run_ut(args, cfg):
    path = Path(args.moments)
    if not path.exists():
        raise DependencyError(f"moments file not found: {path}")
    moments = InputMoments.from_json(path.read_text(encoding="utf-8"))
    out = P.cmd_ut(cfg, moments)
    return P.write_files(args.out, {"ut.json": out.to_json() + "\n"})


def run_validate(args, cfg):
    bundle = P.load_bundle(_models_path(args))
    scen_dir = Path(args.scenarios) if args.scenarios else Path(args.out)
    _, files = P.cmd_validate(bundle, _dataset(args), scen_dir, cfg)
    return P.write_files(args.out, files)


VERBS = {
    "ingest": run_ingest,
    "fit": run_fit,
    "tree": run_tree,
    "generate": run_generate,
    "ut": run_ut,
    "validate": run_validate,
}


def build_parser():
    parser = argparse.ArgumentParser(
        prog="windsolar",
        description="Wind/PV scenario generation under normal and anomalous weather.",
    )
    sub = parser.add_subparsers(dest="verb", required=True)
    for verb in VERBS:
        p = sub.add_parser(verb)
        p.add_argument("--config", help="PipelineConfig JSON file")
        p.add_argument("--seed", type=int, help="unsigned 64-bit seed (overrides config)")
        p.add_argument("--out", default=".", help="output directory")
        if verb in ("ingest", "fit", "validate"):
            p.add_argument("--data", required=True, help="hourly weather CSV")
            p.add_argument("--from", dest="date_from", help="keep rows at or after this UTC time")
            p.add_argument("--to", dest="date_to", help="keep rows before this UTC time")
        if verb in ("tree", "generate", "validate"):
            p.add_argument("--models", help="models.json (default: <out>/models.json)")
        if verb == "generate":
            p.add_argument("--mode", choices=P.MODES, default="normal")
        if verb == "validate":
            p.add_argument("--scenarios", help="directory holding normal_raw.csv/.json (default: --out)")
        if verb == "ut":
            p.add_argument("--moments", required=True, help='JSON {"mean": [..], "cov": [[..]]}')
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        if args.config and not Path(args.config).exists():
            raise DependencyError(f"config file not found: {args.config}")
        cfg = P.load_config(args.config, args.seed)
        written = VERBS[args.verb](args, cfg)
    except WindSolarError as exc:
        print(f"windsolar {args.verb}: {type(exc).__name__}: {exc}", file=sys.stderr)
        return exc.exit_code
    except OSError as exc:
        print(f"windsolar {args.verb}: {exc}", file=sys.stderr)
        return 4
    except (json.JSONDecodeError, KeyError) as exc:
        print(f"windsolar {args.verb}: malformed input: {exc}", file=sys.stderr)
        return 2
    for path in written:
        print(path)
    return 0


if __name__ == "__main__":
    sys.exit(main())

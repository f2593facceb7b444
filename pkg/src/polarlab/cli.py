"""Command-line entry point: ``polarlab <subcommand> [flags]``.

Structured single results are printed (or written with ``--out``) as JSON,
profiles and sweeps as CSV.  Exit status is 0 on success, 2 on a usage
error and 1 when a computation fails.  ``POLARLAB_LOG`` sets the log level.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import os
import sys
from pathlib import Path

import numpy as np

from . import channel as ch
from . import ensembles as ens
from .polar_code import PolarCodeSpec, design, is_erasure_like
from .polarize import (bec_polarize, polarization_stats, profile_rows, synthesize_all,
                       z_bound_recursion)
from .sim import SimConfig, rows_to_csv, run_sim, sweep

log = logging.getLogger("polarlab")

PROFILE_COLUMNS = ["index", "branch", "eps_or_z", "symmetric_capacity", "cutoff_rate"]


class CliError(Exception):
    """A runtime failure reported with exit status 1."""


def _floats(text: str) -> list[float]:
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}")


def _add_source(p: argparse.ArgumentParser, required: bool = True):
    g = p.add_mutually_exclusive_group(required=required)
    g.add_argument("--bsc", type=float, metavar="P", help="binary symmetric channel")
    g.add_argument("--bec", type=float, metavar="E", help="binary erasure channel")
    g.add_argument("--qec", type=float, metavar="E", help="quaternary erasure channel")
    g.add_argument("--dmc", type=Path, metavar="FILE", help="channel JSON file")


def _source(args) -> tuple[ch.Channel, str, float | None]:
    if args.bsc is not None:
        return ch.bsc(args.bsc), "bsc", args.bsc
    if args.bec is not None:
        return ch.bec(args.bec), "bec", args.bec
    if args.qec is not None:
        return ch.qec(args.qec), "qec", args.qec
    return ch.Channel.from_json(args.dmc.read_text()), "dmc", None


def _factory(kind: str):
    return {"bsc": ch.bsc, "bec": ch.bec, "qec": ch.qec}.get(kind)


def _emit(text: str, out: Path | None):
    if out is None:
        sys.stdout.write(text if text.endswith("\n") else text + "\n")
    else:
        out.write_text(text)
        log.info("wrote %s", out)


def _json(obj) -> str:
    return json.dumps(obj, indent=2) + "\n"


def _csv(rows: list[dict], columns: list[str]) -> str:
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=columns, lineterminator="\n")
    w.writeheader()
    for row in rows:
        w.writerow({k: "" if row.get(k) is None else row[k] for k in columns})
    return buf.getvalue()


# -- subcommands ------------------------------------------------------------

def cmd_channel(args):
    W, _, _ = _source(args)
    _emit(_json(ch.channel_report(W).to_dict()), args.out)


def cmd_polarize(args):
    W, _, _ = _source(args)
    if args.exact:
        rows = profile_rows(exact=synthesize_all(W, args.n, merge=True))
        values = [r["eps_or_z"] for r in rows]
    else:
        z = ch.bhattacharyya(W)
        profile = bec_polarize(z, args.n) if is_erasure_like(W) else z_bound_recursion(z, args.n)
        rows = profile_rows(profile)
        values = profile.values
    stats = polarization_stats(values, args.delta)
    log.info("good %.4f bad %.4f middling %.4f", *stats)
    _emit(_csv(rows, PROFILE_COLUMNS), args.out)


def cmd_construct(args):
    W, _, _ = _source(args)
    pattern = None
    if args.frozen_pattern is not None:
        pattern = [int(b) for b in args.frozen_pattern]
    code = design(W, args.n, args.k, pattern)
    _emit(_json(code.to_dict()), args.out)


def _load_code(args, W) -> PolarCodeSpec:
    if args.code is not None:
        return PolarCodeSpec.from_json(args.code.read_text())
    if args.n is None or args.k is None:
        raise CliError("simulate needs --code or both --n and --k")
    return design(W, args.n, args.k)


def cmd_simulate(args):
    opts = dict(trials=args.trials, master_seed=args.seed, workers=args.workers,
                early_stop=args.early_stop)
    if args.grid is None:
        W, name, param = _source(args)
        report = run_sim(SimConfig(_load_code(args, W), W, channel_name=name,
                                   channel_param=param, **opts))
        if args.csv:
            _emit(rows_to_csv([report.csv_row()]), args.out)
        else:
            _emit(_json(report.to_dict()), args.out)
        return
    kind = next((k for k in ("bsc", "bec", "qec") if getattr(args, k) is not None), None)
    if kind is None:
        raise CliError("--grid needs --bsc, --bec or --qec to name the channel family")
    points = []
    for value in args.grid:
        W = _factory(kind)(value)
        code = _load_code(args, W)
        points.append(SimConfig(code, W, channel_name=kind, channel_param=value, **opts))
    _emit(rows_to_csv(sweep(points)), args.out)


def cmd_schemes(args):
    if args.scheme == "massey":
        report = ens.massey_split(args.eps)
    else:
        G = ens.read_bit_rows(args.generator.read_text())
        report = ens.pinsker_analysis(G, args.p)
    _emit(_json(_plain(report.to_dict())), args.out)


def cmd_ensemble(args):
    W, _, _ = _source(args)
    if args.kind == "pairwise":
        r = ens.ensemble_pairwise_average(args.n, W)
        out = {"N": args.n, **r._asdict()}
    elif args.kind == "guesswork":
        if args.codebook is not None:
            code = ens.BlockCode(ens.read_bit_rows(args.codebook.read_text()))
            out = {"M": code.M, "N": code.N, **ens.guesswork_exact(code, W)._asdict()}
        else:
            if args.n is None or args.m is None:
                raise CliError("guesswork needs --codebook or both --n and --m")
            r = ens.guesswork_ensemble(args.n, args.m, W, samples=args.samples, seed=args.seed)
            out = {"N": args.n, "M": args.m, **r._asdict()}
    else:
        if args.n is None or args.rate is None:
            raise CliError("union needs --n and --rate")
        r = ens.union_bound(args.n, args.rate, None, W)
        out = {"N": args.n, "rate": args.rate, **r._asdict()}
    _emit(_json(_plain(out)), args.out)


def _plain(obj):
    """Convert numpy scalars and arrays into JSON-native values."""
    if isinstance(obj, dict):
        return {k: _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _plain(obj.tolist())
    if isinstance(obj, np.generic):
        return obj.item()
    return obj


# -- parser -----------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="polarlab", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    out_help = "write the result here instead of stdout"

    p = sub.add_parser("channel", help="capacity, cutoff rate and Bhattacharyya parameter")
    _add_source(p)
    p.add_argument("--out", type=Path, help=out_help)
    p.set_defaults(func=cmd_channel)

    p = sub.add_parser("polarize", help="bit-channel profile as CSV")
    _add_source(p)
    p.add_argument("--n", type=int, required=True, help="level, N = 2**n")
    p.add_argument("--exact", action="store_true", help="synthesize bit-channels exactly")
    p.add_argument("--delta", type=float, default=1e-3, help="threshold for the logged fractions")
    p.add_argument("--out", type=Path, help=out_help)
    p.set_defaults(func=cmd_polarize)

    p = sub.add_parser("construct", help="polar code design as JSON")
    _add_source(p)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--frozen-pattern", metavar="BITS", help="frozen bits as a 0/1 string")
    p.add_argument("--out", type=Path, help=out_help)
    p.set_defaults(func=cmd_construct)

    p = sub.add_parser("simulate", help="Monte Carlo FER/BER with SC decoding")
    _add_source(p)
    p.add_argument("--code", type=Path, help="code JSON written by construct")
    p.add_argument("--n", type=int)
    p.add_argument("--k", type=int)
    p.add_argument("--trials", type=int, default=1000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--early-stop", type=int, metavar="ERRORS")
    p.add_argument("--grid", type=_floats, metavar="V1,V2,...",
                   help="sweep the channel parameter; emits CSV")
    p.add_argument("--csv", action="store_true", help="emit a CSV row instead of JSON")
    p.add_argument("--out", type=Path, help=out_help)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("schemes", help="QEC splitting or concatenated inner-code analysis")
    ss = p.add_subparsers(dest="scheme", required=True)
    q = ss.add_parser("massey")
    q.add_argument("--eps", type=float, required=True)
    q.add_argument("--out", type=Path, help=out_help)
    q = ss.add_parser("pinsker")
    q.add_argument("--generator", type=Path, required=True, help="generator rows as 0/1 text")
    q.add_argument("--p", type=float, required=True, help="BSC crossover probability")
    q.add_argument("--out", type=Path, help=out_help)
    p.set_defaults(func=cmd_schemes)

    p = sub.add_parser("ensemble", help="exhaustive random-coding oracles")
    es = p.add_subparsers(dest="kind", required=True)
    for kind in ("pairwise", "guesswork", "union"):
        q = es.add_parser(kind)
        _add_source(q)
        q.add_argument("--n", type=int, required=(kind == "pairwise"))
        if kind == "guesswork":
            q.add_argument("--m", type=int, help="codebook size for ensemble sampling")
            q.add_argument("--codebook", type=Path, help="codewords as 0/1 rows")
            q.add_argument("--samples", type=int, default=200)
            q.add_argument("--seed", type=int, default=0)
        if kind == "union":
            q.add_argument("--rate", type=float)
        q.add_argument("--out", type=Path, help=out_help)
    p.set_defaults(func=cmd_ensemble)
    return parser


def main(argv=None) -> int:
    level = os.environ.get("POLARLAB_LOG", "WARNING").upper()
    logging.basicConfig(level=getattr(logging, level, logging.WARNING),
                        format="%(levelname)s %(name)s: %(message)s")
    args = build_parser().parse_args(argv)  # exits with 2 on usage errors
    try:
        args.func(args)
    except (CliError, ValueError, ArithmeticError, OSError, KeyError) as exc:
        print(f"polarlab {args.command}: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())

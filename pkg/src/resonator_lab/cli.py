"""Command-line front door: one subcommand per library operation.

Output is deterministic for a fixed argv and worker count.  Floats are
printed with 12 significant digits, counts as integers.  Runtime failures
exit 1 with a one-line ``error:CODE message`` diagnostic on stderr; usage
errors exit 2.
"""

import argparse
import io
import json
import logging
import sys

from . import experiments, resonator, smooth
from .characters import all_char_sums, build_group, delta_max
from .errors import ResonatorLabError


def _fmt(value):
    if isinstance(value, bool):
        return str(value).lower()
    if isinstance(value, float):
        return f"{value:.12g}"
    return str(value)


def _write(args, text):
    if getattr(args, "output", None):
        with open(args.output, "w") as handle:
            handle.write(text)
    else:
        sys.stdout.write(text)


def _emit_obj(args, obj, lead=None):
    """One dict as JSON, a single CSV row with header, or a text line."""
    if args.format == "csv":
        flat = {k: v for k, v in obj.items() if not isinstance(v, (list, dict))}
        buf = io.StringIO()
        buf.write(",".join(flat.keys()) + "\n")
        buf.write(",".join("" if v is None else _fmt(v) for v in flat.values()) + "\n")
        _write(args, buf.getvalue())
    elif args.format == "text":
        parts = []
        for key, value in obj.items():
            if key == lead:
                parts.insert(0, _fmt(value))
            else:
                parts.append(f"{key}={_fmt(value)}")
        _write(args, " ".join(parts) + "\n")
    else:
        _write(args, json.dumps(obj, sort_keys=True) + "\n")


def _cmd_psi(args):
    _write(args, f"{smooth.psi(args.x, args.y)}\n")


def _cmd_psiq(args):
    _write(args, f"{smooth.psi_coprime(args.x, args.y, args.q)}\n")


def _cmd_enumerate(args):
    values = smooth.enumerate_smooth(args.x, args.y, budget=args.budget)
    if args.format == "json":
        _write(args, json.dumps({"values": [int(v) for v in values]}) + "\n")
    elif args.format == "csv":
        _write(args, "n\n" + "\n".join(str(int(v)) for v in values) + "\n")
    else:
        _write(args, "\n".join(str(int(v)) for v in values) + "\n")


def _cmd_alpha(args):
    point = smooth.saddle_alpha(args.x, args.y, tol=args.tol)
    _emit_obj(args, {"alpha": point.alpha, "residual": point.residual}, lead="alpha")


def _cmd_charsum(args):
    profile = all_char_sums(args.q, args.x)
    if args.format == "csv":
        buf = io.StringIO()
        profile.to_csv(buf)
        _write(args, buf.getvalue())
    else:
        _write(args, profile.to_json() + "\n")


def _cmd_delta(args):
    value, witness = delta_max(args.x, args.q)
    flat = witness.group.flat_index(witness.index)
    _emit_obj(args, {"delta": value, "witness_index": flat}, lead="delta")


def _cmd_resonate(args):
    cfg = resonator.build_weights(
        args.q, args.x, c=args.c, eps=args.eps, composite_mode=args.composite
    )
    group = build_group(args.q)
    report = resonator.resonance_moments(args.q, args.x, cfg, group=group)
    minorant = resonator.friable_minorant(args.q, args.x, cfg, budget=args.budget)
    report = resonator.with_minorant(report, minorant)
    obj = report.to_json_obj()
    if args.check_trunc:
        orth = resonator.orthogonality_identity_check(
            args.q, cfg, args.check_trunc, group=group, budget=args.budget
        )
        conv = resonator.convolution_identity_check(
            args.q, args.x, cfg, args.check_trunc, group=group, budget=args.budget
        )
        obj["orthogonality_residual"] = orth.relative_residual
        obj["convolution_residual"] = conv.relative_residual
        obj["convolution_min_inner"] = conv.min_inner
    _emit_obj(args, obj)


def _cmd_verify(args):
    record = experiments.verify_instance(
        args.q,
        args.x,
        c=args.c,
        eps=args.eps,
        delta_shrink=args.delta,
        composite_mode=args.composite,
        budget=args.budget,
    )
    _emit_records(args, [record])


def _cmd_sweep(args):
    spec = experiments.ExperimentSpec(
        q_list=tuple(args.q_list),
        x_values=tuple(args.x_list) if args.x_list else None,
        sigma=args.sigma,
        a_exponent=args.a_exponent,
        c=args.c,
        eps=args.eps,
        delta_shrink=args.delta,
        composite_mode=args.composite,
        budget=args.budget,
        workers=args.workers,
    )
    _emit_records(args, experiments.sweep(spec))


def _emit_records(args, records):
    if args.format == "csv":
        buf = io.StringIO()
        experiments.records_to_csv(records, buf)
        _write(args, buf.getvalue())
    else:
        include = bool(getattr(args, "timings", False))
        _write(args, experiments.records_to_json(records, include_timings=include) + "\n")


def _cmd_conjecture(args):
    table = experiments.conjecture_probe(
        args.q, args.x, args.a_exponent, top=args.top, budget=args.budget
    )
    if args.format == "csv":
        buf = io.StringIO()
        cols = ["char_index", "s_re", "s_im", "twisted_re", "twisted_im", "diff_abs"]
        buf.write(",".join(cols) + "\n")
        for row in table["rows"]:
            buf.write(",".join(_fmt(row[c]) for c in cols) + "\n")
        _write(args, buf.getvalue())
    else:
        _write(args, json.dumps(table, sort_keys=True) + "\n")


def _cmd_levels(args):
    table = experiments.levels_table(args.q, args.x, budget=args.budget)
    if args.format == "csv":
        buf = io.StringIO()
        buf.write("name,y,psi\n")
        for row in table["rows"]:
            count = "" if row["psi"] is None else row["psi"]
            buf.write(f"{row['name']},{_fmt(row['y'])},{count}\n")
        _write(args, buf.getvalue())
    else:
        _write(args, json.dumps(table, sort_keys=True) + "\n")


def _int_list(text):
    return [int(part) for part in text.split(",") if part]


def build_parser():
    parser = argparse.ArgumentParser(
        prog="resonator-lab",
        description="Exact character-sum bounds via resonator weights over smooth integers",
    )
    parser.add_argument(
        "-v",
        "--verbose",
        action="count",
        default=0,
        help="log progress details (-vv for debug)",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, budget=True, default_format="json", text=False):
        choices = ["csv", "json"] + (["text"] if text else [])
        p.add_argument("--format", choices=choices, default=default_format)
        p.add_argument("--output", help="write to this path instead of stdout")
        if budget:
            p.add_argument(
                "--budget",
                type=int,
                default=None,
                help="enumeration budget (default: RESONATOR_LAB_BUDGET or 1e7)",
            )

    p = sub.add_parser("psi", help="count of y-smooth integers <= x")
    p.add_argument("--x", type=int, required=True)
    p.add_argument("--y", type=float, required=True)
    common(p, budget=False)
    p.set_defaults(func=_cmd_psi)

    p = sub.add_parser("psiq", help="count of y-smooth integers <= x coprime to q")
    p.add_argument("--x", type=int, required=True)
    p.add_argument("--y", type=float, required=True)
    p.add_argument("--q", type=int, required=True)
    common(p, budget=False)
    p.set_defaults(func=_cmd_psiq)

    p = sub.add_parser("enumerate", help="list the y-smooth integers <= x")
    p.add_argument("--x", type=int, required=True)
    p.add_argument("--y", type=float, required=True)
    common(p, default_format="text", text=True)
    p.set_defaults(func=_cmd_enumerate)

    p = sub.add_parser("alpha", help="saddle point of the smooth-count equation")
    p.add_argument("--x", type=float, required=True)
    p.add_argument("--y", type=float, required=True)
    p.add_argument("--tol", type=float, default=None)
    common(p, budget=False, default_format="text", text=True)
    p.set_defaults(func=_cmd_alpha)

    p = sub.add_parser("charsum", help="all character sums S_chi(x) mod q")
    p.add_argument("--q", type=int, required=True)
    p.add_argument("--x", type=int, required=True)
    common(p, budget=False)
    p.set_defaults(func=_cmd_charsum)

    p = sub.add_parser("delta", help="max |S_chi(x)| over non-principal chi")
    p.add_argument("--q", type=int, required=True)
    p.add_argument("--x", type=int, required=True)
    common(p, budget=False, default_format="text", text=True)
    p.set_defaults(func=_cmd_delta)

    p = sub.add_parser("resonate", help="moment sums, bounds, and minorant")
    p.add_argument("--q", type=int, required=True)
    p.add_argument("--x", type=int, required=True)
    p.add_argument("--c", type=float, default=None)
    p.add_argument("--eps", type=float, default=resonator.DEFAULT_EPS)
    p.add_argument("--composite", action="store_true")
    p.add_argument(
        "--check-trunc",
        type=int,
        default=None,
        metavar="A",
        help="also run the series identity checks truncated at A",
    )
    common(p)
    p.set_defaults(func=_cmd_resonate)

    p = sub.add_parser("verify", help="full certification record for one instance")
    p.add_argument("--q", type=int, required=True)
    p.add_argument("--x", type=int, required=True)
    p.add_argument("--c", type=float, default=None)
    p.add_argument("--eps", type=float, default=resonator.DEFAULT_EPS)
    p.add_argument("--delta", type=float, default=0.05, help="shrink for the comparison count")
    p.add_argument("--composite", action="store_true")
    p.add_argument("--timings", action="store_true", help="include wall-clock timings")
    common(p)
    p.set_defaults(func=_cmd_verify)

    p = sub.add_parser("sweep", help="verify a grid of (q, x) instances")
    p.add_argument("--q-list", type=_int_list, required=True)
    group = p.add_mutually_exclusive_group(required=True)
    group.add_argument("--x-list", type=_int_list)
    group.add_argument("--sigma", type=float)
    group.add_argument("--A", dest="a_exponent", type=float)
    p.add_argument("--c", type=float, default=None)
    p.add_argument("--eps", type=float, default=resonator.DEFAULT_EPS)
    p.add_argument("--delta", type=float, default=0.05)
    p.add_argument("--composite", action="store_true")
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--timings", action="store_true")
    common(p)
    p.set_defaults(func=_cmd_sweep)

    p = sub.add_parser("conjecture", help="character sums vs smooth-sum predictions")
    p.add_argument("--q", type=int, required=True)
    p.add_argument("--x", type=int, required=True)
    p.add_argument("--A", dest="a_exponent", type=float, default=1.0)
    p.add_argument("--top", type=int, default=5)
    common(p)
    p.set_defaults(func=_cmd_conjecture)

    p = sub.add_parser("levels", help="competing smoothness levels at (q, x)")
    p.add_argument("--q", type=int, required=True)
    p.add_argument("--x", type=int, required=True)
    common(p)
    p.set_defaults(func=_cmd_levels)

    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    level = [logging.WARNING, logging.INFO, logging.DEBUG][min(args.verbose, 2)]
    logging.basicConfig(level=level, format="%(levelname)s %(name)s: %(message)s")
    try:
        args.func(args)
    except ResonatorLabError as exc:
        sys.stderr.write(f"error:{exc.code} {exc}\n")
        return 1
    except (ValueError, ArithmeticError) as exc:
        sys.stderr.write(f"error:INTERNAL {exc}\n")
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())

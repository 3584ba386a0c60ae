"""Command-line surface tying the library together.

Conventions: structured reports go to stdout as JSON with sorted keys (so a
rerun with the same arguments is byte-identical), logs go to stderr, tabular
curve/envelope data can be written as CSV, and the envelope can be rendered
as a minimal SVG.  Exit codes: 0 success, 1 an event check ran and the event
does NOT hold, 2 usage or configuration error, 3 I/O error.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from typing import Optional

from . import blocks, bounds, gamma, geometry, properties
from .core import AlphabetDistribution, Sequence, StringPair, backtrace, lcs_length, sample_pair
from .errors import ConfigError, LcsgeomError, ResourceError, UsageError

_BUILTIN_DISTS = {
    "binary-uniform": AlphabetDistribution.binary_uniform,
}


def _parse_dist(text: str) -> AlphabetDistribution:
    if text in _BUILTIN_DISTS:
        return _BUILTIN_DISTS[text]()
    if text.startswith("uniform:"):
        return AlphabetDistribution.uniform(sorted(set(text[len("uniform:"):])))
    if text.lstrip().startswith("{"):
        return AlphabetDistribution.from_json(json.loads(text))
    if os.path.exists(text):
        with open(text, "r", encoding="utf-8") as fh:
            return AlphabetDistribution.from_json(json.load(fh))
    raise ConfigError(
        f"unknown distribution {text!r}: use 'binary-uniform', 'uniform:<chars>', "
        "inline JSON, or a JSON file path"
    )


def _parse_property(text: str) -> properties.PropertySpec:
    if text.lstrip().startswith("{"):
        return properties.PropertySpec.from_json(json.loads(text))
    if os.path.exists(text):
        with open(text, "r", encoding="utf-8") as fh:
            return properties.PropertySpec.from_json(json.load(fh))
    return properties.PropertySpec(text)


def _sanitize(obj):
    """JSON has no NaN/Infinity; map non-finite floats to null."""
    if isinstance(obj, float) and not math.isfinite(obj):
        return None
    if isinstance(obj, dict):
        return {k: _sanitize(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_sanitize(v) for v in obj]
    return obj


def _emit(obj, out=None) -> None:
    (out or sys.stdout).write(
        json.dumps(_sanitize(obj), sort_keys=True, allow_nan=False) + "\n"
    )


def _write_payload(path: str, payload: str) -> None:
    if path == "-":
        sys.stdout.write(payload)
        return
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(payload)


def _log(msg: str) -> None:
    print(msg, file=sys.stderr)


def _resolve_pair(args) -> StringPair:
    literal = args.x is not None or args.y is not None
    sampled = args.n is not None
    if literal and sampled:
        raise UsageError("give either a literal pair (--x/--y) or a sampled one (--n)")
    if literal:
        if args.x is None or args.y is None:
            raise UsageError("--x and --y must be given together")
        alphabet = _parse_dist(args.dist) if args.dist else None
        return StringPair.from_text(args.x, args.y, alphabet)
    if sampled:
        if args.seed is None:
            raise UsageError("sampled pairs need --seed")
        dist = _parse_dist(args.dist or "binary-uniform")
        len_y = args.len_y if getattr(args, "len_y", None) else args.n
        return sample_pair(dist, args.n, len_y, args.seed)
    raise UsageError("no input pair: give --x/--y or --n/--seed")


def _add_pair_args(sub, with_len_y: bool = True) -> None:
    sub.add_argument("--x", help="literal x string")
    sub.add_argument("--y", help="literal y string")
    sub.add_argument("--dist", help="alphabet distribution (name, inline JSON, or file)")
    sub.add_argument("--n", type=int, help="sampled length of x (and y unless --len-y)")
    if with_len_y:
        sub.add_argument("--len-y", dest="len_y", type=int, help="sampled length of y")
    sub.add_argument("--seed", type=int, help="master seed for sampling")


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="lcsgeom",
        description="Exact LCS alignment geometry, cut-vector events, "
        "rate-curve Monte Carlo, and bound arithmetic.",
    )
    parser.add_argument("--config", help="JSON file whose entries override flags")
    parser.add_argument(
        "--threads",
        type=int,
        default=int(os.environ.get("LCSGEOM_THREADS", "1")),
        help="worker cap for Monte Carlo loops (env LCSGEOM_THREADS)",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_lcs = sub.add_parser("lcs", help="LCS length (and one optimal alignment)")
    _add_pair_args(p_lcs)
    p_lcs.add_argument("--trace", action="store_true", help="print matched index pairs")
    p_lcs.add_argument("--json", action="store_true", help="emit a JSON report")

    p_env = sub.add_parser("envelope", help="match-point envelope and figure export")
    _add_pair_args(p_env, with_len_y=False)
    p_env.add_argument("--p1", type=float, default=0.5)
    p_env.add_argument("--eps", type=float, default=0.05)
    p_env.add_argument("--k", type=int, default=2)
    p_env.add_argument("--csv", help="CSV output path ('-' for stdout)")
    p_env.add_argument("--json", dest="json_out", help="JSON output path ('-' for stdout)")
    p_env.add_argument("--svg", help="SVG output path ('-' for stdout)")

    p_ea = sub.add_parser("event-a", help="exact interval-event check")
    _add_pair_args(p_ea, with_len_y=False)
    p_ea.add_argument("--k", type=int, required=True)
    p_ea.add_argument("--eps", type=float, required=True)
    p_ea.add_argument("--p1", type=float, required=True)
    p_ea.add_argument("--p2", type=float, required=True)

    p_eb = sub.add_parser("event-b", help="exact property-event check")
    _add_pair_args(p_eb, with_len_y=False)
    p_eb.add_argument("--k", type=int, required=True)
    p_eb.add_argument("--eps", type=float, required=True)
    p_eb.add_argument("--property", required=True, help="property id or JSON spec")

    p_g = sub.add_parser("gamma", help="rate-curve Monte Carlo")
    p_g.add_argument("--dist", default="binary-uniform")
    p_g.add_argument("--n", type=int, required=True)
    p_g.add_argument("--trials", type=int, required=True)
    p_g.add_argument("--seed", type=int, required=True)
    mode = p_g.add_mutually_exclusive_group(required=True)
    mode.add_argument("--p", type=float, help="single point of the p-curve")
    mode.add_argument("--q", type=float, help="single point of the q-curve")
    mode.add_argument("--grid", help="comma-separated increasing p grid")
    mode.add_argument("--delta", action="store_true", help="curvature-gap estimate")
    p_g.add_argument("--p1", type=float, help="left ratio for --delta")
    p_g.add_argument("--p2", type=float, help="right ratio for --delta")
    p_g.add_argument("--csv", help="CSV output path for --grid ('-' for stdout)")

    p_b = sub.add_parser("bounds", help="closed-form bound evaluation")
    p_b.add_argument(
        "which",
        choices=["thm1", "thm2", "thm3", "entropy", "binom", "cardinality",
                 "improved", "g", "q-basic"],
    )
    p_b.add_argument("--n", type=int)
    p_b.add_argument("--k", type=int)
    p_b.add_argument("--m", type=int)
    p_b.add_argument("--eps", type=float)
    p_b.add_argument("--delta", type=float)
    p_b.add_argument("--p1", type=float)
    p_b.add_argument("--p2", type=float)
    p_b.add_argument("--eps1", type=float)
    p_b.add_argument("--eps2", type=float)
    p_b.add_argument("--t", type=float, help="argument for 'entropy'")

    p_qk = sub.add_parser("qk", help="worst-window failure probability of a property")
    p_qk.add_argument("--dist", default="binary-uniform")
    p_qk.add_argument("--property", required=True)
    p_qk.add_argument("--k", type=int, required=True)
    p_qk.add_argument("--p1", type=float, required=True)
    p_qk.add_argument("--p2", type=float, required=True)
    p_qk.add_argument("--trials", type=int, default=0)
    p_qk.add_argument("--seed", type=int, default=0)
    p_qk.add_argument("--exact-below", dest="exact_below", type=int, default=2**20)
    p_qk.add_argument("--csv", help="CSV output path ('-' for stdout)")

    p_f = sub.add_parser("feasibility", help="Monte Carlo feasibility arithmetic")
    p_f.add_argument("--eps", type=float, required=True)
    p_f.add_argument("--delta", type=float, required=True)
    p_f.add_argument("--eps1", type=float)
    p_f.add_argument("--eps2", type=float)
    p_f.add_argument("--p1", type=float)
    p_f.add_argument("--p2", type=float)
    p_f.add_argument("--q-hat", dest="q_hat", type=float)

    sub.add_parser("paper-check", help="run the worked-example conformance battery")

    return parser


def _cmd_lcs(args) -> int:
    pair = _resolve_pair(args)
    length = lcs_length(pair.x, pair.y)
    pairs = backtrace(pair.x, pair.y) if args.trace else None
    if args.json:
        obj = {"length": length}
        if pairs is not None:
            obj["alignment"] = [[i, j] for i, j in pairs]
            obj["subsequence"] = "".join(pair.x.text[i - 1] for i, _ in pairs)
        _emit(obj)
    else:
        print(length)
        if pairs is not None:
            for i, j in pairs:
                print(f"{i}\t{j}\t{pair.x.text[i - 1]}")
    return 0


def _cmd_envelope(args) -> int:
    pair = _resolve_pair(args)
    env = geometry.envelope(pair.x, pair.y)
    band = None
    if len(pair.x) > 0:
        band = geometry.DiagonalBand(p1=args.p1, eps=args.eps, k=args.k, n=env.n)
    wrote = False
    for path, fmt in ((args.csv, "csv"), (args.json_out, "json"), (args.svg, "svg")):
        if path:
            _write_payload(path, geometry.export_figure(env, band, fmt))
            wrote = True
            if path != "-":
                _log(f"wrote {fmt} to {path}")
    if not wrote:
        raise UsageError("no output requested: give at least one of --csv/--json/--svg")
    return 0


def _cmd_event_a(args) -> int:
    pair = _resolve_pair(args)
    params = blocks.EventAParams(eps=args.eps, p1=args.p1, p2=args.p2, k=args.k)
    report = blocks.check_event_A(pair.x, pair.y, params)
    _emit(report.to_json())
    return 0 if report.holds else 1


def _cmd_event_b(args) -> int:
    pair = _resolve_pair(args)
    spec = _parse_property(args.property)
    report = properties.check_event_B(pair.x, pair.y, args.k, args.eps, spec)
    _emit(report.to_json())
    return 0 if report.holds else 1


def _cmd_gamma(args) -> int:
    dist = _parse_dist(args.dist)
    if args.p is not None:
        est = gamma.estimate_gamma_star(
            dist, args.p, args.n, args.trials, args.seed, threads=args.threads
        )
        _emit(est.to_json())
    elif args.q is not None:
        est = gamma.estimate_gamma_q(
            dist, args.q, args.n, args.trials, args.seed, threads=args.threads
        )
        _emit(est.to_json())
    elif args.grid is not None:
        grid = [float(v) for v in args.grid.split(",") if v.strip()]
        curve = gamma.sweep_curve(
            dist, grid, args.n, args.trials, args.seed, threads=args.threads
        )
        if args.csv:
            _write_payload(args.csv, curve.to_csv())
        else:
            _emit(curve.to_json())
    else:
        if args.p1 is None or args.p2 is None:
            raise UsageError("--delta needs --p1 and --p2")
        est = gamma.estimate_delta(
            dist, args.p1, args.p2, args.n, args.trials, args.seed,
            threads=args.threads,
        )
        _emit(est.to_json())
    return 0


def _require(args, *names) -> None:
    missing = [n for n in names if getattr(args, n, None) is None]
    if missing:
        raise UsageError(f"missing required flags: {', '.join('--' + n for n in missing)}")


def _theorem_params(args) -> bounds.TheoremParams:
    _require(args, "n", "k", "eps", "delta")
    return bounds.TheoremParams(
        n=args.n, k=args.k, eps=args.eps, delta=args.delta,
        p1=args.p1, p2=args.p2, eps1=args.eps1, eps2=args.eps2,
    )


def _cmd_bounds(args) -> int:
    which = args.which
    if which == "entropy":
        _require(args, "t")
        _emit({"t": args.t, "entropy_e": bounds.entropy_e(args.t)})
    elif which == "binom":
        _require(args, "n", "m")
        log_bound, log_exact = bounds.binom_upper(args.n, args.m)
        _emit({"n": args.n, "m": args.m, "log_bound": log_bound, "log_exact": log_exact})
    elif which == "q-basic":
        _require(args, "k", "eps")
        _emit({"k": args.k, "eps": args.eps, **bounds.required_q_basic(args.k, args.eps)})
    elif which == "g":
        _require(args, "k", "eps1", "eps2", "delta", "p1", "p2")
        val = bounds.g_function(args.k, args.eps1, args.eps2, args.delta, args.p1, args.p2)
        _emit({"log10": val})
    elif which == "cardinality":
        _emit(bounds.cardinality_bound_improved(_theorem_params(args)))
    elif which == "improved":
        _emit(bounds.improved_conditions(_theorem_params(args)))
    else:
        fn = {"thm1": bounds.thm1_bound, "thm2": bounds.thm2_bound,
              "thm3": bounds.thm3_bound}[which]
        _emit(fn(_theorem_params(args)).to_json())
    return 0


def _cmd_qk(args) -> int:
    dist = _parse_dist(args.dist)
    spec = _parse_property(args.property)
    est = properties.estimate_qk(
        dist, spec, args.k, args.p1, args.p2, args.trials, args.seed,
        exact_below=args.exact_below,
    )
    if args.csv:
        _write_payload(args.csv, est.to_csv())
    else:
        _emit(est.to_json())
    return 0


def _cmd_feasibility(args) -> int:
    report = bounds.feasibility_report(
        eps=args.eps, delta=args.delta, eps1=args.eps1, eps2=args.eps2,
        p1=args.p1, p2=args.p2, q_hat=args.q_hat,
    )
    _emit(report)
    return 0


def _paper_checks() -> list[tuple[str, object, object]]:
    """(name, expected, got) rows for the worked-example battery."""
    rows: list[tuple[str, object, object]] = []

    pair = StringPair.from_text("christian", "krystyan")
    rows.append(("lcs christian/krystyan", 5, lcs_length(pair.x, pair.y)))
    spelled = "".join(pair.x.text[i - 1] for i, _ in backtrace(pair.x, pair.y))
    rows.append(("trace christian/krystyan", "rstan", spelled))

    pair = StringPair.from_text("0010", "0110")
    rows.append(("lcs 0010/0110", 3, lcs_length(pair.x, pair.y)))

    pair = StringPair.from_text("mother", "mutter")
    rows.append(("lcs mother/mutter", 4, lcs_length(pair.x, pair.y)))
    spelled = "".join(pair.x.text[i - 1] for i, _ in backtrace(pair.x, pair.y))
    rows.append(("trace mother/mutter", "mter", spelled))
    pts = geometry.match_points(pair.x, pair.y)
    rows.append(
        ("match points mother/mutter",
         sorted({(1, 1), (3, 3), (3, 4), (5, 5), (6, 6)}), sorted(pts))
    )

    rows.append(("ratio p=1 maps to q=0", 0.0, gamma.convert_p_to_q(1.0)))
    rows.append(("q=0 maps back to p=1", 1.0, gamma.convert_q_to_p(0.0)))

    # count bound at n = m*k collapses to m*ln(e*k)
    n, m = 12, 4
    log_bound, _ = bounds.binom_upper(n, m)
    rows.append(
        ("choose bound equals (ek)^m at n=mk",
         round(m * math.log(math.e * n / m), 12), round(log_bound, 12))
    )

    p = bounds.TheoremParams(n=1000, k=2, eps=0.5, delta=0.5)
    rows.append(
        ("band bound is twice the interval bound",
         round(math.log(2.0), 12),
         round(bounds.thm2_bound(p).log_value - bounds.thm1_bound(p).log_value, 12))
    )
    rows.append(("interval bound vacuous at k=2", True, bounds.thm1_bound(p).vacuous))

    rows.append(("entropy at 1/2 equals ln 2",
                 round(math.log(2.0), 12), round(bounds.entropy_e(0.5), 12)))

    # failure-budget collapse when q = (6k)^(-1/eps2) and the count base is 3
    tp = bounds.TheoremParams(n=100, k=10, eps=0.3, delta=0.2,
                              p1=0.5, p2=2.0, eps1=0.1, eps2=0.2)
    q = (6 * 10) ** (-1 / 0.2)
    got = properties.bound_event_B(tp, q, mode="basic", cardinality_base=3.0)
    expected = 10 * (bounds.entropy_e(0.2) - math.log(2.0))
    rows.append(
        ("failure budget collapse at q=(6k)^(-1/eps2)",
         round(expected, 9), round(got.terms["log_counting_term"], 9))
    )

    fr = bounds.feasibility_report(eps=0.2, delta=0.1)
    rows.append(
        ("basic scenario: least k within 3 decades of 1.26e6",
         True, abs(math.log10(fr["basic"]["k_min"]) - math.log10(1.26e6)) <= 3)
    )
    rows.append(
        ("basic scenario: budget at most 1e-66",
         True, fr["basic"]["q_threshold_log10"] <= -66)
    )

    # split scenarios evaluated at the published round k
    probe = bounds.TheoremParams(n=10**5, k=10**5, eps=0.3, delta=0.2,
                                 p1=0.8, p2=1.2, eps1=0.1, eps2=0.2)
    lead = bounds.improved_conditions(probe)["leading_log10"]
    rows.append(("split scenario eps2=0.2 near 1e-25", True, abs(lead + 25) <= 2))
    probe3 = bounds.TheoremParams(n=10**5, k=10**5, eps=0.4, delta=0.2,
                                  p1=0.8, p2=1.2, eps1=0.1, eps2=0.3)
    lead3 = bounds.improved_conditions(probe3)["leading_log10"]
    rows.append(("split scenario eps2=0.3 near 1e-15", True, abs(lead3 + 15) <= 2))
    probe_qk = bounds.TheoremParams(n=1000, k=1000, eps=0.5, delta=0.2,
                                    p1=0.95, p2=1.05, eps1=0.1, eps2=0.4)
    lead_qk = bounds.improved_conditions(probe_qk)["leading_log10"]
    rows.append(("window-only scenario near 1e-5", True, abs(lead_qk + 5) <= 2))

    return rows


def _cmd_paper_check(args) -> int:
    rows = _paper_checks()
    width = max(len(name) for name, _, _ in rows)
    failures = 0
    for name, expected, got in rows:
        ok = expected == got
        failures += 0 if ok else 1
        print(f"{name:<{width}}  {'PASS' if ok else 'FAIL'}  "
              f"expected={expected!r} got={got!r}")
    print(f"{'-' * width}")
    print(f"{len(rows) - failures}/{len(rows)} checks passed")
    return 0 if failures == 0 else 1


_HANDLERS = {
    "lcs": _cmd_lcs,
    "envelope": _cmd_envelope,
    "event-a": _cmd_event_a,
    "event-b": _cmd_event_b,
    "gamma": _cmd_gamma,
    "bounds": _cmd_bounds,
    "qk": _cmd_qk,
    "feasibility": _cmd_feasibility,
    "paper-check": _cmd_paper_check,
}


def _apply_config(args: argparse.Namespace) -> None:
    if not args.config:
        return
    with open(args.config, "r", encoding="utf-8") as fh:
        overrides = json.load(fh)
    if not isinstance(overrides, dict):
        raise ConfigError("--config file must hold a JSON object")
    for key, value in overrides.items():
        attr = key.replace("-", "_")
        if not hasattr(args, attr):
            raise ConfigError(f"config key {key!r} does not match any flag")
        setattr(args, attr, value)


def main(argv: Optional[list[str]] = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        _apply_config(args)
        return _HANDLERS[args.command](args)
    except (UsageError, ConfigError, ResourceError, json.JSONDecodeError) as exc:
        _log(f"error: {exc}")
        return 2
    except LcsgeomError as exc:
        _log(f"error: {exc}")
        return 2
    except OSError as exc:
        _log(f"i/o error: {exc}")
        return 3


if __name__ == "__main__":
    raise SystemExit(main())

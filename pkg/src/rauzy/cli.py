"""Command-line interface: ``rauzy bound|table|verify|render|export-matrix``.

Settings resolve as: command-line flag > ``RAUZY_*`` environment variable >
TOML config file (``--config`` or ``RAUZY_CONFIG``) > built-in default.

Exit codes: 0 success, 1 condition fails / lemma violation, 2 usage error,
3 internal error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import re
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_INTERNAL = 0, 1, 2, 3
M_WARN = 12

DEFAULTS = {
    "format": "text",
    "threads": 1,
    "places": 4,
    "series_tol": 1e-8,
    "slack": 1e-12,
    "lo": 0.5,
    "hi": 0.99,
    "cap": 12,
    "samples": 10_000,
    "points": 1000,
}
_TYPES = {"format": str, "threads": int, "places": int, "series_tol": float, "slack": float,
          "lo": float, "hi": float, "cap": int, "samples": int, "points": int}

SUITES = ("lemmas", "appendix", "cover", "number", "word", "decay", "renewal", "all")


class UsageError(Exception):
    pass


def _load_toml(path: str) -> dict:
    try:
        import tomllib  # type: ignore[import-not-found]
    except ModuleNotFoundError:  # Python < 3.11
        import tomli as tomllib
    try:
        with open(path, "rb") as fh:
            return tomllib.load(fh)
    except OSError as exc:
        raise UsageError(f"cannot read config {path}: {exc.strerror}") from exc
    except tomllib.TOMLDecodeError as exc:
        raise UsageError(f"bad config {path}: {exc}") from exc


def resolve(args: argparse.Namespace, environ=os.environ) -> dict:
    """Merge flags, environment, config file and defaults for the tunable settings."""
    config_path = args.config or environ.get("RAUZY_CONFIG")
    config = {}
    if config_path:
        raw = _load_toml(config_path)
        config = {k.replace("-", "_"): v for k, v in raw.items() if not isinstance(v, dict)}
        section = raw.get(args.command, {})
        config.update({k.replace("-", "_"): v for k, v in section.items()})
    out = {}
    for key, default in DEFAULTS.items():
        flag = getattr(args, key, None)
        env = environ.get(f"RAUZY_{key.upper()}")
        try:
            if flag is not None:
                out[key] = flag
            elif env is not None:
                out[key] = _TYPES[key](env)
            elif key in config:
                out[key] = _TYPES[key](config[key])
            else:
                out[key] = default
        except ValueError as exc:
            raise UsageError(f"invalid value for {key}: {exc}") from exc
    if out["format"] not in ("text", "json", "csv"):
        raise UsageError(f"unknown format {out['format']!r}")
    if out["threads"] < 1:
        raise UsageError("threads must be >= 1")
    if out["places"] < 0 or out["places"] > 10:
        raise UsageError("places must lie in [0, 10]")
    if out["series_tol"] <= 0 or out["slack"] < 0:
        raise UsageError("tolerances must be positive")
    return out


def parse_m_range(text: str) -> list[int]:
    """'5' -> [5]; '2..9' -> [2, ..., 9] (empty when the end precedes the start); '2,4' -> [2, 4]."""
    text = text.strip()
    m = re.fullmatch(r"(\d+)\s*\.\.\s*(\d+)", text)
    if m:
        a, b = int(m.group(1)), int(m.group(2))
        ms = list(range(a, b + 1))
    elif re.fullmatch(r"\d+(\s*,\s*\d+)*", text):
        ms = [int(x) for x in text.split(",")]
    else:
        raise UsageError(f"cannot parse m range {text!r} (use N, A..B or A,B,C)")
    if any(x < 2 for x in ms):
        raise UsageError("m must be at least 2")
    return ms


def _m_value(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"invalid integer {text!r}")
    if v < 2:
        raise argparse.ArgumentTypeError("m must be at least 2")
    return v


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("text", "json", "csv"), default=None,
                        help="output format (default: text)")
    common.add_argument("--output", "-o", default=None, help="write results here instead of stdout")
    common.add_argument("--threads", type=int, default=None, help="worker threads (default: 1)")
    common.add_argument("--config", default=None, help="TOML file with default settings")
    common.add_argument("--quiet", "-q", action="store_true", help="no progress on stderr")

    solver_opts = argparse.ArgumentParser(add_help=False)
    solver_opts.add_argument("--places", type=int, default=None, help="decimal places of delta_m (default: 4)")
    solver_opts.add_argument("--series-tol", type=float, default=None,
                             help="certified width of the tail series (default: 1e-8)")
    solver_opts.add_argument("--slack", type=float, default=None,
                             help="relative inflation of every B entry (default: 1e-12)")
    solver_opts.add_argument("--lo", type=float, default=None, help="lower end of the delta bracket (default: 0.5)")
    solver_opts.add_argument("--hi", type=float, default=None, help="upper end of the delta bracket (default: 0.99)")

    parser = argparse.ArgumentParser(prog="rauzy", description="Certified Hausdorff dimension bounds for the Rauzy gasket.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("bound", parents=[common, solver_opts], help="certify one m (and optionally one delta)")
    p.add_argument("--m", type=_m_value, required=True, help="depth of the index words (>= 2)")
    p.add_argument("--delta", type=float, default=None, help="evaluate the condition at this delta only")

    p = sub.add_parser("table", parents=[common, solver_opts], help="delta_m + 1 for a range of m")
    p.add_argument("--m", required=True, help="N, A..B or A,B,C")

    p = sub.add_parser("verify", parents=[common], help="exhaustive lemma checks at small depth")
    p.add_argument("--suite", choices=SUITES, default="all")
    p.add_argument("--n", type=int, default=None, help="longest word length enumerated (default: 7; cover 6; decay 10)")
    p.add_argument("--m", type=_m_value, default=None, help="restrict to one m (default: 2 and 3)")
    p.add_argument("--delta", type=float, default=None, help="restrict to one delta")
    p.add_argument("--cap", type=int, default=None, help="enumeration cap (default: 12)")
    p.add_argument("--samples", type=int, default=None, help="grid size for g (default: 10000)")
    p.add_argument("--points", type=int, default=None, help="rational points for alpha and h (default: 1000)")
    p.add_argument("--xn-csv", default=None, help="decay suite: also write (n, X_n) bounds as CSV")

    p = sub.add_parser("render", parents=[common], help="SVG of the level-n triangles")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--cap", type=int, default=None)
    p.add_argument("--size", type=float, default=800.0, help="picture width in px")

    p = sub.add_parser("export-matrix", parents=[common], help="dump B as a Matrix Market file")
    p.add_argument("--m", type=_m_value, required=True)
    p.add_argument("--delta", type=float, required=True)
    p.add_argument("--rounding", choices=("up", "down", "nearest"), default="up")
    p.add_argument("--slack", type=float, default=None)
    return parser


# --------------------------------------------------------------------------- commands


@dataclass
class Result:
    text: str
    status: int = EXIT_OK


def _progress(quiet: bool):
    if quiet:
        return None

    def report(m, delta, lhs):
        print(f"  m={m} delta={delta:.10f} lhs={lhs:.10g}", file=sys.stderr)

    return report


def _warn_m(ms, quiet: bool) -> None:
    big = [m for m in ms if m > M_WARN]
    if big and not quiet:
        print(f"warning: m > {M_WARN} needs (3^m-3)/2 + 1 states; this may exhaust memory", file=sys.stderr)


def cmd_bound(args, cfg) -> Result:
    from rauzy.solver import BoundConfig, probe_report, solve_delta

    _warn_m([args.m], args.quiet)
    if args.delta is not None:
        rep = probe_report(args.m, args.delta, cfg["series_tol"], cfg["slack"])
    else:
        config = BoundConfig(args.m, cfg["lo"], cfg["hi"], cfg["places"], cfg["series_tol"], cfg["slack"])
        rep = solve_delta(config, progress=_progress(args.quiet))
    status = EXIT_OK if rep.verdict == "holds" else EXIT_FAIL
    fmt = cfg["format"]
    if fmt == "json":
        return Result(json.dumps(rep.to_dict(), sort_keys=True, indent=2) + "\n", status)
    if fmt == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["m", "delta", "factor1", "factor2", "lhs", "verdict", "dimension_bound"])
        w.writerow([rep.m, repr(rep.delta), repr(rep.factor1), repr(rep.factor2), repr(rep.lhs), rep.verdict,
                    rep.bound_text()])
        return Result(buf.getvalue(), status)
    lines = [f"m = {rep.m}"]
    if args.delta is None:
        lines.append(f"delta_m = {rep.delta:.{rep.places}f} "
                     f"(rounded up to {rep.places} places, {rep.iterations} evaluations)")
    else:
        lines.append(f"delta = {rep.delta!r}")
    lines += [
        f"first factor  <= {rep.factor1:.12g}",
        f"second factor <= {rep.factor2:.12g}",
        f"LHS           <= {rep.lhs:.12g}",
        f"verdict: {rep.verdict}",
    ]
    if args.delta is None or rep.verdict == "holds":
        lines.append(f"dim_H ≤ {rep.bound_text()}")
    return Result("\n".join(lines) + "\n", status)


def cmd_table(args, cfg) -> Result:
    from rauzy.solver import BoundConfig, solve_delta

    ms = parse_m_range(args.m)
    _warn_m(ms, args.quiet)

    def run(m):
        if not args.quiet:
            print(f"solving m={m}", file=sys.stderr)
        try:
            config = BoundConfig(m, cfg["lo"], cfg["hi"], cfg["places"], cfg["series_tol"], cfg["slack"])
            return m, solve_delta(config), None
        except (ValueError, ArithmeticError, RuntimeError) as exc:
            return m, None, f"{type(exc).__name__}: {exc}"

    if cfg["threads"] > 1 and len(ms) > 1:
        with ThreadPoolExecutor(max_workers=cfg["threads"]) as pool:
            results = list(pool.map(run, ms))
    else:
        results = [run(m) for m in ms]
    ok = [(m, r) for m, r, e in results if r is not None]
    failed = [(m, e) for m, r, e in results if r is None]
    for m, e in failed:
        print(f"error: m={m}: {e}", file=sys.stderr)
    status = EXIT_FAIL if failed else EXIT_OK
    fmt = cfg["format"]
    if fmt == "json":
        doc = {"rows": [r.to_dict() for _, r in ok], "failures": [{"m": m, "error": e} for m, e in failed]}
        return Result(json.dumps(doc, sort_keys=True, indent=2) + "\n", status)
    if fmt == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["m", "dimension_bound"])
        for m, r in ok:
            w.writerow([m, r.bound_text()])
        return Result(buf.getvalue(), status)
    lines = [" m | delta_m + 1", "---+------------"]
    lines += [f"{m:>2} | {r.bound_text()}" for m, r in ok]
    return Result("\n".join(lines) + "\n", status)


def _verify_reports(args, cfg) -> list:
    from rauzy import appendix, oracle

    cap = cfg["cap"]
    suite = args.suite
    deltas = [args.delta] if args.delta is not None else list(oracle.LEMMA_SUITE_DELTAS)
    ms = [args.m] if args.m is not None else list(oracle.LEMMA_SUITE_MS)
    n = args.n
    reports = []

    def note(name):
        if not args.quiet:
            print(f"running {name}", file=sys.stderr)

    if suite in ("lemmas", "all"):
        note("lemmas")
        reports += oracle.lemma_suite(n or 7, deltas, ms, cap)
    if suite == "number":
        note("number lemma")
        for m in ms:
            for d in deltas:
                parts = [oracle.verify_number_lemma(k, d, m, cap=cap) for k in range(2, n or 7)]
                reports.append(oracle._combine("number-lemma", parts, m, d))
    if suite == "word":
        note("word lemma")
        for m in ms:
            for d in deltas:
                parts = [oracle.verify_word_lemma(k, d, m, cap) for k in range(m + 1, n or 7)]
                reports.append(oracle._combine("word-lemma", parts, m, d))
    if suite in ("cover", "all"):
        note("cover")
        for d in deltas:
            reports.append(oracle.verify_cover_construction(n or 6, d, cap))
    if suite in ("decay", "all"):
        note("decay")
        from rauzy.solver import solve_delta

        m = args.m or 3
        d = args.delta if args.delta is not None else solve_delta(m).delta + 0.01
        rep = oracle.verify_decay(d, range(1, (n or 10) + 1), cap)
        rep.m = m
        reports.append(rep)
        if args.xn_csv:
            rows = [(r["n"], r["lower"], r["upper"]) for r in rep.info["series"]]
            oracle.write_xn_csv(rows, args.xn_csv)
    if suite == "renewal":
        note("renewal constant")
        for m in ms:
            for d in deltas:
                top = min(cap, 12)
                parts = [oracle.verify_renewal_constant(k, d, m, cap) for k in range(1, top - m)]
                reports.append(oracle._combine("renewal-constant", parts, m, d))
    if suite in ("appendix", "all"):
        note("appendix")
        reports += appendix.verify_appendix(cfg["samples"], cfg["points"])
    return reports


def cmd_verify(args, cfg) -> Result:
    if args.n is not None and args.n < 1:
        raise UsageError("--n must be positive")
    reports = _verify_reports(args, cfg)
    status = EXIT_OK if all(r.passed for r in reports) else EXIT_FAIL
    fmt = cfg["format"]
    if fmt == "json":
        return Result(json.dumps([r.to_dict() for r in reports], sort_keys=True, indent=2) + "\n", status)
    if fmt == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["lemma", "n", "m", "delta", "checked_count", "worst_slack", "violations"])
        for r in reports:
            w.writerow([r.lemma, r.n, r.m, r.delta, r.checked_count, repr(r.worst_slack), len(r.violations)])
        return Result(buf.getvalue(), status)
    lines = []
    for r in reports:
        tag = "PASS" if r.passed else "FAIL"
        where = " ".join(f"{k}={v}" for k, v in (("n", r.n), ("m", r.m), ("delta", r.delta)) if v is not None)
        lines.append(f"{tag} {r.lemma:<16} {where:<28} checked={r.checked_count} worst_slack={r.worst_slack:.3g}")
        for v in r.violations:
            lines.append("  " + json.dumps(v, sort_keys=True, default=float))
    return Result("\n".join(lines) + "\n", status)


def cmd_render(args, cfg) -> Result:
    from rauzy.render import render_svg

    if args.n < 0:
        raise UsageError("--n must be nonnegative")
    return Result(render_svg(args.n, size=args.size, cap=cfg["cap"]))


def cmd_export_matrix(args, cfg) -> Result:
    from rauzy.transition import build_B, export_matrix

    _warn_m([args.m], args.quiet)
    B = build_B(args.m, args.delta, slack=cfg["slack"], rounding=args.rounding)
    buf = io.BytesIO()
    export_matrix(B, buf)
    return Result(buf.getvalue().decode("ascii"))


COMMANDS = {
    "bound": cmd_bound,
    "table": cmd_table,
    "verify": cmd_verify,
    "render": cmd_render,
    "export-matrix": cmd_export_matrix,
}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # argparse reports usage errors with status 2
        return int(exc.code or 0)
    from rauzy.oracle import CapExceeded
    from rauzy.solver import BracketError, MonotonicityError

    try:
        cfg = resolve(args)
        result = COMMANDS[args.command](args, cfg)
    except (UsageError, CapExceeded) as exc:
        print(f"rauzy: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (BracketError, MonotonicityError) as exc:
        print(f"rauzy: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_FAIL
    except ValueError as exc:
        print(f"rauzy: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except Exception as exc:  # noqa: BLE001 - last-resort mapping to the internal-error code
        print(f"rauzy: internal error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INTERNAL
    try:
        if args.output:
            with open(args.output, "w", encoding="utf-8") as fh:
                fh.write(result.text)
        else:
            sys.stdout.write(result.text)
            sys.stdout.flush()
    except OSError as exc:
        print(f"rauzy: cannot write output: {exc}", file=sys.stderr)
        return EXIT_USAGE
    return result.status


if __name__ == "__main__":
    sys.exit(main())

"""Command-line entry point: ``dea-bench validate | run | screen | synth``.

Exit codes: 0 success, 1 empty or failed study, 2 input error.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from . import outliers
from .bootstrap import BootstrapConfig
from .composites import PAN_EUROPEAN_WEIGHT, WeightKind, WeightScheme
from .data_model import Method, RTS
from .errors import DeaBenchError, EmptyPanel, InvalidRecord, SchemaMismatch, UnreadableFile
from .ingest import DEFAULT_MIN_YEAR, IngestOptions, load_panel
from .models import BUILTIN_NAMES, load_models
from .reporting import write_report
from .study import StudyPlan, run_study

EXIT_OK, EXIT_EMPTY, EXIT_INPUT = 0, 1, 2

_METHODS = {
    "radial": Method.RADIAL,
    "super": Method.SUPER,
    "sbm": Method.SBM,
    "bootstrap": Method.BOOTSTRAP,
}


def parse_years(text: str) -> list[int]:
    """``2008:2018`` (inclusive), ``2016`` or ``2008,2010,2012``."""
    years: list[int] = []
    for part in text.split(","):
        part = part.strip()
        if not part:
            continue
        if ":" in part:
            lo, hi = (int(p) for p in part.split(":", 1))
            if hi < lo:
                raise argparse.ArgumentTypeError(f"empty year range {part!r}")
            years.extend(range(lo, hi + 1))
        else:
            years.append(int(part))
    if not years:
        raise argparse.ArgumentTypeError("no years given")
    return sorted(set(years))


def _years(text: str) -> list[int]:
    try:
        return parse_years(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _csv_list(text: str) -> list[str]:
    return [t.strip() for t in text.split(",") if t.strip()]


def _rts_list(text: str) -> list[RTS]:
    try:
        return [RTS(t.upper()) for t in _csv_list(text)]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _method_list(text: str) -> list[Method]:
    out = []
    for t in _csv_list(text):
        if t.lower() not in _METHODS:
            raise argparse.ArgumentTypeError(f"unknown method {t!r}; choose from {', '.join(_METHODS)}")
        out.append(_METHODS[t.lower()])
    return out


def _u64(text: str) -> int:
    v = int(text)
    if not 0 <= v < 2**64:
        raise argparse.ArgumentTypeError("seed must be an unsigned 64-bit integer")
    return v


def _models(arg: str):
    """Comma list of built-in names, or a path to a JSON model file."""
    if Path(arg).is_file():
        return load_models(arg)
    return load_models(_csv_list(arg))


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="dea-bench",
        description="Benchmark service providers with data envelopment analysis.",
        formatter_class=argparse.ArgumentDefaultsHelpFormatter,
    )
    p.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = p.add_subparsers(dest="command", required=True)
    fmt = argparse.ArgumentDefaultsHelpFormatter

    v = sub.add_parser("validate", help="check a panel CSV and print the ingest report", formatter_class=fmt)
    v.add_argument("--data", required=True, help="panel CSV")
    v.add_argument("--min-year", type=int, default=DEFAULT_MIN_YEAR, help="drop rows before this year")
    v.add_argument("--strict", action="store_true", help="fail on the first invalid row instead of dropping it")

    r = sub.add_parser("run", help="run the models x years x RTS x methods study", formatter_class=fmt)
    r.add_argument("--data", required=True, help="panel CSV")
    r.add_argument("--models", default=",".join(BUILTIN_NAMES), help="built-in model names or a JSON model file")
    r.add_argument("--years", type=_years, default=None, help="start:end inclusive or comma list; default all panel years")
    r.add_argument("--rts", type=_rts_list, default=[RTS.CRS, RTS.VRS], help="crs,vrs")
    r.add_argument(
        "--methods",
        type=_method_list,
        default=[Method.RADIAL, Method.SUPER, Method.SBM, Method.BOOTSTRAP],
        help="subset of radial,super,sbm,bootstrap",
    )
    r.add_argument("--seed", type=_u64, default=0, help="master seed for all randomness")
    r.add_argument("--replications", type=int, default=1000, help="bootstrap replications")
    r.add_argument("--weights", choices=[k.value.lower() for k in WeightKind], default="paneuropean",
                   help="composite weighting scheme")
    r.add_argument("--w-pan", type=float, default=PAN_EUROPEAN_WEIGHT, help="pan-European CFH weight")
    r.add_argument("--w-ciu", type=float, default=None, help="CIU weight (defaults to --w-pan)")
    r.add_argument("--min-year", type=int, default=DEFAULT_MIN_YEAR, help="drop rows before this year")
    r.add_argument("--threshold", type=float, default=outliers.DEFAULT_THRESHOLD, help="outlier super-efficiency threshold")
    r.add_argument("--config", default=None, help="JSON file with plan settings; explicit flags win")
    r.add_argument("--out", required=True, help="output directory")

    s = sub.add_parser("screen", help="flag dominant units by super-efficiency", formatter_class=fmt)
    s.add_argument("--data", required=True, help="panel CSV")
    s.add_argument("--models", default=",".join(BUILTIN_NAMES), help="built-in model names or a JSON model file")
    s.add_argument("--years", type=_years, default=None, help="start:end inclusive or comma list; default all panel years")
    s.add_argument("--rts", type=_rts_list, default=[RTS.CRS, RTS.VRS], help="crs,vrs")
    s.add_argument("--threshold", type=float, default=outliers.DEFAULT_THRESHOLD, help="super-efficiency threshold")
    s.add_argument("--min-hit-share", type=float, default=outliers.DEFAULT_MIN_HIT_SHARE,
                   help="share of runs above threshold needed to flag")
    s.add_argument("--min-year", type=int, default=DEFAULT_MIN_YEAR, help="drop rows before this year")
    s.add_argument("--format", choices=("text", "json"), default="text", help="report format")

    g = sub.add_parser("synth", help="write a synthetic demo panel", formatter_class=fmt)
    g.add_argument("--out", required=True, help="CSV path to write")
    g.add_argument("--dmus", type=int, default=30, help="number of providers")
    g.add_argument("--years", type=_years, default=parse_years("2008:2018"), help="start:end inclusive")
    g.add_argument("--seed", type=_u64, default=0, help="generator seed")
    g.add_argument("--planted", default=None, help="code of a planted dominant unit, e.g. MUAC")
    return p


def cmd_validate(args) -> int:
    try:
        _, report = load_panel(args.data, IngestOptions(args.min_year, strict=args.strict))
    except (SchemaMismatch, UnreadableFile, InvalidRecord) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except EmptyPanel as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_EMPTY
    print(json.dumps(report.to_dict(), indent=2, sort_keys=True))
    return EXIT_OK


_CONFIG_KEYS = {"models", "years", "rts", "methods", "seed", "replications", "weights", "w_pan", "w_ciu",
                "min_year", "threshold", "confidence_level", "unity_tolerance", "trend_r2", "min_hit_share"}


def _apply_config(args, parser) -> dict:
    """Fill args from ``--config`` wherever the flag was left at its default."""
    extra: dict = {}
    if not args.config:
        return extra
    cfg = json.loads(Path(args.config).read_text(encoding="utf-8"))
    unknown = set(cfg) - _CONFIG_KEYS
    if unknown:
        raise ValueError(f"unknown config key(s): {', '.join(sorted(unknown))}")
    defaults = vars(parser.parse_args(["run", "--data", args.data, "--out", args.out]))
    for key, value in cfg.items():
        if key in ("confidence_level", "unity_tolerance", "trend_r2", "min_hit_share"):
            extra[key] = value
            continue
        if getattr(args, key) != defaults[key]:
            continue
        if key == "models":
            value = load_models(value)
        elif key == "years":
            value = parse_years(value) if isinstance(value, str) else [int(y) for y in value]
        elif key == "rts":
            value = [RTS(str(v).upper()) for v in (_csv_list(value) if isinstance(value, str) else value)]
        elif key == "methods":
            value = _method_list(value if isinstance(value, str) else ",".join(value))
        setattr(args, key, value)
    return extra


def cmd_run(args, parser) -> int:
    try:
        extra = _apply_config(args, parser)
        specs = args.models if isinstance(args.models, list) else _models(args.models)
        weights = WeightScheme(
            WeightKind.INDIVIDUAL if args.weights.lower() == "individual" else WeightKind.PAN_EUROPEAN,
            args.w_pan,
            args.w_ciu,
        )
        panel, ingest = load_panel(args.data, IngestOptions(args.min_year))
        plan = StudyPlan(
            specs,
            args.years or panel.years,
            args.rts,
            args.methods,
            BootstrapConfig(args.replications, args.seed, confidence_level=extra.get("confidence_level", 0.95)),
            weights,
            unity_tolerance=extra.get("unity_tolerance", 1e-6),
            trend_r2=extra.get("trend_r2", 0.6),
            outlier_threshold=args.threshold,
            min_hit_share=extra.get("min_hit_share", outliers.DEFAULT_MIN_HIT_SHARE),
        )
    except EmptyPanel as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_EMPTY
    except (DeaBenchError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    report = run_study(panel, plan)
    out = write_report(report, args.out, ingest)
    for key, reason in sorted(report.failed.items(), key=lambda kv: kv[0].filename):
        print(f"failed: {key.filename[:-4]}: {reason}", file=sys.stderr)
    print(f"{len(report.tables)} of {plan.n_cells} tables written to {out}")
    return EXIT_OK if report.tables else EXIT_EMPTY


def cmd_screen(args) -> int:
    try:
        specs = _models(args.models)
        panel, _ = load_panel(args.data, IngestOptions(args.min_year))
        rep = outliers.screen(
            panel,
            specs,
            args.years or panel.years,
            args.threshold,
            args.min_hit_share,
            rts_set=args.rts,
        )
    except (DeaBenchError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    if args.format == "json":
        print(json.dumps(rep.to_dict(), indent=2, sort_keys=True))
    else:
        print(rep.to_text())
    return EXIT_OK


def cmd_synth(args) -> int:
    from .synthetic import make_panel, write_csv

    write_csv(make_panel(args.dmus, args.years, args.seed, args.planted), args.out)
    print(f"wrote {args.out}")
    return EXIT_OK


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.ERROR, format="%(levelname)s %(message)s")
    if args.command == "validate":
        return cmd_validate(args)
    if args.command == "run":
        return cmd_run(args, parser)
    if args.command == "screen":
        return cmd_screen(args)
    return cmd_synth(args)


if __name__ == "__main__":
    sys.exit(main())

"""Command-line front end.

Subcommands: scenario, simulate, analyze, sweep, list.  Progress and log
messages go to standard error; data goes to standard output or to files
under --out, so pipelines stay clean.

Exit codes: 0 success/match, 2 usage or validation error, 3 scenario
verdict mismatch, 4 numerical divergence.
"""

import argparse
import json
import logging

import os
import sys

import numpy as np

from .analysis import detect_lock, equilibria, lpf_band_check, stability_reports
from .core import LoopConfig, omega_delta_free, validate
from .dynamics import ModelVariant
from .integrate import IntegrationDivergedError, SimPlan, make_plan, simulate
from .scenarios import DEFAULT_POLARITY, POLARITY_CALIBRATION, catalog, run_all

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_MISMATCH = 3
EXIT_DIVERGED = 4

log = logging.getLogger("qpsk_costas")

_VARIANTS = {
    "signal-space": ModelVariant.SIGNAL_SPACE,
    "baseband-lpf": ModelVariant.BASEBAND_LPF,
    "averaged-phase": ModelVariant.AVERAGED_PHASE,
}


class CliError(Exception):
    """Usage or validation failure; maps to exit code 2."""


def _base_config_dict() -> dict:
    from .scenarios import base_config
    return base_config().to_json_dict()


def _apply_override(doc: dict, key: str, raw: str) -> None:
    """Set a dotted-path key in a config JSON document, rejecting unknown keys."""
    parts = key.split(".")
    node = doc
    for p in parts[:-1]:
        if not isinstance(node, dict) or p not in node:
            raise CliError(f"unknown config key: {key}")
        node = node[p]
    leaf = parts[-1]
    if not isinstance(node, dict) or leaf not in node:
        raise CliError(f"unknown config key: {key}")
    try:
        node[leaf] = json.loads(raw)
    except json.JSONDecodeError:
        node[leaf] = raw


def _load_config(args) -> LoopConfig:
    if getattr(args, "config", None):
        with open(args.config) as fh:
            doc = json.load(fh)
    else:
        doc = _base_config_dict()
    for ov in getattr(args, "override", None) or []:
        if "=" not in ov:
            raise CliError(f"override must be key=value, got {ov!r}")
        key, raw = ov.split("=", 1)
        _apply_override(doc, key, raw)
    try:
        cfg = LoopConfig.from_json_dict(doc)
    except (KeyError, TypeError, ValueError) as exc:
        raise CliError(f"bad config document: {exc}") from exc
    violations = validate(cfg)
    if violations:
        raise CliError("invalid config: " + "; ".join(violations))
    return cfg


def _make_plan(args, cfg: LoopConfig, variant: ModelVariant) -> SimPlan:
    try:
        return make_plan(cfg, variant, args.t_end,
                         dt=args.dt, decimation=args.decimation)
    except ValueError as exc:
        raise CliError(str(exc)) from exc


def _emit(args, name: str, text: str) -> None:
    """Write one artifact to --out/<name>, or to stdout when no --out."""
    if args.out:
        os.makedirs(args.out, exist_ok=True)
        path = os.path.join(args.out, name)
        with open(path, "w") as fh:
            fh.write(text)
        log.info("wrote %s", path)
    else:
        sys.stdout.write(text)
        if not text.endswith("\n"):
            sys.stdout.write("\n")


def cmd_scenario(args) -> int:
    ids = None if "all" in args.ids else list(dict.fromkeys(args.ids))
    known = {s.id for s in catalog(args.polarity)}
    unknown = [i for i in (ids or []) if i not in known]
    if unknown:
        raise CliError(f"unknown scenario ids: {', '.join(unknown)}")
    keep = args.dump_traces or args.figures
    if keep and not args.out:
        raise CliError("--dump-traces/--figures require --out")
    table = run_all(ids=ids, jobs=args.jobs, keep_traces=keep,
                    polarity=args.polarity)
    doc = table.to_json_dict()
    doc["polarity_calibration"] = POLARITY_CALIBRATION
    _emit(args, "verdicts.json", json.dumps(doc, indent=2, sort_keys=True))
    print(table.to_text(), file=sys.stderr)
    for row in table.rows:
        for side, trace in row.traces.items():
            if args.dump_traces:
                trace.to_csv(os.path.join(args.out, f"{row.scenario_id}_{side}.csv"))
        if args.figures and row.traces:
            from .report import plot_scenario
            plot_scenario(row.scenario_id, row.traces, row.expected,
                          os.path.join(args.out, f"{row.scenario_id}.png"))
    return EXIT_OK if table.all_match else EXIT_MISMATCH


def cmd_simulate(args) -> int:
    cfg = _load_config(args)
    variant = _VARIANTS[args.variant]
    plan = _make_plan(args, cfg, variant)
    log.info("simulate %s: t_end=%g dt=%g decimation=%d",
             variant.value, plan.t_end, plan.dt, plan.decimation)
    trace = simulate(cfg, plan)
    verdict = detect_lock(trace, cfg)
    if args.out:
        os.makedirs(args.out, exist_ok=True)
        trace.to_csv(os.path.join(args.out, "trace.csv"))
        log.info("wrote %s", os.path.join(args.out, "trace.csv"))
        if args.figures:
            from .report import plot_trace
            plot_trace(trace, os.path.join(args.out, "trace.png"),
                       title=f"{variant.value} (digest {trace.config_digest})")
    _emit(args, "verdict.json",
          json.dumps(verdict.to_json_dict(), indent=2, sort_keys=True))
    return EXIT_OK


def cmd_analyze(args) -> int:
    cfg = _load_config(args)
    eq = equilibria(cfg)
    stab = stability_reports(cfg)
    odf = abs(omega_delta_free(cfg))
    band_low = args.band_low if args.band_low is not None else (
        odf if odf > 0 else 0.05 * cfg.omega_ref)
    band_high = args.band_high if args.band_high is not None else 2.0 * cfg.omega_ref
    doc = {
        "equilibria": eq.to_json_dict(),
        "stability": [s.to_json_dict() for s in stab],
        "band_check": {
            "omega_low": band_low,
            "omega_high": band_high,
            "lpf1": lpf_band_check(cfg.lpf1, band_low, band_high).to_json_dict(),
            "lpf2": lpf_band_check(cfg.lpf2, band_low, band_high).to_json_dict(),
        },
    }
    _emit(args, "analysis.json", json.dumps(doc, indent=2, sort_keys=True))
    return EXIT_OK


def cmd_sweep(args) -> int:
    if args.n < 1:
        raise CliError("--n must be >= 1")
    base_doc_args = args
    values = np.linspace(args.lo, args.hi, args.n)
    variant = _VARIANTS[args.variant]
    rows = []
    for v in values:
        doc_args = argparse.Namespace(**vars(base_doc_args))
        doc_args.override = list(args.override or []) + [f"{args.key}={float(v)}"]
        try:
            cfg = _load_config(doc_args)
        except CliError:
            raise
        plan = _make_plan(args, cfg, variant)
        trace = simulate(cfg, plan)
        verdict = detect_lock(trace, cfg)
        rows.append((float(v), verdict))
        log.info("sweep %s=%.9g -> %s", args.key, v,
                 "lock" if verdict.locked else "no-lock")
    if args.format == "json":
        doc = [{args.key: v, "locked": r.locked,
                "mean_freq_error": r.mean_freq_error,
                "final_theta_mod": r.final_theta_mod} for v, r in rows]
        _emit(args, "sweep.json", json.dumps(doc, indent=2))
    else:
        lines = [f"{args.key},locked,mean_freq_error,final_theta_mod"]
        for v, r in rows:
            lines.append("%.17g,%d,%.17g,%.17g"
                         % (v, int(r.locked), r.mean_freq_error, r.final_theta_mod))
        _emit(args, "sweep.csv", "\n".join(lines) + "\n")
    return EXIT_OK


def cmd_list(args) -> int:
    lines = []
    for s in catalog(args.polarity):
        lines.append(f"{s.id:<6} red={s.expected['red']:<8} "
                     f"black={s.expected['black']:<8} {s.description}")
    _emit(args, "scenarios.txt", "\n".join(lines) + "\n")
    return EXIT_OK


def _add_config_args(p):
    p.add_argument("--config", help="config JSON file (default: built-in base config)")
    p.add_argument("--override", action="append", metavar="KEY=VALUE",
                   help="dotted-key config override, value parsed as JSON; "
                        "unknown keys are rejected")


def _add_plan_args(p):
    p.add_argument("--variant", choices=sorted(_VARIANTS), default="signal-space")
    p.add_argument("--t-end", type=float, default=10e-3, dest="t_end")
    p.add_argument("--dt", type=float, default=None)
    p.add_argument("--decimation", type=int, default=None)


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="qpsk-costas",
        description="QPSK Costas loop simulation and lock-analysis toolkit")
    ap.add_argument("-v", "--verbose", action="store_true",
                    help="info-level logging on stderr")
    sub = ap.add_subparsers(dest="cmd", required=True)

    p = sub.add_parser("scenario", help="run catalog scenarios and compare verdicts")
    p.add_argument("ids", nargs="+", help="scenario ids, or 'all'")
    p.add_argument("--jobs", type=int, default=os.cpu_count() or 1)
    p.add_argument("--out", help="output directory")
    p.add_argument("--dump-traces", action="store_true")
    p.add_argument("--figures", action="store_true",
                   help="render g(t) PNG per scenario into --out")
    p.add_argument("--polarity", type=int, choices=(-1, 1),
                   default=DEFAULT_POLARITY)
    p.set_defaults(func=cmd_scenario)

    p = sub.add_parser("simulate", help="simulate one config")
    _add_config_args(p)
    _add_plan_args(p)
    p.add_argument("--out", help="output directory (trace.csv, verdict.json)")
    p.add_argument("--figures", action="store_true",
                   help="render trace.png into --out")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("analyze", help="equilibria, stability, LPF band check")
    _add_config_args(p)
    p.add_argument("--band-low", type=float, default=None,
                   help="passband probe frequency, rad/s (default: |detuning|)")
    p.add_argument("--band-high", type=float, default=None,
                   help="stopband probe frequency, rad/s (default: 2*omega_ref)")
    p.add_argument("--out", help="output directory (analysis.json)")
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("sweep", help="sweep one numeric config key")
    _add_config_args(p)
    _add_plan_args(p)
    p.add_argument("--key", required=True, help="dotted numeric config key")
    p.add_argument("--lo", type=float, required=True)
    p.add_argument("--hi", type=float, required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.add_argument("--out", help="output directory (sweep.csv / sweep.json)")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("list", help="list catalog scenarios")
    p.add_argument("--polarity", type=int, choices=(-1, 1),
                   default=DEFAULT_POLARITY)
    p.add_argument("--out", default=None, help=argparse.SUPPRESS)
    p.set_defaults(func=cmd_list)

    return ap


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    logging.basicConfig(
        stream=sys.stderr,
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s %(message)s")
    try:
        return args.func(args)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except IntegrationDivergedError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DIVERGED


if __name__ == "__main__":
    sys.exit(main())

"""``newsrace`` command line.

Exit codes: 0 success, 2 finished with event-level failures, 1 fatal.
"""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from .pipeline import (
    ConfigError,
    Pipeline,
    RunConfig,
    default_fixtures,
    project_budget,
    resume,
)
from .store import ManifestError, RunDir, RunManifest

EXIT_OK, EXIT_FATAL, EXIT_PARTIAL = 0, 1, 2

# flag -> config key
OVERRIDES = {
    "run": "run_id", "out": "out_dir", "mode": "mode", "backend": "backend",
    "fixtures": "fixtures", "surfaces": "surfaces",
}


def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", type=Path, help="YAML or JSON run configuration")
    p.add_argument("--run", help="run id (directory name under --out)")
    p.add_argument("--out", help="runs directory (default: runs)")
    p.add_argument("--mode", choices=("mock", "live"))
    p.add_argument("--backend", choices=("fallback", "remote"))
    p.add_argument("--fixtures", help="fixture directory for mock mode")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="newsrace", description="Earliest-channel news race pipeline")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("seed-wcep", help="build Sample A from the Current Events Portal")
    _common(p)
    p.add_argument("--from", dest="wcep_from")
    p.add_argument("--to", dest="wcep_to")
    p.add_argument("--top", dest="wcep_top", type=int)
    p.add_argument("--cap", dest="wcep_cap", type=int)

    p = sub.add_parser("seed-polymarket", help="build Sample B from prediction-market data")
    _common(p)
    p.add_argument("--from", dest="pm_from")
    p.add_argument("--to", dest="pm_to")
    p.add_argument("--floor", dest="pm_floor", type=float)
    p.add_argument("--top", dest="pm_top", type=int)
    p.add_argument("--markets", dest="pm_markets")
    p.add_argument("--trades", dest="pm_trades")

    for name, help_ in (("draft", "features, booleans and the specificity gate"),
                        ("pull", "saved-query lifecycle and mention pulls"),
                        ("verify", "X time/body recovery and on-topic verification"),
                        ("probe", "broadening-ladder probe on the configured events"),
                        ("analyze", "write result tables")):
        p = sub.add_parser(name, help=help_)
        _common(p)

    p = sub.add_parser("full-run", help="every stage end to end")
    _common(p)
    p.add_argument("--surfaces", nargs="+", choices=("wcep", "polymarket"))
    p.add_argument("--plan", nargs="?", type=int, const=0, metavar="EVENTS",
                   help="print the live request budget for EVENTS events (default: the configured tops) and exit")

    p = sub.add_parser("resume", help="continue an existing run from its manifest")
    p.add_argument("--run", required=True)
    p.add_argument("--out", default="runs")
    p.add_argument("--config", type=Path, help="refuse unless this config matches the run's")
    return parser


def _config(args: argparse.Namespace, extra: dict | None = None) -> RunConfig:
    overrides = {key: getattr(args, flag, None) for flag, key in OVERRIDES.items()}
    overrides.update(extra or {})
    if args.config:
        return RunConfig.load(args.config, overrides)
    if getattr(args, "run", None):
        manifest = RunDir(args.out or "runs", args.run).manifest
        if manifest.exists():
            # stage commands on an existing run reuse its configuration
            snap = RunManifest.load(manifest).data["config"]
            snap.update({k: v for k, v in overrides.items() if v is not None})
            return RunConfig.from_dict(snap)
    data = {k: v for k, v in overrides.items() if v is not None}
    if data.get("mode", "mock") == "mock" and "fixtures" not in data:
        # the packaged corpus ships with its own run configuration
        return RunConfig.load(default_fixtures() / "mock.yaml", data)
    return RunConfig.from_dict(data)


def _report(outcome, out=None) -> int:
    out = out or sys.stdout
    m = outcome.manifest.data
    stages = m.get("run_stages", {})
    seed = stages.get("seed", {})
    print(f"run {m['run_id']}: {len(m['events'])} events, {m.get('request_count', 0)} provider requests", file=out)
    for surface in ("wcep", "polymarket"):
        if surface in seed:
            stats = ", ".join(f"{k}={v}" for k, v in seed[surface].items())
            print(f"  {surface}: {stats}", file=out)
    statuses: dict[str, int] = {}
    for rec in m["events"].values():
        statuses[rec["status"]] = statuses.get(rec["status"], 0) + 1
    if statuses:
        print("  status: " + ", ".join(f"{k}={v}" for k, v in sorted(statuses.items())), file=out)
    if outcome.failures:
        print(f"  {len(outcome.failures)} event-level failures:", file=out)
        for note in outcome.failures:
            print(f"    {note}", file=out)
    return EXIT_PARTIAL if outcome.failures else EXIT_OK


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        if args.command == "resume":
            config = RunConfig.load(args.config) if args.config else None
            outcome = resume(args.run, args.out, config)
            return _report(outcome)

        extra = {}
        until = "analyze"
        if args.command == "seed-wcep":
            extra = {k: getattr(args, k) for k in ("wcep_from", "wcep_to", "wcep_top", "wcep_cap")}
            extra["surfaces"] = ["wcep"]
            until = "seed"
        elif args.command == "seed-polymarket":
            extra = {k: getattr(args, k) for k in ("pm_from", "pm_to", "pm_floor", "pm_top",
                                                  "pm_markets", "pm_trades")}
            extra["surfaces"] = ["polymarket"]
            until = "seed"
        elif args.command in ("draft", "pull", "verify", "probe"):
            until = args.command
        config = _config(args, extra)

        if args.command == "full-run" and args.plan is not None:
            tops = {"wcep": config.wcep_top, "polymarket": config.pm_top}
            n = args.plan or sum(tops[s] for s in config.surfaces)
            plan = project_budget(n, config)
            print(f"{plan.events} events x {plan.per_event} requests = {plan.requests} requests; "
                  f"at {config.rate_cap} per {config.rate_window_s:g}s that is >= {plan.hours:.1f} h")
            return EXIT_OK

        pipeline = Pipeline(config)
        outcome = pipeline.execute(until)
        code = _report(outcome)
        if until == "analyze":
            print(f"  tables: {pipeline.run.tables}")
        return code
    except (ConfigError, ManifestError, FileNotFoundError) as exc:
        print(f"newsrace: {exc}", file=sys.stderr)
        return EXIT_FATAL


if __name__ == "__main__":
    sys.exit(main())

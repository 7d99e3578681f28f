"""Experiment runner: reproducible campaigns with JSON/CSV reports.

Subcommands: construct, verify-thm1, verify-thm2, roundtrip, lemma-oracles,
embed-report.  A campaign is defined by a JSON config file; --seed and
--out override the config on the command line.  Exit code 0 means every
exact invariant in the run passed, 2 means at least one failed, 1 is a
usage or config error.
"""

from __future__ import annotations

import argparse
import datetime
import json
import os
import sys
from pathlib import Path

from . import __version__, campaigns

DEFAULT_DIMS = {
    "construct": [2, 3, 4],
    "verify-thm1": [2, 3, 4, 5],
    "verify-thm2": [3, 4, 5],
    "roundtrip": [3, 4, 5],
    "lemma-oracles": [2, 3, 4],
    "embed-report": [2, 3, 4],
}

CSV_COLUMNS = ["instance_id", "n", "lhs", "rhs", "ratio"]


class ConfigError(ValueError):
    pass


def load_config(path: str | None) -> dict:
    if path is None:
        return {}
    try:
        with open(path) as fh:
            cfg = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    if not isinstance(cfg, dict):
        raise ConfigError("config must be a JSON object")
    return cfg


def _fmt(x) -> str:
    if isinstance(x, float):
        return format(x, ".17g")
    return str(x)


def write_csv(path: Path, rows) -> None:
    with open(path, "w") as fh:
        fh.write(",".join(CSV_COLUMNS) + "\n")
        for row in sorted(rows, key=lambda r: r["instance_id"]):
            fh.write(",".join(_fmt(row.get(c, "")) for c in CSV_COLUMNS) + "\n")


def _strip_rows(report: dict) -> dict:
    return {k: v for k, v in report.items() if k != "rows"}


def run_command(command: str, cfg: dict) -> dict:
    seed = int(cfg.get("seed", 0))
    dims = cfg.get("dims", DEFAULT_DIMS[command])
    threads = int(cfg.get("threads", 1))
    exponents = cfg.get("exponents", list(campaigns.DEFAULT_EXPONENTS))
    instances = int(cfg.get("instances", 100))
    family = cfg.get("family", "random-decreasing")
    if family not in campaigns.FAMILIES:
        raise ConfigError(f"unknown family {family!r}")

    if command == "construct":
        return campaigns.construct_campaign(dims, seed, family, exponents, matrix=cfg.get("matrix"))
    if command == "verify-thm1":
        return campaigns.thm1_campaign(
            dims,
            seed,
            instances=int(cfg.get("instances", 5)),
            vectors=int(cfg.get("vectors", 100)),
            family=family,
            threads=threads,
        )
    if command == "verify-thm2":
        return campaigns.thm2_campaign(
            dims, seed, vectors=int(cfg.get("vectors", 200)), exponents=exponents, threads=threads
        )
    if command == "roundtrip":
        return campaigns.roundtrip_campaign(
            dims, seed, family=cfg.get("family", "power-family"), exponents=exponents, threads=threads
        )
    if command == "lemma-oracles":
        l21 = campaigns.lemma21_campaign(
            [n for n in dims if n <= 5], seed, instances=instances, threads=threads
        )
        l22 = campaigns.lemma22_campaign(dims, seed, instances=instances, threads=threads)
        return {
            "lemma21": _strip_rows(l21),
            "lemma22": _strip_rows(l22),
            "rows": l21["rows"] + l22["rows"],
            "passed": l21["passed"] and l22["passed"],
        }
    if command == "embed-report":
        kh = campaigns.khintchine_campaign(
            [n for n in dims if n <= 5], seed, instances=instances, threads=threads
        )
        dist = campaigns.distortion_campaign(
            [n for n in dims if n <= 6],
            seed,
            samples=int(cfg.get("samples", 200)),
            exponents=exponents,
            threads=threads,
        )
        return {
            "khintchine": _strip_rows(kh),
            "distortion": _strip_rows(dist),
            "rows": kh["rows"] + dist["rows"],
            "passed": kh["passed"] and dist["passed"],
        }
    raise ConfigError(f"unknown command {command!r}")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="musielak", description="permutation-average / Musielak-Orlicz experiment runner"
    )
    parser.add_argument("command", choices=sorted(DEFAULT_DIMS))
    parser.add_argument("--config", metavar="PATH", help="campaign config JSON")
    parser.add_argument("--seed", type=int, help="override the config seed")
    parser.add_argument("--out", metavar="DIR", default=".", help="output directory")
    parser.add_argument("--threads", type=int, help="parallel instances (env MUSIELAK_THREADS)")
    parser.add_argument("--format", choices=["json", "csv", "both"], default="both")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 1 if exc.code not in (0, None) else 0
    try:
        cfg = load_config(args.config)
        if args.seed is not None:
            cfg["seed"] = args.seed
        if args.threads is not None:
            cfg["threads"] = args.threads
        elif "threads" not in cfg and os.environ.get("MUSIELAK_THREADS"):
            cfg["threads"] = int(os.environ["MUSIELAK_THREADS"])
        report = run_command(args.command, cfg)
    except (ConfigError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1

    outdir = Path(args.out)
    outdir.mkdir(parents=True, exist_ok=True)
    rows = report.pop("rows", None)
    report["config"] = cfg
    report["command"] = args.command
    report["version"] = __version__
    report["timestamp"] = datetime.datetime.now(datetime.timezone.utc).isoformat()
    if args.format in ("json", "both"):
        with open(outdir / f"{args.command}.json", "w") as fh:
            json.dump(report, fh, indent=2, default=str)
            fh.write("\n")
    if args.format in ("csv", "both") and rows is not None:
        write_csv(outdir / f"{args.command}.csv", rows)
    print(f"{args.command}: {'pass' if report.get('passed', True) else 'FAIL'}")
    return 0 if report.get("passed", True) else 2


if __name__ == "__main__":
    sys.exit(main())

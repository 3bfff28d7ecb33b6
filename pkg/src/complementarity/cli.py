"""Command-line entry point.

Exit codes: 0 success, 1 I/O failure, 2 configuration error, 3 numerical
consistency failure.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys

from .device import PRESETS, load_config
from .errors import ArgumentError, ConfigurationError, ConsistencyError
from .harness import emit_results, run_scenario, scenario_from_mapping, write_text

EXIT_OK, EXIT_IO, EXIT_CONFIG, EXIT_CONSISTENCY = 0, 1, 2, 3

COMMANDS = {
    "ideal-sweep": "ideal_sweep",
    "beta-sweep": "beta_sweep",
    "delay-sweep": "delay_sweep",
    "tomo-demo": "tomo_demo",
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="complementarity", description="Which-path complementarity simulator.")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--config", help="YAML configuration document")
        p.add_argument("--preset", choices=sorted(PRESETS), help="device preset (overrides the config's)")
        p.add_argument("--out", help="output path (default: stdout)")
        p.add_argument("--format", choices=("csv", "kv"), default="csv")
        p.add_argument("--seed", type=int)
        p.add_argument("--shots", help="shots per setting, or 'exact'")
        p.add_argument("--noise", choices=("on", "off"))
        p.add_argument("--theta-points", type=int)
        if name == "ideal-sweep":
            p.add_argument("--c0", type=float, help="input coherence")
        if name in ("delay-sweep", "tomo-demo"):
            p.add_argument("--beta-pi", type=float, help="conditional phase in units of pi")
        if name == "tomo-demo":
            p.add_argument("--record", help="also write the sampled measurement record here")
    parser.add_argument("-v", "--verbose", action="store_true")
    return parser


def _scenario(args):
    doc = {"device": None, "scenario": {}}
    if args.config:
        doc = load_config(args.config)
    device = doc["device"]
    if args.preset or device is None:
        device = PRESETS[args.preset or "characterization"]
    mapping = dict(doc["scenario"])
    for flag, key in (
        ("seed", "seed"),
        ("shots", "shots"),
        ("noise", "noise"),
        ("theta_points", "theta_points"),
        ("c0", "c0"),
        ("beta_pi", "beta_pi"),
    ):
        value = getattr(args, flag, None)
        if value is not None:
            mapping[key] = value
    return scenario_from_mapping(COMMANDS[args.command], mapping, device)


def _tomo_document(result: dict, fmt: str) -> str:
    summary = {k: v for k, v in result.items() if k != "record"}
    if fmt == "kv":
        return json.dumps(summary, sort_keys=True, indent=2) + "\n"
    lines = ["quantity,value"] + [f"{k},{summary[k]:.12f}" for k in sorted(summary)]
    return "\n".join(lines) + "\n"


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        scenario = _scenario(args)
        result = run_scenario(scenario)
        if scenario.kind == "tomo_demo":
            text = _tomo_document(result, args.format)
            if args.record:
                if result["record"] is None:
                    raise ConfigurationError("--record needs a finite shot count")
                write_text(result["record"].to_text(), args.record)
        else:
            text = emit_results(result, args.format, scenario)
        write_text(text, args.out)
    except (ConfigurationError, ArgumentError) as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except ConsistencyError as exc:
        print(f"consistency failure: {exc}", file=sys.stderr)
        return EXIT_CONSISTENCY
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return EXIT_IO
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())

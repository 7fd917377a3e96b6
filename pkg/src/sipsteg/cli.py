"""Command-line entry point.

Exit status:
    0  success (scan: no findings)
    1  scan reported findings
    2  carrier is not a usable SIP message
    3  payload exceeds the available capacity
    4  a requested channel's carrier field is absent
    5  extraction failed (field not channel-shaped, truncated stream)
   64  usage error (unknown channel id, bad config key or value)
"""

from __future__ import annotations

import argparse
import dataclasses
import random
import sys
from pathlib import Path

from .analyzer import ScanConfig, scan_flow
from .bits import BitString
from .callflow import flow_embed, flow_extract, get_scenario
from .capacity import compute_total, measured_scenario, paper_scenario
from .channels import ChannelConfig, get_channel, in_apply_order, parse_channel_ids
from .errors import (
    ChannelAbsent,
    ConfigViolation,
    ExtractionError,
    MalformedMessage,
    PayloadExceedsCapacity,
    PayloadTooLong,
)
from .message import FLOW_SEPARATOR, parse_message, read_flow, serialize_message, write_flow

EXIT_OK = 0
EXIT_FINDINGS = 1
EXIT_MALFORMED = 2
EXIT_CAPACITY = 3
EXIT_ABSENT = 4
EXIT_EXTRACT = 5
EXIT_USAGE = 64


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _coerce(field: dataclasses.Field, raw: str):
    raw = raw.strip()
    if field.name == "case_headers":
        return None if raw in ("", "all") else tuple(s.strip() for s in raw.split(",") if s.strip())
    if field.type in ("int", int):
        try:
            return int(raw)
        except ValueError:
            raise UsageError(f"{field.name} expects an integer, got {raw!r}") from None
    if field.name in ("reorderable", "freetext_headers", "freetext_add"):
        return tuple(s.strip() for s in raw.split(",") if s.strip())
    return raw


def load_config(path: str | None, overrides: list[str]) -> ChannelConfig:
    """Read ``key=value`` lines, then apply ``--set key=value`` overrides."""
    fields = {f.name: f for f in dataclasses.fields(ChannelConfig)}
    pairs = []
    if path:
        for lineno, line in enumerate(Path(path).read_text().splitlines(), 1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise UsageError(f"{path}:{lineno}: expected key=value")
            pairs.append(line.split("=", 1))
    for item in overrides:
        if "=" not in item:
            raise UsageError(f"--set expects key=value, got {item!r}")
        pairs.append(item.split("=", 1))
    values = {}
    for key, raw in pairs:
        key = key.strip()
        if key not in fields:
            raise UsageError(f"unknown config key {key!r}")
        values[key] = _coerce(fields[key], raw)
    return ChannelConfig(**values)


def _channels(spec: str) -> frozenset[str]:
    try:
        return parse_channel_ids(spec)
    except ValueError as e:
        raise UsageError(str(e)) from None


def cmd_embed(args, cfg) -> int:
    msg = parse_message(Path(args.carrier).read_bytes())
    payload = BitString.from_bytes(Path(args.payload).read_bytes())
    pos = 0
    report = []
    for cid in in_apply_order(_channels(args.channels)):
        channel = get_channel(cid)
        msg, used = channel.embed(msg, payload[pos:], cfg)
        report.append(f"{cid} consumed={used} capacity={channel.capacity(msg, cfg)}")
        pos += used
    if pos < len(payload):
        raise PayloadExceedsCapacity(len(payload), pos)
    Path(args.output).write_bytes(serialize_message(msg))
    print("\n".join(report))
    print(f"total consumed={pos}")
    return EXIT_OK


def cmd_extract(args, cfg) -> int:
    msg = parse_message(Path(args.carrier).read_bytes())
    parts = []
    for cid in in_apply_order(_channels(args.channels)):
        bits = get_channel(cid).extract(msg, cfg)
        print(f"{cid} bits={len(bits)}")
        parts.append(bits)
    out = BitString("".join(str(p) for p in parts))
    Path(args.output).write_bytes(out.to_bytes())
    print(f"total bits={len(out)}")
    return EXIT_OK


def cmd_capacity(args, cfg) -> int:
    if args.paper:
        report = compute_total(paper_scenario())
    else:
        scenario = _scenario(args.scenario)
        report = measured_scenario(scenario.messages(), cfg, _channels(args.channels))
    sys.stdout.write(report.to_machine() if args.format == "machine" else report.to_text())
    return EXIT_OK


def _scenario(name):
    try:
        return get_scenario(name)
    except ValueError as e:
        raise UsageError(str(e)) from None


def cmd_flow(args, cfg) -> int:
    enabled = _channels(args.channels)
    if args.action == "embed":
        if args.fill_random and args.seed is None:
            raise UsageError("--fill-random requires --seed")
        rng = random.Random(args.seed) if args.fill_random else None
        payload = BitString.from_bytes(Path(args.input).read_bytes())
        flow = flow_embed(_scenario(args.scenario), payload, cfg, enabled, rng)
        Path(args.output).write_bytes(write_flow(flow))
        print(f"embedded {len(payload)} bits into {len(flow)} messages")
    else:
        flow = read_flow(Path(args.input).read_bytes())
        payload = flow_extract(flow, cfg, enabled)
        Path(args.output).write_bytes(payload.to_bytes())
        print(f"extracted {len(payload)} bits from {len(flow)} messages")
    return EXIT_OK


def cmd_scan(args, cfg) -> int:
    data = Path(args.file).read_bytes()
    flow = read_flow(data) if FLOW_SEPARATOR in data else [parse_message(data)]
    scfg = ScanConfig(chi2_threshold=args.chi2_threshold, reference_order=cfg.reorderable)
    report = scan_flow(flow, scfg)
    sys.stdout.write(report.to_machine() if args.format == "machine" else report.to_text())
    return EXIT_OK if report.clean else EXIT_FINDINGS


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--config", help="key=value file with channel settings")
    common.add_argument("--set", action="append", default=[], metavar="KEY=VALUE",
                        help="override one channel setting (repeatable)")
    common.add_argument("--format", choices=("text", "machine"), default="text")

    parser = _Parser(prog="sipsteg", description="SIP/SDP covert channel toolkit")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("embed", parents=[common], help="hide payload bytes in one message")
    p.add_argument("carrier")
    p.add_argument("payload")
    p.add_argument("-o", "--output", required=True)
    p.add_argument("--channels", required=True)
    p.set_defaults(func=cmd_embed)

    p = sub.add_parser("extract", parents=[common], help="recover covert bits from one message")
    p.add_argument("carrier")
    p.add_argument("-o", "--output", required=True)
    p.add_argument("--channels", required=True)
    p.set_defaults(func=cmd_extract)

    p = sub.add_parser("capacity", parents=[common], help="covert capacity of a call")
    mode = p.add_mutually_exclusive_group(required=True)
    mode.add_argument("--paper", action="store_true", help="published per-method budgets")
    mode.add_argument("--scenario", help="scenario name (default, smime) or file")
    p.add_argument("--channels", default="all")
    p.set_defaults(func=cmd_capacity)

    p = sub.add_parser("flow", parents=[common], help="embed into or extract from a whole call")
    p.add_argument("action", choices=("embed", "extract"))
    p.add_argument("input", help="payload file (embed) or flow file (extract)")
    p.add_argument("-o", "--output", required=True)
    p.add_argument("--scenario", default="default")
    p.add_argument("--channels", default="all")
    p.add_argument("--fill-random", action="store_true", help="pad unused capacity with seeded random bits")
    p.add_argument("--seed", type=int)
    p.set_defaults(func=cmd_flow)

    p = sub.add_parser("scan", parents=[common], help="look for covert-channel fingerprints")
    p.add_argument("file", help="single message or flow file")
    p.add_argument("--chi2-threshold", type=float, default=ScanConfig.chi2_threshold)
    p.set_defaults(func=cmd_scan)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = load_config(args.config, args.set)
        return args.func(args, cfg)
    except (UsageError, ConfigViolation) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except MalformedMessage as e:
        print(f"malformed message: {e}", file=sys.stderr)
        return EXIT_MALFORMED
    except (PayloadExceedsCapacity, PayloadTooLong) as e:
        print(f"capacity: {e}", file=sys.stderr)
        return EXIT_CAPACITY
    except ChannelAbsent as e:
        print(f"channel absent: {e}", file=sys.stderr)
        return EXIT_ABSENT
    except ExtractionError as e:
        print(f"extraction failed: {e}", file=sys.stderr)
        return EXIT_EXTRACT


if __name__ == "__main__":
    sys.exit(main())

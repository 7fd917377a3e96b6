"""Acceptance suite: one check per criterion, each printing a PASS/FAIL line.

Run with ``pytest tests/test_acceptance.py`` (lines appear in the summary) or
directly with ``python3 tests/test_acceptance.py``.
"""

from __future__ import annotations

import contextlib
import io
import itertools
import random
import re
import sys
import time
from pathlib import Path

sys.path.insert(0, str(Path(__file__).parent))

from acceptance_log import record  # noqa: E402
from wellformed import corpus_variants, random_message  # noqa: E402

from sipsteg.analyzer import scan_case, scan_order, scan_tokens, scan_whitespace  # noqa: E402
from sipsteg.bits import BitString, lehmer_decode, lehmer_encode  # noqa: E402
from sipsteg.callflow import default_scenario, flow_capacity, flow_embed, flow_extract, smime_scenario  # noqa: E402
from sipsteg.capacity import compute_total, paper_scenario  # noqa: E402
from sipsteg.channels import CHANNEL_IDS, channel_capacity, embed, extract, in_apply_order  # noqa: E402
from sipsteg.cli import main as cli_main  # noqa: E402
from sipsteg.corpus import CORPUS  # noqa: E402
from sipsteg.message import parse_message, read_flow, serialize_message, write_flow  # noqa: E402

ARTIFACTS = Path(__file__).parent / "artifacts"
SCANNERS = {
    "whitespace": scan_whitespace,
    "case": scan_case,
    "order": scan_order,
    "tokens": scan_tokens,
}


def _bits(rng: random.Random, n: int) -> BitString:
    return BitString.from_int(rng.getrandbits(n), n) if n else BitString()


def _fixtures():
    msgs = [parse_message(d) for d in CORPUS.values()]
    return msgs + default_scenario().messages() + smime_scenario().messages()


def check_published_capacity():
    t0 = time.perf_counter()
    report = compute_total(paper_scenario())
    lines = report.to_machine().splitlines()
    out = io.StringIO()
    with contextlib.redirect_stdout(out):
        cli_code = cli_main(["capacity", "--paper", "--format", "machine"])
    cli_lines = out.getvalue().splitlines()
    elapsed = time.perf_counter() - t0
    expected = ["transport_stego=80", "sip_tokens=480", "sip_security=800",
                "sdp_stego=960", "other_sip=40", "total=2360"]
    ok = lines == expected and cli_lines == expected and cli_code == 0 and elapsed < 1.0
    record(1, ok, "published capacity table 80/480/800/960/40, total 2360",
           f"total={report.total}, {elapsed:.3f}s < 1s")
    return ok


def check_constraints():
    rng = random.Random(2)
    fixtures = _fixtures()
    t0 = time.perf_counter()
    embeds = 0
    violations = []
    cookie = "z9hG4bK"
    while embeds < 10_000:
        msg = rng.choice(fixtures)
        chosen = in_apply_order(rng.sample(CHANNEL_IDS, rng.randint(1, 3)))
        for cid in chosen:
            cap = channel_capacity(cid, msg)
            if cap == 0:
                continue
            msg, _ = embed(cid, msg, _bits(rng, rng.randint(0, cap + 8)))
            embeds += 1
        msg = parse_message(serialize_message(msg))
        via, cseq, frm, mf = (msg.header(n) for n in ("via", "cseq", "from", "max-forwards"))
        if via is not None and via.has_param("branch") and not via.param("branch").startswith(cookie):
            violations.append(("branch", via.value))
        if cseq is not None and not int(cseq.value.split()[0]) < 2**31:
            violations.append(("cseq", cseq.value))
        if "tag" in chosen and frm is not None:
            tag = frm.param("tag") or ""
            if not re.fullmatch(r"[0-9a-f]{8,}", tag):
                violations.append(("tag", tag))
        if mf is not None and not 55 <= int(mf.value) <= 70:
            violations.append(("max_forwards", mf.value))
    elapsed = time.perf_counter() - t0
    ok = not violations and elapsed < 30
    record(2, ok, "constraint suite over randomized embeds",
           f"{embeds} embeds, {len(violations)} violations, {elapsed:.1f}s < 30s")
    return ok


def check_round_trips():
    rng = random.Random(3)
    fixtures = _fixtures()
    t0 = time.perf_counter()
    failures = []
    runs = 0
    for cid in CHANNEL_IDS:
        carriers = [m for m in fixtures if channel_capacity(cid, m)]
        for k in range(1000):
            msg = carriers[k % len(carriers)]
            cap = channel_capacity(cid, msg)
            p = _bits(rng, rng.randint(0, cap + 16))
            out, used = embed(cid, msg, p)
            got = extract(cid, parse_message(serialize_message(out)))
            runs += 1
            if used != min(len(p), cap) or len(got) != cap or got[:used] != p[:used]:
                failures.append((cid, k))
    flows = 0
    for scenario in (default_scenario(), smime_scenario()):
        cap = flow_capacity(scenario)
        for n in (0, 1, 8, 64, 200, cap - 16):
            p = _bits(rng, n)
            if flow_extract(read_flow(write_flow(flow_embed(scenario, p)))) != p:
                failures.append((scenario.name, n))
            flows += 1
    elapsed = time.perf_counter() - t0
    ok = not failures and elapsed < 60
    record(3, ok, "per-channel prefix and full-flow round trips",
           f"{runs} channel + {flows} flow round trips, {len(failures)} failures, {elapsed:.1f}s < 60s")
    return ok


def check_parser_fidelity():
    rng = random.Random(4)
    corpus = list(CORPUS.values())
    for scenario in (default_scenario(), smime_scenario()):
        corpus += [serialize_message(m) for m in scenario.messages()]
        corpus += [serialize_message(m) for m in flow_embed(scenario, _bits(rng, 300))]
    fuzzed = list(corpus_variants(rng, 500)) + [random_message(rng) for _ in range(500)]
    mismatches = sum(serialize_message(parse_message(b)) != b for b in corpus + fuzzed)
    ok = mismatches == 0
    record(4, ok, "byte-exact parse/serialize",
           f"{len(corpus)} corpus + {len(fuzzed)} fuzzed messages, {mismatches} mismatches")
    return ok


def check_lehmer():
    checked = mismatches = 0
    for n in range(1, 8):
        for index, perm in enumerate(itertools.permutations(range(n))):
            checked += 1
            if lehmer_encode(index, n) != perm or lehmer_decode(perm) != index:
                mismatches += 1
    ok = checked == 5913 and mismatches == 0
    record(5, ok, "Lehmer code vs brute-force enumeration, n <= 7",
           f"{checked} permutations, {mismatches} mismatches")
    return ok


def cross_matrix(rng: random.Random, rounds: int = 20):
    """Fraction of messages each scanner flags when only one channel is used."""
    rows = {}
    for cid in CHANNEL_IDS:
        scenario = smime_scenario() if cid.startswith("smime") else default_scenario()
        cap = flow_capacity(scenario, enabled={cid})
        hits = dict.fromkeys(SCANNERS, 0)
        total = 0
        for _ in range(rounds):
            flow = flow_embed(scenario, _bits(rng, cap - 16), enabled={cid}, rng=rng)
            for msg in flow:
                total += 1
                for name, scanner in SCANNERS.items():
                    hits[name] += bool(scanner(msg))
        rows[cid] = {name: hits[name] / total for name in SCANNERS}
    return rows


def check_warden():
    rng = random.Random(6)
    canonical = default_scenario().messages() + smime_scenario().messages()
    dirty = [m for m in canonical if any(s(m) for s in SCANNERS.values())]
    missed = 0
    produced = 0
    for cid in ("whitespace", "case_modulation"):
        scanner = scan_whitespace if cid == "whitespace" else scan_case
        for scenario in (default_scenario(), smime_scenario()):
            cap = flow_capacity(scenario, enabled={cid})
            for n in (0, 1, cap // 2, cap - 16):
                for msg in flow_embed(scenario, _bits(rng, n), enabled={cid}):
                    produced += 1
                    missed += not scanner(msg)
    matrix = cross_matrix(rng)
    ARTIFACTS.mkdir(exist_ok=True)
    header = "channel".ljust(16) + "".join(name.rjust(12) for name in SCANNERS)
    rows = [header] + [
        cid.ljust(16) + "".join(f"{matrix[cid][name]:12.2f}" for name in SCANNERS) for cid in CHANNEL_IDS
    ]
    path = ARTIFACTS / "cross_matrix.txt"
    path.write_text("# fraction of flow messages flagged, one channel enabled at a time\n" + "\n".join(rows) + "\n")
    ok = missed == 0 and not dirty and len(matrix) == 12
    record(6, ok, "warden flags whitespace/case output, canonical templates clean",
           f"{produced - missed}/{produced} flagged, {len(dirty)} dirty templates, matrix -> {path.name}")
    return ok


def test_criterion_1_published_capacity():
    assert check_published_capacity()


def test_criterion_2_constraints():
    assert check_constraints()


def test_criterion_3_round_trips():
    assert check_round_trips()


def test_criterion_4_parser_fidelity():
    assert check_parser_fidelity()


def test_criterion_5_lehmer():
    assert check_lehmer()


def test_criterion_6_warden():
    assert check_warden()


if __name__ == "__main__":
    results = [
        check_published_capacity(), check_constraints(), check_round_trips(),
        check_parser_fidelity(), check_lehmer(), check_warden(),
    ]
    sys.exit(0 if all(results) else 1)

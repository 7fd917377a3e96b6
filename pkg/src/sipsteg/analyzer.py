"""Passive warden: looks for the fingerprints each covert channel leaves.

Whitespace, case and order channels leave structural marks that are easy to
spot. Token channels are only caught by crude statistics (character histogram
and length windows); well-randomised payloads are expected to slip through,
which is why those findings are ``low`` severity.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from typing import Sequence

from .bits import HEX, TOKEN64
from .channels import MAGIC_COOKIE, MAX_FORWARDS_DEFAULT, observed_permutation_index
from .message import DEFAULT_REORDERABLE, MultipartBody, SipMessage, standard_name

LOW, MEDIUM, HIGH = "low", "medium", "high"
EVIDENCE_MAX = 80


@dataclass(frozen=True)
class ScanConfig:
    # Normalised chi-square: 0 for a flat histogram, 1 when one symbol repeats.
    chi2_threshold: float = 0.5
    tag_len_range: tuple[int, int] = (6, 32)
    branch_len_range: tuple[int, int] = (4, 32)
    callid_len_range: tuple[int, int] = (8, 40)
    boundary_len: int = 16
    reference_order: tuple[str, ...] = DEFAULT_REORDERABLE


@dataclass(frozen=True)
class Finding:
    channel_suspected: str
    message_index: int
    line_index: int
    severity: str
    evidence: str

    def __post_init__(self):
        if len(self.evidence) > EVIDENCE_MAX:
            object.__setattr__(self, "evidence", self.evidence[: EVIDENCE_MAX - 3] + "...")

    @property
    def location(self) -> tuple[int, int]:
        return (self.message_index, self.line_index)

    def to_machine(self) -> str:
        return (
            f"finding {self.channel_suspected} msg={self.message_index} "
            f"line={self.line_index} sev={self.severity} {self.evidence}"
        )


@dataclass(frozen=True)
class ScanReport:
    findings: tuple[Finding, ...] = field(default_factory=tuple)

    @property
    def clean(self) -> bool:
        return not self.findings

    @property
    def per_channel_counts(self) -> dict[str, int]:
        return dict(Counter(f.channel_suspected for f in self.findings))

    def to_machine(self) -> str:
        return "".join(f.to_machine() + "\n" for f in self.findings)

    def to_text(self) -> str:
        if self.clean:
            return "clean: no covert-channel fingerprints found\n"
        rows = [
            f"[{f.severity:>6}] msg {f.message_index} line {f.line_index:>2}  "
            f"{f.channel_suspected:<15} {f.evidence}"
            for f in self.findings
        ]
        counts = ", ".join(f"{k}={v}" for k, v in sorted(self.per_channel_counts.items()))
        rows.append(f"{len(self.findings)} finding(s): {counts}")
        return "\n".join(rows) + "\n"


def _visible(ws: str) -> str:
    return ws.replace(" ", "[SP]").replace("\t", "[HT]")


def scan_whitespace(msg: SipMessage) -> list[Finding]:
    lines = [(msg.start_line.text, msg.start_line.trailing_ws)]
    lines += [(h.raw_name + h.separator + h.value, h.trailing_ws) for h in msg.headers]
    out = []
    for j, (text, ws) in enumerate(lines):
        if not ws:
            continue
        evidence = (text + _visible(ws))[-EVIDENCE_MAX:]
        out.append(Finding("whitespace", 0, j, HIGH if "\t" in ws else MEDIUM, evidence))
    return out


def scan_case(msg: SipMessage) -> list[Finding]:
    out = []
    for j, h in enumerate(msg.headers, 1):
        name = h.raw_name
        if (name.isupper() or name.islower()) and name != standard_name(name):
            out.append(Finding("case_modulation", 0, j, HIGH, f"header name {name!r}, expected {standard_name(name)!r}"))
    return out


def scan_order(msg: SipMessage, reference_order: Sequence[str] = DEFAULT_REORDERABLE) -> list[Finding]:
    """One finding when the reorderable headers are not in reference order."""
    keys = {n.casefold() for n in reference_order}
    seen, slots = set(), []
    for i, h in enumerate(msg.headers):
        if h.canonical_name in keys and h.canonical_name not in seen:
            seen.add(h.canonical_name)
            slots.append(i)
    if len(slots) < 2:
        return []
    index = observed_permutation_index(msg, slots)
    if index == 0:
        return []
    names = ",".join(msg.headers[i].raw_name for i in slots)
    return [Finding("header_reorder", 0, slots[0] + 1, LOW, f"permutation index={index} order={names}")]


def normalized_chi2(text: str, alphabet_size: int) -> float:
    """Chi-square of the character histogram against a uniform alphabet,
    scaled to [0, 1] by its maximum ``len * (k - 1)``."""
    n = len(text)
    if n == 0 or alphabet_size < 2:
        return 0.0
    expected = n / alphabet_size
    counts = Counter(text)
    chi2 = sum((c - expected) ** 2 / expected for c in counts.values())
    chi2 += (alphabet_size - len(counts)) * expected
    return chi2 / (n * (alphabet_size - 1))


def _alphabet_size(token: str) -> int:
    if all(c in HEX.symbols for c in token.lower()):
        return len(HEX.symbols)
    return len(TOKEN64.symbols)


def _token_findings(label: str, channel: str, token: str, line: int, window: tuple[int, int], cfg: ScanConfig):
    out = []
    lo, hi = window
    if not lo <= len(token) <= hi:
        out.append(Finding(channel, 0, line, LOW, f"{label} length {len(token)} outside [{lo}, {hi}]: {token}"))
    score = normalized_chi2(token, _alphabet_size(token))
    if score > cfg.chi2_threshold:
        out.append(Finding(channel, 0, line, LOW, f"{label} histogram chi2={score:.2f}: {token}"))
    return out


def scan_tokens(msg: SipMessage, cfg: ScanConfig | None = None) -> list[Finding]:
    cfg = cfg or ScanConfig()
    out = []
    i = msg.header_index("via")
    if i >= 0:
        branch = msg.headers[i].param("branch")
        if branch and branch.startswith(MAGIC_COOKIE):
            out += _token_findings("branch", "branch", branch[len(MAGIC_COOKIE):], i + 1, cfg.branch_len_range, cfg)
    i = msg.header_index("from")
    if i >= 0 and msg.headers[i].param("tag"):
        out += _token_findings("tag", "tag", msg.headers[i].param("tag"), i + 1, cfg.tag_len_range, cfg)
    i = msg.header_index("call-id")
    if i >= 0:
        local = msg.headers[i].value.partition("@")[0]
        out += _token_findings("Call-ID", "call_id", local, i + 1, cfg.callid_len_range, cfg)
    i = msg.header_index("max-forwards")
    if i >= 0 and msg.headers[i].value.strip() != str(MAX_FORWARDS_DEFAULT):
        out.append(Finding("max_forwards", 0, i + 1, LOW, f"Max-Forwards {msg.headers[i].value.strip()} != 70"))
    if isinstance(msg.body, MultipartBody):
        b = msg.body.boundary
        if len(b) != cfg.boundary_len or any(c not in HEX.symbols for c in b.lower()):
            i = msg.header_index("content-type")
            out.append(Finding("smime_boundary", 0, i + 1, LOW, f"boundary {b!r} is not {cfg.boundary_len} hex chars"))
    return out


def scan_message(msg: SipMessage, cfg: ScanConfig | None = None, message_index: int = 0) -> ScanReport:
    cfg = cfg or ScanConfig()
    found = scan_whitespace(msg) + scan_case(msg) + scan_order(msg, cfg.reference_order) + scan_tokens(msg, cfg)
    found.sort(key=lambda f: f.line_index)
    return ScanReport(tuple(
        Finding(f.channel_suspected, message_index, f.line_index, f.severity, f.evidence) for f in found
    ))


def scan_flow(flow: Sequence[SipMessage], cfg: ScanConfig | None = None) -> ScanReport:
    findings = []
    for k, msg in enumerate(flow):
        findings.extend(scan_message(msg, cfg, k).findings)
    return ScanReport(tuple(findings))

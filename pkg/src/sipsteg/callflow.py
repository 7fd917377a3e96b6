"""Caller-to-callee message sequence of one call and payload fragmentation
across it.

Sender and receiver agree on where every bit goes without side information:
the schedule is a pure function of the message count and the enabled channel
set, and each slot's size is the channel capacity, which embedding never
changes.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

from .bits import BitString, concat, deframe_payload, frame_payload
from .channels import APPLY_ORDER, CHANNEL_IDS, ChannelConfig, get_channel
from .corpus import BOUNDARY, SIGNATURE_TEXT
from .errors import PayloadExceedsCapacity
from .message import CRLF, SipMessage, canonicalize, parse_message

# Dialog identifiers are fixed after the first request, so channels that
# write them only run on message 0; later messages copy the values.
DIALOG_SCOPED = frozenset({"tag", "call_id", "cseq"})

CALLER = "Alice <sip:alice@atlanta.example.com>"
CALLER_TAG = "9fxced76s1"
CALLEE = "Bob <sip:bob@biloxi.example.com>"
CALLEE_TAG = "8321234356"
CALL_ID = "3848276298220188511@atlanta.example.com"
CSEQ_BASE = 12345
CONTACT = "AliceM <sip:alice@client.atlanta.example.com;transport=tcp>"
USER_AGENT = "Softphone/2.1"
VIA = "SIP/2.0/TCP client.atlanta.example.com:5060"
BRANCHES = ("74bf9", "nashds9", "kc5ta2Ht", "q7Hdn1wm", "Rm8c6pu", "x4tJd0k", "b3Ny7fq")


def _sdp(version: int) -> str:
    return CRLF.join([
        "v=0",
        f"o=alice 2890844526 {2890844526 + version} IN IP4 client.atlanta.example.com",
        "s=-",
        "c=IN IP4 192.0.2.101",
        "t=0 0",
        "k=clear:9123123kjhdasdoq12e31021n2e4",
        "m=audio 49172 RTP/AVP 0",
        "a=rtpmap:0 PCMU/8000",
        "",
    ])


def _smime() -> str:
    return CRLF.join([
        f"--{BOUNDARY}",
        "Content-Type: application/pkcs7-mime; smime-type=envelopeddata; name=smime.p7m",
        "Content-Disposition: attachment;handling=required;filename=smime.p7m",
        "Content-Transfer-Encoding: binary",
        "",
        "<envelopedData object encapsulating encrypted SDP attachment not shown>",
        f"--{BOUNDARY}",
        "Content-Type: application/pkcs7-signature; name=smime.p7s",
        "Content-Transfer-Encoding: base64",
        "Content-Disposition: attachment; filename=smime.p7s; handling=required",
        "",
        SIGNATURE_TEXT,
        f"--{BOUNDARY}--",
        "",
    ])


@dataclass(frozen=True)
class MessageTemplate:
    method: str
    has_sdp: bool = False
    has_smime: bool = False

    def __post_init__(self):
        if self.has_sdp and self.has_smime:
            raise ValueError("a template carries either a clear SDP body or an S/MIME body, not both")

    def render(self, position: int, cseq: int) -> SipMessage:
        """Canonical carrier for the ``position``-th message of the call."""
        initial = position == 0
        uri = "sip:bob@biloxi.example.com" if initial else "sip:bob@client.biloxi.example.com"
        to = CALLEE if initial else f"{CALLEE};tag={CALLEE_TAG}"
        headers = [
            f"Via: {VIA};branch=z9hG4bK{BRANCHES[position % len(BRANCHES)]}",
            "Max-Forwards: 70",
            f"From: {CALLER};tag={CALLER_TAG}",
            f"To: {to}",
            f"Call-ID: {CALL_ID}",
            f"CSeq: {cseq} {self.method}",
        ]
        if self.method not in ("ACK", "BYE", "CANCEL"):
            headers.append(f"Contact: {CONTACT}")
        if self.method == "OPTIONS":
            headers.append("Accept: application/sdp")
        headers.append(f"User-Agent: {USER_AGENT}")
        body = ""
        if self.has_sdp:
            body = _sdp(position)
            headers.append("Content-Type: application/sdp")
        elif self.has_smime:
            body = _smime()
            headers.append(
                f"Content-Type: multipart/signed;boundary={BOUNDARY};"
                "micalg=sha1;protocol=application/pkcs7-signature"
            )
        headers.append(f"Content-Length: {len(body.encode())}")
        text = CRLF.join([f"{self.method} {uri} SIP/2.0", *headers, "", body])
        return canonicalize(parse_message(text.encode()))


@dataclass(frozen=True)
class CallScenario:
    name: str
    templates: tuple[MessageTemplate, ...]
    direction: str = "caller->callee"

    def __post_init__(self):
        object.__setattr__(self, "templates", tuple(self.templates))

    def __len__(self) -> int:
        return len(self.templates)

    @property
    def sdp_count(self) -> int:
        return sum(t.has_sdp for t in self.templates)

    @property
    def smime_count(self) -> int:
        return sum(t.has_smime for t in self.templates)

    def cseq_numbers(self, base: int = CSEQ_BASE) -> list[int]:
        """ACK reuses the INVITE number; every other request takes the next one."""
        out, current, last_invite = [], base - 1, base
        for t in self.templates:
            if t.method == "ACK":
                out.append(last_invite)
                continue
            current += 1
            if t.method == "INVITE":
                last_invite = current
            out.append(current)
        return out

    def messages(self) -> list[SipMessage]:
        return [t.render(i, n) for i, (t, n) in enumerate(zip(self.templates, self.cseq_numbers()))]


def default_scenario() -> CallScenario:
    """Two setup requests, two in-call OPTIONS and the BYE; two SDP bodies."""
    return CallScenario("default", (
        MessageTemplate("INVITE", has_sdp=True),
        MessageTemplate("ACK"),
        MessageTemplate("OPTIONS", has_sdp=True),
        MessageTemplate("OPTIONS"),
        MessageTemplate("BYE"),
    ))


def smime_scenario() -> CallScenario:
    """Same call with the session descriptions protected by S/MIME."""
    return CallScenario("smime", (
        MessageTemplate("INVITE", has_smime=True),
        MessageTemplate("ACK"),
        MessageTemplate("OPTIONS", has_smime=True),
        MessageTemplate("OPTIONS"),
        MessageTemplate("BYE"),
    ))


SCENARIOS = {"default": default_scenario, "smime": smime_scenario}


def parse_scenario(text: str, name: str = "custom") -> CallScenario:
    """One message per line: ``METHOD [sdp] [smime]``; ``#`` starts a comment."""
    templates = []
    for lineno, line in enumerate(text.splitlines(), 1):
        words = line.split("#", 1)[0].split()
        if not words:
            continue
        flags = {w.lower() for w in words[1:]}
        unknown = flags - {"sdp", "smime"}
        if unknown:
            raise ValueError(f"line {lineno}: unknown flag(s) {sorted(unknown)}")
        templates.append(MessageTemplate(words[0].upper(), "sdp" in flags, "smime" in flags))
    if not templates:
        raise ValueError("scenario lists no messages")
    return CallScenario(name, tuple(templates))


def get_scenario(name_or_path: str) -> CallScenario:
    if name_or_path in SCENARIOS:
        return SCENARIOS[name_or_path]()
    path = Path(name_or_path)
    if not path.is_file():
        raise ValueError(f"unknown scenario {name_or_path!r}; use {', '.join(SCENARIOS)} or a file path")
    return parse_scenario(path.read_text(), path.stem)


EmbedSchedule = tuple[tuple[int, str], ...]


def build_schedule(scenario: CallScenario | int, enabled: Iterable[str]) -> EmbedSchedule:
    """Ordered (message_index, channel_id) slots.

    Slots whose channel turns out to have zero capacity on the actual message
    are skipped by both sides, so structural flags need not be consulted.
    """
    n = scenario if isinstance(scenario, int) else len(scenario)
    enabled = set(enabled)
    unknown = enabled - set(CHANNEL_IDS)
    if unknown:
        raise ValueError(f"unknown channel(s): {sorted(unknown)}")
    slots = []
    for i in range(n):
        for cid in APPLY_ORDER:
            if cid in enabled and (i == 0 or cid not in DIALOG_SCOPED):
                slots.append((i, cid))
    return tuple(slots)


def _follow_dialog(msg: SipMessage, first: SipMessage, cseq_offset: int) -> SipMessage:
    """Copy Call-ID, From tag and CSeq numbering from the first message."""
    i = msg.header_index("call-id")
    if i >= 0 and first.header("call-id") is not None:
        msg = msg.with_header(i, msg.headers[i].with_value(first.header("call-id").value))
    i = msg.header_index("from")
    tag = first.header("from").param("tag") if first.header("from") is not None else None
    if i >= 0 and tag:
        msg = msg.with_header(i, msg.headers[i].with_param("tag", tag))
    i = msg.header_index("cseq")
    if i >= 0 and first.header("cseq") is not None:
        base = int(first.header("cseq").value.split()[0])
        method = msg.headers[i].value.split(None, 1)[1]
        msg = msg.with_header(i, msg.headers[i].with_value(f"{(base + cseq_offset) % 2 ** 31} {method}"))
    return msg


def _run(
    scenario: CallScenario,
    stream: BitString,
    cfg: ChannelConfig,
    enabled: Iterable[str],
    rng: random.Random | None = None,
) -> tuple[list[SipMessage], int]:
    templates = scenario.messages()
    numbers = scenario.cseq_numbers()
    slots = build_schedule(scenario, enabled)
    out: list[SipMessage] = []
    pos = capacity = 0
    for i, msg in enumerate(templates):
        if i > 0:
            msg = _follow_dialog(msg, out[0], numbers[i] - numbers[0])
        for _, cid in (s for s in slots if s[0] == i):
            channel = get_channel(cid)
            cap = channel.capacity(msg, cfg)
            if cap == 0:
                continue
            take = min(cap, max(0, len(stream) - pos))
            chunk = stream[pos:pos + take]
            if rng is not None and take < cap:
                chunk = chunk + BitString.from_int(rng.getrandbits(cap - take), cap - take)
            msg, _ = channel.embed(msg, chunk, cfg)
            pos += take
            capacity += cap
        out.append(msg)
    return out, capacity


def flow_capacity(
    scenario: CallScenario,
    cfg: ChannelConfig | None = None,
    enabled: Iterable[str] = CHANNEL_IDS,
) -> int:
    """Total bits the flow carries, framing prefix included."""
    return _run(scenario, BitString(), cfg or ChannelConfig(), enabled)[1]


def flow_embed(
    scenario: CallScenario,
    payload: BitString,
    cfg: ChannelConfig | None = None,
    enabled: Iterable[str] = CHANNEL_IDS,
    rng: random.Random | None = None,
) -> list[SipMessage]:
    """Frame ``payload`` and spread it over the scenario's messages.

    Unused slots are zero-filled, or filled from ``rng`` when one is given
    (decoy traffic).
    """
    cfg = cfg or ChannelConfig()
    enabled = frozenset(enabled)
    framed = frame_payload(payload)
    available = flow_capacity(scenario, cfg, enabled)
    if len(framed) > available:
        raise PayloadExceedsCapacity(len(framed), available)
    return _run(scenario, framed, cfg, enabled, rng)[0]


def flow_extract(
    messages: Sequence[SipMessage],
    cfg: ChannelConfig | None = None,
    enabled: Iterable[str] = CHANNEL_IDS,
) -> BitString:
    cfg = cfg or ChannelConfig()
    parts = []
    for i, cid in build_schedule(len(messages), enabled):
        channel = get_channel(cid)
        if channel.capacity(messages[i], cfg):
            parts.append(channel.extract(messages[i], cfg))
    return deframe_payload(concat(parts))

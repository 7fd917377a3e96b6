"""Covert channels in SIP/SDP signalling messages.

Each channel implements the same contract::

    capacity(msg, cfg) -> int
    embed(msg, payload, cfg) -> (new_msg, bits_consumed)
    extract(msg, cfg) -> BitString            # exactly capacity(msg, cfg) bits

``embed`` consumes ``min(len(payload), capacity)`` bits and zero-fills the rest
of the carrier, so an over-long payload is not an error: the caller continues
with the remaining bits elsewhere.
"""

from __future__ import annotations

import base64
import binascii
import dataclasses
from dataclasses import dataclass
from typing import Iterable

from .bits import HEX, TOKEN64, BitString, decode_text, encode_text, lehmer_decode, lehmer_encode, permutation_bits
from .errors import ChannelAbsent, ConfigViolation, DuplicateReorderableHeader, SymbolNotInAlphabet
from .message import (
    DEFAULT_REORDERABLE,
    HeaderField,
    MimePart,
    MultipartBody,
    SdpBody,
    SdpLine,
    SipMessage,
    standard_name,
)

MAGIC_COOKIE = "z9hG4bK"
MAX_FORWARDS_DEFAULT = 70
MAX_FORWARDS_BITS = 4
CSEQ_BITS = 31
SP, HT = " ", "\t"

CHANNEL_IDS = (
    "branch",
    "tag",
    "call_id",
    "cseq",
    "max_forwards",
    "free_text",
    "smime_boundary",
    "smime_signature",
    "sdp_fields",
    "whitespace",
    "header_reorder",
    "case_modulation",
)

# Content channels first; reorder moves whole lines, so it precedes case
# modulation and whitespace, which must be written last.
APPLY_ORDER = (
    "branch",
    "tag",
    "call_id",
    "cseq",
    "max_forwards",
    "free_text",
    "sdp_fields",
    "smime_boundary",
    "smime_signature",
    "header_reorder",
    "case_modulation",
    "whitespace",
)

_DISPLAY_NAME_HEADERS = {"contact", "reply-to"}
_ADDABLE = {"subject", "organization", "user-agent"}


@dataclass(frozen=True)
class ChannelConfig:
    branch_len: int = 16
    tag_len: int = 8
    callid_len: int = 16
    boundary_len: int = 16
    freetext_len: int = 10
    sdp_sessid_digits: int = 10
    sdp_sessname_len: int = 10
    sdp_key_len: int = 28
    ws_run_len: int = 4
    reorderable: tuple[str, ...] = DEFAULT_REORDERABLE
    case_headers: tuple[str, ...] | None = None  # None: every header
    signature_bits: int = 160
    host_name: str = "atlanta.example.com"
    freetext_headers: tuple[str, ...] = ("Contact", "Reply-To", "Subject", "Organization", "User-Agent")
    freetext_add: tuple[str, ...] = ()

    def __post_init__(self):
        for name in ("reorderable", "case_headers", "freetext_headers", "freetext_add"):
            val = getattr(self, name)
            if val is not None and not isinstance(val, tuple):
                object.__setattr__(self, name, tuple(val))
        for name in (
            "branch_len", "tag_len", "callid_len", "boundary_len", "freetext_len",
            "sdp_sessid_digits", "sdp_sessname_len", "sdp_key_len", "ws_run_len",
        ):
            if getattr(self, name) < 1:
                raise ConfigViolation(f"{name} must be at least 1")
        if self.tag_len < 8:
            raise ConfigViolation("tag_len must be at least 8 hex chars (32 bits of randomness)")
        if self.signature_bits <= 0 or self.signature_bits % 8:
            raise ConfigViolation("signature_bits must be a positive multiple of 8")
        bad = [h for h in self.freetext_add if h.casefold() not in _ADDABLE]
        if bad:
            raise ConfigViolation(f"free-text headers that cannot be added: {bad}")
        if not self.host_name or "@" in self.host_name:
            raise ConfigViolation("host_name must be a non-empty host without '@'")

    @property
    def sessid_bits(self) -> int:
        """Bits an n-digit decimal field holds: floor(log2(10**n))."""
        return (10 ** self.sdp_sessid_digits).bit_length() - 1


def _header_or_absent(msg: SipMessage, name: str) -> tuple[int, HeaderField]:
    i = msg.header_index(name)
    if i < 0:
        raise ChannelAbsent(f"message has no {name} header")
    return i, msg.headers[i]


def _decode_prefix(text: str | None, alphabet, n_chars: int, what: str) -> BitString:
    if text is None or len(text) < n_chars:
        raise SymbolNotInAlphabet(f"{what} {text!r} is shorter than {n_chars} symbols")
    return decode_text(text[:n_chars], alphabet)


class Channel:
    """Base class; subclasses set ``id`` and fill in the three hooks."""

    id: str = ""

    def _capacity(self, msg: SipMessage, cfg: ChannelConfig) -> int:
        raise NotImplementedError

    def _write(self, msg: SipMessage, bits: BitString, cfg: ChannelConfig) -> SipMessage:
        raise NotImplementedError

    def _read(self, msg: SipMessage, cfg: ChannelConfig) -> BitString:
        raise NotImplementedError

    def capacity(self, msg: SipMessage, cfg: ChannelConfig) -> int:
        try:
            return self._capacity(msg, cfg)
        except ChannelAbsent:
            return 0

    def embed(self, msg: SipMessage, payload: BitString, cfg: ChannelConfig) -> tuple[SipMessage, int]:
        cap = self._capacity(msg, cfg)
        used = min(len(payload), cap)
        return self._write(msg, payload[:used].pad(cap), cfg), used

    def extract(self, msg: SipMessage, cfg: ChannelConfig) -> BitString:
        cap = self._capacity(msg, cfg)
        bits = self._read(msg, cfg)
        assert len(bits) == cap, (self.id, len(bits), cap)
        return bits

    def __repr__(self) -> str:
        return f"<channel {self.id}>"


class BranchChannel(Channel):
    """Via branch: magic cookie followed by token64 text."""

    id = "branch"

    def _capacity(self, msg, cfg):
        _, via = _header_or_absent(msg, "via")
        if not via.has_param("branch"):
            raise ChannelAbsent("Via header has no branch parameter")
        return TOKEN64.bits_per_symbol * cfg.branch_len

    def _write(self, msg, bits, cfg):
        i, via = _header_or_absent(msg, "via")
        value = MAGIC_COOKIE + encode_text(bits, TOKEN64, cfg.branch_len)
        return msg.with_header(i, via.with_param("branch", value))

    def _read(self, msg, cfg):
        _, via = _header_or_absent(msg, "via")
        branch = via.param("branch") or ""
        if not branch.startswith(MAGIC_COOKIE):
            raise SymbolNotInAlphabet(f"branch {branch!r} lacks the magic cookie")
        return _decode_prefix(branch[len(MAGIC_COOKIE):], TOKEN64, cfg.branch_len, "branch")


class TagChannel(Channel):
    id = "tag"

    def _capacity(self, msg, cfg):
        _header_or_absent(msg, "from")
        return HEX.bits_per_symbol * cfg.tag_len

    def _write(self, msg, bits, cfg):
        i, frm = _header_or_absent(msg, "from")
        return msg.with_header(i, frm.with_param("tag", encode_text(bits, HEX, cfg.tag_len)))

    def _read(self, msg, cfg):
        _, frm = _header_or_absent(msg, "from")
        return _decode_prefix(frm.param("tag"), HEX, cfg.tag_len, "From tag")


class CallIdChannel(Channel):
    """Call-ID as ``<hex>@<host>``."""

    id = "call_id"

    def _capacity(self, msg, cfg):
        _header_or_absent(msg, "call-id")
        return HEX.bits_per_symbol * cfg.callid_len

    def _write(self, msg, bits, cfg):
        i, h = _header_or_absent(msg, "call-id")
        return msg.with_header(i, h.with_value(f"{encode_text(bits, HEX, cfg.callid_len)}@{cfg.host_name}"))

    def _read(self, msg, cfg):
        _, h = _header_or_absent(msg, "call-id")
        return _decode_prefix(h.value.partition("@")[0], HEX, cfg.callid_len, "Call-ID")


def _split_cseq(value: str) -> tuple[str, str]:
    digits = len(value) - len(value.lstrip("0123456789"))
    return value[:digits], value[digits:]


class CSeqChannel(Channel):
    """Initial CSeq number: 31 bits keep it below 2**31."""

    id = "cseq"

    def _capacity(self, msg, cfg):
        _header_or_absent(msg, "cseq")
        return CSEQ_BITS

    def _write(self, msg, bits, cfg):
        i, h = _header_or_absent(msg, "cseq")
        _, rest = _split_cseq(h.value)
        return msg.with_header(i, h.with_value(f"{bits.to_int()}{rest}"))

    def _read(self, msg, cfg):
        _, h = _header_or_absent(msg, "cseq")
        number, _ = _split_cseq(h.value)
        if not number or int(number) >> CSEQ_BITS:
            raise SymbolNotInAlphabet(f"CSeq {h.value!r} does not hold a 31-bit number")
        return BitString.from_int(int(number), CSEQ_BITS)


class MaxForwardsChannel(Channel):
    """Max-Forwards = 70 - n for a 4-bit n, so values stay in [55, 70]."""

    id = "max_forwards"

    def _capacity(self, msg, cfg):
        _header_or_absent(msg, "max-forwards")
        return MAX_FORWARDS_BITS

    def _write(self, msg, bits, cfg):
        i, h = _header_or_absent(msg, "max-forwards")
        return msg.with_header(i, h.with_value(str(MAX_FORWARDS_DEFAULT - bits.to_int())))

    def _read(self, msg, cfg):
        _, h = _header_or_absent(msg, "max-forwards")
        try:
            n = MAX_FORWARDS_DEFAULT - int(h.value.strip())
        except ValueError:
            raise SymbolNotInAlphabet(f"Max-Forwards {h.value!r} is not a number") from None
        if not 0 <= n < 1 << MAX_FORWARDS_BITS:
            raise SymbolNotInAlphabet(f"Max-Forwards {h.value!r} outside [55, 70]")
        return BitString.from_int(n, MAX_FORWARDS_BITS)


def _angle_start(value: str) -> int:
    quoted = False
    for i, ch in enumerate(value):
        if ch == '"':
            quoted = not quoted
        elif ch == "<" and not quoted:
            return i
    return -1


class FreeTextChannel(Channel):
    """Display names and free-form text headers with no protocol meaning."""

    id = "free_text"

    def _carriers(self, msg: SipMessage, cfg: ChannelConfig) -> list[str]:
        out = []
        for name in cfg.freetext_headers:
            key = name.casefold()
            h = msg.header(key)
            if h is None:
                if key in {a.casefold() for a in cfg.freetext_add}:
                    out.append(key)
            elif key in _DISPLAY_NAME_HEADERS:
                if _angle_start(h.value) >= 0:
                    out.append(key)
            else:
                out.append(key)
        return out

    def _capacity(self, msg, cfg):
        return TOKEN64.bits_per_symbol * cfg.freetext_len * len(self._carriers(msg, cfg))

    def _write(self, msg, bits, cfg):
        width = TOKEN64.bits_per_symbol * cfg.freetext_len
        for k, key in enumerate(self._carriers(msg, cfg)):
            text = encode_text(bits[k * width:(k + 1) * width], TOKEN64, cfg.freetext_len)
            i = msg.header_index(key)
            if i < 0:
                msg = _insert_before_content(msg, HeaderField(standard_name(key), text))
            elif key in _DISPLAY_NAME_HEADERS:
                h = msg.headers[i]
                msg = msg.with_header(i, h.with_value(f"{text} {h.value[_angle_start(h.value):]}"))
            else:
                msg = msg.with_header(i, msg.headers[i].with_value(text))
        return msg

    def _read(self, msg, cfg):
        parts = []
        for key in self._carriers(msg, cfg):
            h = msg.header(key)
            if h is None:
                raise SymbolNotInAlphabet(f"free-text carrier {key} missing")
            if key in _DISPLAY_NAME_HEADERS:
                text = h.value[:_angle_start(h.value)].strip().strip('"')
            else:
                text = h.value
            parts.append(_decode_prefix(text, TOKEN64, cfg.freetext_len, key))
        return BitString("".join(str(p) for p in parts))


def _insert_before_content(msg: SipMessage, header: HeaderField) -> SipMessage:
    headers = list(msg.headers)
    pos = next(
        (i for i, h in enumerate(headers) if h.canonical_name.startswith("content-")),
        len(headers),
    )
    headers.insert(pos, header)
    return msg.with_headers(headers)


def _multipart(msg: SipMessage) -> MultipartBody:
    if not isinstance(msg.body, MultipartBody):
        raise ChannelAbsent("message body is not multipart")
    return msg.body


class SmimeBoundaryChannel(Channel):
    id = "smime_boundary"

    def _capacity(self, msg, cfg):
        _multipart(msg)
        return HEX.bits_per_symbol * cfg.boundary_len

    def _write(self, msg, bits, cfg):
        body = _multipart(msg)
        boundary = encode_text(bits, HEX, cfg.boundary_len)
        i, ct = _header_or_absent(msg, "content-type")
        old = ct.param("boundary") or ""
        quoted = old.startswith('"')
        ct = ct.with_param("boundary", f'"{boundary}"' if quoted else boundary)
        msg = msg.with_header(i, ct)
        return msg.with_body(dataclasses.replace(body, boundary=boundary))

    def _read(self, msg, cfg):
        return _decode_prefix(_multipart(msg).boundary, HEX, cfg.boundary_len, "boundary")


SIGNATURE_TYPE = "application/pkcs7-signature"


def _signature_part(msg: SipMessage) -> tuple[MultipartBody, int]:
    body = _multipart(msg)
    i = body.part_index(SIGNATURE_TYPE)
    if i < 0:
        raise ChannelAbsent("multipart body has no signature part")
    return body, i


class SmimeSignatureChannel(Channel):
    """Signature part replaced by base64 covert bytes (verification forfeited)."""

    id = "smime_signature"
    line_width = 76

    def _capacity(self, msg, cfg):
        _signature_part(msg)
        return cfg.signature_bits

    def _write(self, msg, bits, cfg):
        body, i = _signature_part(msg)
        text = base64.b64encode(bits.to_bytes()).decode("ascii")
        T = body.terminator
        wrapped = T.join(text[j:j + self.line_width] for j in range(0, len(text), self.line_width)) + T
        part = MimePart(body.parts[i].headers, wrapped.encode("ascii"))
        return msg.with_body(body.with_part(i, part))

    def _read(self, msg, cfg):
        body, i = _signature_part(msg)
        compact = b"".join(body.parts[i].body.split())
        try:
            raw = base64.b64decode(compact, validate=True)
        except (binascii.Error, ValueError):
            raise SymbolNotInAlphabet("signature part is not base64") from None
        if len(raw) * 8 != cfg.signature_bits:
            raise SymbolNotInAlphabet(f"signature holds {len(raw) * 8} bits, expected {cfg.signature_bits}")
        return BitString.from_bytes(raw)


def _sdp(msg: SipMessage) -> SdpBody:
    if not isinstance(msg.body, SdpBody):
        raise ChannelAbsent("message carries no SDP body")
    sdp = msg.body
    o = sdp.get("o")
    if o is None or len(o.value.split(" ")) < 3 or sdp.get("s") is None:
        raise ChannelAbsent("SDP body lacks o= or s= line")
    return sdp


class SdpFieldsChannel(Channel):
    """o= session id and version, s= session name, k= key text."""

    id = "sdp_fields"

    def _capacity(self, msg, cfg):
        _sdp(msg)
        return 2 * cfg.sessid_bits + TOKEN64.bits_per_symbol * (cfg.sdp_sessname_len + cfg.sdp_key_len)

    def _write(self, msg, bits, cfg):
        sdp = _sdp(msg)
        n, digits = cfg.sessid_bits, cfg.sdp_sessid_digits
        name_bits = TOKEN64.bits_per_symbol * cfg.sdp_sessname_len
        sess_id = str(bits[:n].to_int()).zfill(digits)
        sess_ver = str(bits[n:2 * n].to_int()).zfill(digits)
        name = encode_text(bits[2 * n:2 * n + name_bits], TOKEN64, cfg.sdp_sessname_len)
        key = encode_text(bits[2 * n + name_bits:], TOKEN64, cfg.sdp_key_len)

        oi = sdp.index("o")
        fields = sdp.lines[oi].value.split(" ")
        fields[1], fields[2] = sess_id, sess_ver
        sdp = sdp.with_line(oi, SdpLine("o", " ".join(fields)))
        sdp = sdp.with_line(sdp.index("s"), SdpLine("s", name))
        k_line = SdpLine("k", "clear:" + key)
        ki = sdp.index("k")
        if ki >= 0:
            sdp = sdp.with_line(ki, k_line)
        else:
            pos = next((j for j, l in enumerate(sdp.lines) if l.type in "am"), len(sdp.lines))
            sdp = sdp.inserted(pos, k_line)
        return msg.with_body(sdp)

    def _read(self, msg, cfg):
        sdp = _sdp(msg)
        fields = sdp.get("o").value.split(" ")
        out = []
        for f in fields[1:3]:
            if not f.isdigit() or int(f) >> cfg.sessid_bits:
                raise SymbolNotInAlphabet(f"o= field {f!r} is not a {cfg.sessid_bits}-bit number")
            out.append(BitString.from_int(int(f), cfg.sessid_bits))
        out.append(_decode_prefix(sdp.get("s").value, TOKEN64, cfg.sdp_sessname_len, "s="))
        k = sdp.get("k")
        if k is None or not k.value.startswith("clear:"):
            raise SymbolNotInAlphabet("no k=clear: line")
        out.append(_decode_prefix(k.value[len("clear:"):], TOKEN64, cfg.sdp_key_len, "k="))
        return BitString("".join(str(b) for b in out))


def encode_ws_run(bits: BitString) -> str:
    """SP carries 0, HT carries 1."""
    return "".join(HT if b else SP for b in bits)


def decode_ws_run(run: str) -> BitString:
    if run.strip(SP + HT):
        raise SymbolNotInAlphabet(f"run {run!r} holds characters other than SP/HT")
    return BitString("".join("1" if c == HT else "0" for c in run))


class WhitespaceChannel(Channel):
    """A fixed-length SP/HT run after the start line and every header line."""

    id = "whitespace"

    def _capacity(self, msg, cfg):
        return cfg.ws_run_len * (1 + len(msg.headers))

    def _write(self, msg, bits, cfg):
        n = cfg.ws_run_len
        runs = [encode_ws_run(bits[k * n:(k + 1) * n]) for k in range(1 + len(msg.headers))]
        msg = msg.with_start_line(msg.start_line.with_trailing_ws(runs[0]))
        return msg.with_headers(h.with_trailing_ws(r) for h, r in zip(msg.headers, runs[1:]))

    def _read(self, msg, cfg):
        runs = [msg.start_line.trailing_ws] + [h.trailing_ws for h in msg.headers]
        for run in runs:
            if len(run) != cfg.ws_run_len:
                raise SymbolNotInAlphabet(f"trailing run {run!r} is not {cfg.ws_run_len} characters")
        return BitString("".join(str(decode_ws_run(r)) for r in runs))


class HeaderReorderChannel(Channel):
    """Order of the reorderable headers as a permutation index."""

    id = "header_reorder"

    def _slots(self, msg: SipMessage, cfg: ChannelConfig) -> list[int]:
        keys = {name.casefold() for name in cfg.reorderable}
        slots = [i for i, h in enumerate(msg.headers) if h.canonical_name in keys]
        names = [msg.headers[i].canonical_name for i in slots]
        if len(set(names)) != len(names):
            raise DuplicateReorderableHeader(f"reorderable header repeated: {names}")
        if len(slots) < 2:
            raise ChannelAbsent("fewer than two reorderable headers present")
        return slots

    def _capacity(self, msg, cfg):
        return permutation_bits(len(self._slots(msg, cfg)))

    def embed(self, msg, payload, cfg):
        if len(cfg.reorderable) < 2:
            raise ConfigViolation("header_reorder needs at least two reorderable headers")
        return super().embed(msg, payload, cfg)

    def _write(self, msg, bits, cfg):
        slots = self._slots(msg, cfg)
        reference = sorted((msg.headers[i] for i in slots), key=lambda h: h.canonical_name)
        perm = lehmer_encode(bits.to_int(), len(slots))
        headers = list(msg.headers)
        for slot, p in zip(slots, perm):
            headers[slot] = reference[p]
        return msg.with_headers(headers)

    def _read(self, msg, cfg):
        slots = self._slots(msg, cfg)
        index = observed_permutation_index(msg, slots)
        width = permutation_bits(len(slots))
        if index >> width:
            raise SymbolNotInAlphabet(f"header order index {index} exceeds {width} bits")
        return BitString.from_int(index, width)


def observed_permutation_index(msg: SipMessage, slots: list[int]) -> int:
    """Lehmer rank of the headers at ``slots`` relative to alphabetical order."""
    names = [msg.headers[i].canonical_name for i in slots]
    ranked = sorted(names)
    return lehmer_decode([ranked.index(n) for n in names])


class CaseModulationChannel(Channel):
    """Header name all upper case for 1, all lower case for 0."""

    id = "case_modulation"

    def _selected(self, msg: SipMessage, cfg: ChannelConfig) -> list[int]:
        if cfg.case_headers is None:
            return list(range(len(msg.headers)))
        keys = {n.casefold() for n in cfg.case_headers}
        return [i for i, h in enumerate(msg.headers) if h.canonical_name in keys]

    def _capacity(self, msg, cfg):
        return len(self._selected(msg, cfg))

    def _write(self, msg, bits, cfg):
        headers = list(msg.headers)
        for i, b in zip(self._selected(msg, cfg), bits):
            name = headers[i].raw_name
            headers[i] = headers[i].with_name(name.upper() if b else name.lower())
        return msg.with_headers(headers)

    def _read(self, msg, cfg):
        out = []
        for i in self._selected(msg, cfg):
            name = msg.headers[i].raw_name
            if name.isupper():
                out.append("1")
            elif name.islower():
                out.append("0")
            else:
                raise SymbolNotInAlphabet(f"header name {name!r} is mixed case")
        return BitString("".join(out))


CHANNELS: dict[str, Channel] = {
    c.id: c
    for c in (
        BranchChannel(),
        TagChannel(),
        CallIdChannel(),
        CSeqChannel(),
        MaxForwardsChannel(),
        FreeTextChannel(),
        SmimeBoundaryChannel(),
        SmimeSignatureChannel(),
        SdpFieldsChannel(),
        WhitespaceChannel(),
        HeaderReorderChannel(),
        CaseModulationChannel(),
    )
}
assert tuple(CHANNELS) == CHANNEL_IDS


def get_channel(channel_id: str) -> Channel:
    try:
        return CHANNELS[channel_id]
    except KeyError:
        raise ValueError(f"unknown channel {channel_id!r}; choose from {', '.join(CHANNEL_IDS)}") from None


def parse_channel_ids(spec: str | Iterable[str]) -> frozenset[str]:
    """Accepts ``"all"``, ``"none"``, a CSV string or an iterable of ids."""
    if isinstance(spec, str):
        spec = spec.strip()
        if spec == "all":
            return frozenset(CHANNEL_IDS)
        if spec in ("", "none"):
            return frozenset()
        spec = [s.strip() for s in spec.split(",") if s.strip()]
    ids = frozenset(spec)
    for cid in ids:
        get_channel(cid)
    return ids


def in_apply_order(ids: Iterable[str]) -> list[str]:
    ids = set(ids)
    return [cid for cid in APPLY_ORDER if cid in ids]


def channel_capacity(channel_id: str, msg: SipMessage, cfg: ChannelConfig | None = None) -> int:
    return get_channel(channel_id).capacity(msg, cfg or ChannelConfig())


def embed(channel_id: str, msg: SipMessage, payload: BitString, cfg: ChannelConfig | None = None) -> tuple[SipMessage, int]:
    return get_channel(channel_id).embed(msg, payload, cfg or ChannelConfig())


def extract(channel_id: str, msg: SipMessage, cfg: ChannelConfig | None = None) -> BitString:
    return get_channel(channel_id).extract(msg, cfg or ChannelConfig())


def constraint_violations(msg: SipMessage, touched: Iterable[str] = CHANNEL_IDS) -> list[str]:
    """Protocol rules a channel must never break, checked for the channels in ``touched``."""
    touched = set(touched)
    problems = []
    via = msg.header("via")
    if "branch" in touched and via is not None and via.has_param("branch"):
        if not (via.param("branch") or "").startswith(MAGIC_COOKIE):
            problems.append(f"branch without magic cookie: {via.param('branch')!r}")
    cseq = msg.header("cseq")
    if "cseq" in touched and cseq is not None:
        number, _ = _split_cseq(cseq.value)
        if not number or int(number) >= 2 ** 31:
            problems.append(f"CSeq not below 2**31: {cseq.value!r}")
    frm = msg.header("from")
    if "tag" in touched and frm is not None:
        tag = frm.param("tag") or ""
        if len(tag) < 8 or any(c not in HEX.symbols for c in tag):
            problems.append(f"tag shorter than 8 hex chars: {tag!r}")
    mf = msg.header("max-forwards")
    if "max_forwards" in touched and mf is not None:
        if not mf.value.strip().isdigit() or not 55 <= int(mf.value) <= 70:
            problems.append(f"Max-Forwards outside [55, 70]: {mf.value!r}")
    if isinstance(msg.body, MultipartBody):
        ct = msg.header("content-type")
        declared = (ct.param("boundary") or "").strip('"') if ct else ""
        if declared != msg.body.boundary:
            problems.append(f"boundary parameter {declared!r} != body delimiter {msg.body.boundary!r}")
    return problems

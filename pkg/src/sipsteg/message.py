"""Lossless SIP/SDP message model.

Conventional SIP parsers normalise away header-name case, trailing blanks and
header order. Several covert channels live exactly there, so this parser keeps
every byte: ``serialize_message(parse_message(b)) == b`` for every accepted
input. All types are frozen; the ``with_*`` helpers return modified copies and
set :attr:`SipMessage.modified`, which makes serialisation recompute
Content-Length.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass
from typing import Iterable, Union

from .errors import MalformedMessage

CRLF = "\r\n"
LF = "\n"
BLANKS = " \t"
ENCODING = "utf-8"
ERRORS = "surrogateescape"

FLOW_SEPARATOR = b"--- sipsteg-message-boundary ---"

# Names whose conventional spelling is not plain Title-Case.
_STANDARD_NAMES = {
    "call-id": "Call-ID",
    "cseq": "CSeq",
    "mime-version": "MIME-Version",
    "www-authenticate": "WWW-Authenticate",
    "rack": "RAck",
    "rseq": "RSeq",
    "sip-etag": "SIP-ETag",
    "sip-if-match": "SIP-If-Match",
}

_COMPACT = {
    "i": "call-id",
    "m": "contact",
    "e": "content-encoding",
    "l": "content-length",
    "c": "content-type",
    "f": "from",
    "s": "subject",
    "k": "supported",
    "t": "to",
    "v": "via",
}
_COMPACT_REVERSE = {v: k for k, v in _COMPACT.items()}

DEFAULT_REORDERABLE = ("Call-ID", "Contact", "CSeq", "From", "Max-Forwards", "To")


def standard_name(name: str) -> str:
    """Conventional mixed-case spelling of a header name (``cseq`` -> ``CSeq``)."""
    key = name.casefold()
    if key in _STANDARD_NAMES:
        return _STANDARD_NAMES[key]
    if len(key) == 1:
        return key
    return "-".join(part.capitalize() for part in key.split("-"))


def reference_order(names: Iterable[str]) -> list[str]:
    """Case-insensitive alphabetical order, the shared reorder reference."""
    return sorted(names, key=str.casefold)


def _strip_trailing(line: str) -> tuple[str, str]:
    core = line.rstrip(BLANKS)
    return core, line[len(core):]


def _first_param_sep(value: str) -> int:
    """Index of the first ``;`` outside quotes and angle brackets, or -1."""
    depth = 0
    quoted = False
    escaped = False
    for i, ch in enumerate(value):
        if quoted:
            if escaped:
                escaped = False
            elif ch == "\\":
                escaped = True
            elif ch == '"':
                quoted = False
        elif ch == '"':
            quoted = True
        elif ch == "<":
            depth += 1
        elif ch == ">":
            depth = max(0, depth - 1)
        elif ch == ";" and depth == 0:
            return i
    return -1


def _split_unquoted(text: str, sep: str) -> list[str]:
    out, cur, quoted = [], [], False
    for ch in text:
        if ch == '"':
            quoted = not quoted
        if ch == sep and not quoted:
            out.append("".join(cur))
            cur = []
        else:
            cur.append(ch)
    out.append("".join(cur))
    return out


@dataclass(frozen=True)
class HeaderField:
    raw_name: str
    value: str
    separator: str = ": "
    trailing_ws: str = ""

    @property
    def canonical_name(self) -> str:
        return self.raw_name.casefold()

    @classmethod
    def parse(cls, line: str) -> HeaderField:
        if line[:1] in (" ", "\t"):
            raise MalformedMessage(f"folded header continuation is not supported: {line!r}")
        core, trailing = _strip_trailing(line)
        name_part, colon, rest = core.partition(":")
        raw_name = name_part.rstrip(BLANKS)
        if not colon:
            raise MalformedMessage(f"header line without colon: {line!r}")
        if not raw_name or any(c in raw_name for c in " \t\r\n"):
            raise MalformedMessage(f"bad header name in {line!r}")
        value = rest.lstrip(BLANKS)
        separator = name_part[len(raw_name):] + ":" + rest[: len(rest) - len(value)]
        return cls(raw_name, value, separator, trailing)

    def to_line(self) -> str:
        return f"{self.raw_name}{self.separator}{self.value}{self.trailing_ws}"

    def _split(self) -> tuple[str, list[str]]:
        i = _first_param_sep(self.value)
        if i < 0:
            return self.value, []
        return self.value[:i], _split_unquoted(self.value[i + 1:], ";")

    @property
    def params(self) -> tuple[tuple[str, str | None], ...]:
        """Header parameters in wire order (URI parameters inside ``<>`` excluded)."""
        out = []
        for seg in self._split()[1]:
            name, eq, val = seg.partition("=")
            out.append((name.strip(), val.strip() if eq else None))
        return tuple(out)

    def param(self, name: str) -> str | None:
        key = name.casefold()
        for pname, pval in self.params:
            if pname.casefold() == key:
                return pval
        return None

    def has_param(self, name: str) -> bool:
        key = name.casefold()
        return any(p.casefold() == key for p, _ in self.params)

    def with_param(self, name: str, value: str) -> HeaderField:
        """Set a parameter, keeping every other byte of the value intact."""
        head, segs = self._split()
        key = name.casefold()
        for i, seg in enumerate(segs):
            pname, eq, pval = seg.partition("=")
            if pname.strip().casefold() != key:
                continue
            if not eq:
                segs[i] = f"{seg}={value}"
            else:
                body = pval.strip(BLANKS)
                lead = pval[: len(pval) - len(pval.lstrip(BLANKS))]
                trail = pval[len(lead) + len(body):]
                segs[i] = f"{pname}={lead}{value}{trail}"
            return self.with_value(head + ";" + ";".join(segs))
        return self.with_value(f"{self.value};{name}={value}")

    def with_value(self, value: str) -> HeaderField:
        return dataclasses.replace(self, value=value)

    def with_name(self, raw_name: str) -> HeaderField:
        return dataclasses.replace(self, raw_name=raw_name)

    def with_trailing_ws(self, ws: str) -> HeaderField:
        if ws.strip(BLANKS):
            raise ValueError(f"trailing whitespace may only hold SP/HT: {ws!r}")
        return dataclasses.replace(self, trailing_ws=ws)


@dataclass(frozen=True)
class StartLine:
    """Request-Line or Status-Line, kept as text plus its trailing blanks."""

    text: str
    trailing_ws: str = ""

    @classmethod
    def parse(cls, line: str) -> StartLine:
        core, trailing = _strip_trailing(line)
        sl = cls(core, trailing)
        if sl.kind == "response":
            parts = core.split(" ", 2)
            if len(parts) < 2 or not (parts[1].isdigit() and len(parts[1]) == 3):
                raise MalformedMessage(f"bad status line: {line!r}")
        else:
            head, _, rest = core.partition(" ")
            uri, _, version = rest.rpartition(" ")
            if not head or not uri or not version.startswith("SIP/"):
                raise MalformedMessage(f"bad request line: {line!r}")
        return sl

    @property
    def kind(self) -> str:
        return "response" if self.text.startswith("SIP/") else "request"

    @property
    def method(self) -> str | None:
        return self.text.partition(" ")[0] if self.kind == "request" else None

    @property
    def uri(self) -> str | None:
        if self.kind != "request":
            return None
        return self.text.partition(" ")[2].rpartition(" ")[0]

    @property
    def version(self) -> str:
        if self.kind == "response":
            return self.text.partition(" ")[0]
        return self.text.rpartition(" ")[2]

    @property
    def status_code(self) -> int | None:
        return int(self.text.split(" ", 2)[1]) if self.kind == "response" else None

    @property
    def reason(self) -> str | None:
        if self.kind != "response":
            return None
        parts = self.text.split(" ", 2)
        return parts[2] if len(parts) == 3 else ""

    def to_line(self) -> str:
        return self.text + self.trailing_ws

    def with_trailing_ws(self, ws: str) -> StartLine:
        if ws.strip(BLANKS):
            raise ValueError(f"trailing whitespace may only hold SP/HT: {ws!r}")
        return dataclasses.replace(self, trailing_ws=ws)


@dataclass(frozen=True)
class SdpLine:
    type: str
    value: str

    def to_line(self) -> str:
        return f"{self.type}={self.value}"


@dataclass(frozen=True)
class SdpBody:
    lines: tuple[SdpLine, ...]
    terminator: str = CRLF
    final_terminator: bool = True

    @classmethod
    def parse(cls, data: bytes, default_terminator: str = CRLF) -> SdpBody | None:
        """Parse ``type=value`` lines; return None when the text is not plain SDP."""
        text = data.decode(ENCODING, ERRORS)
        if "\r\n" in text:
            term = CRLF
            if text.count("\n") != text.count("\r\n") or text.count("\r") != text.count("\r\n"):
                return None
        elif "\n" in text:
            term = LF
            if "\r" in text:
                return None
        else:
            term = default_terminator
        raw = text.split(term)
        final = raw[-1] == ""
        if final:
            raw.pop()
        lines = []
        for line in raw:
            if len(line) < 2 or line[1] != "=" or not ("a" <= line[0] <= "z"):
                return None
            lines.append(SdpLine(line[0], line[2:]))
        return cls(tuple(lines), term, final)

    def to_bytes(self) -> bytes:
        text = self.terminator.join(l.to_line() for l in self.lines)
        if self.final_terminator and self.lines:
            text += self.terminator
        return text.encode(ENCODING, ERRORS)

    def index(self, type_char: str) -> int:
        for i, line in enumerate(self.lines):
            if line.type == type_char:
                return i
        return -1

    def get(self, type_char: str) -> SdpLine | None:
        i = self.index(type_char)
        return self.lines[i] if i >= 0 else None

    def with_line(self, i: int, line: SdpLine) -> SdpBody:
        lines = list(self.lines)
        lines[i] = line
        return dataclasses.replace(self, lines=tuple(lines))

    def inserted(self, i: int, line: SdpLine) -> SdpBody:
        lines = list(self.lines)
        lines.insert(i, line)
        return dataclasses.replace(self, lines=tuple(lines))


@dataclass(frozen=True)
class MimePart:
    headers: tuple[HeaderField, ...]
    body: bytes

    def header(self, name: str) -> HeaderField | None:
        key = name.casefold()
        return next((h for h in self.headers if h.canonical_name == key), None)

    @property
    def media_type(self) -> str:
        ct = self.header("content-type")
        return ct.value.split(";")[0].strip().casefold() if ct else ""


@dataclass(frozen=True)
class MultipartBody:
    boundary: str
    parts: tuple[MimePart, ...]
    preamble: bytes = b""
    epilogue: bytes = b""
    terminator: str = CRLF

    @classmethod
    def parse(cls, data: bytes, boundary: str, terminator: str = CRLF) -> MultipartBody | None:
        T = terminator.encode()
        delim = b"--" + boundary.encode(ENCODING, ERRORS)

        def is_delim_at(pos: int) -> bool:
            after = pos + len(delim)
            return data.startswith(delim, pos) and (
                data.startswith(T, after) or data.startswith(b"--", after)
            )

        if is_delim_at(0):
            start = 0
        else:
            start = -1
            probe = data.find(T + delim)
            while probe >= 0:
                if is_delim_at(probe + len(T)):
                    start = probe + len(T)
                    break
                probe = data.find(T + delim, probe + 1)
            if start < 0:
                return None
        preamble = data[:start]
        pos = start + len(delim)
        parts = []
        while True:
            if data.startswith(b"--", pos):
                epilogue = data[pos + 2:]
                break
            pos += len(T)
            nxt = data.find(T + delim, pos)
            while nxt >= 0 and not is_delim_at(nxt + len(T)):
                nxt = data.find(T + delim, nxt + 1)
            if nxt < 0:
                return None
            part = cls._parse_part(data[pos:nxt], terminator)
            if part is None:
                return None
            parts.append(part)
            pos = nxt + len(T) + len(delim)
        return cls(boundary, tuple(parts), preamble, epilogue, terminator)

    @staticmethod
    def _parse_part(raw: bytes, terminator: str) -> MimePart | None:
        T = terminator.encode()
        if raw.startswith(T):
            return MimePart((), raw[len(T):])
        idx = raw.find(T + T)
        if idx < 0:
            return None
        head = raw[:idx].decode(ENCODING, ERRORS)
        try:
            headers = tuple(HeaderField.parse(line) for line in head.split(terminator))
        except MalformedMessage:
            return None
        return MimePart(headers, raw[idx + 2 * len(T):])

    def to_bytes(self) -> bytes:
        T = self.terminator.encode()
        delim = b"--" + self.boundary.encode(ENCODING, ERRORS)
        out = [self.preamble]
        for part in self.parts:
            out.append(delim + T)
            for h in part.headers:
                out.append(h.to_line().encode(ENCODING, ERRORS) + T)
            out.append(T + part.body + T)
        out.append(delim + b"--" + self.epilogue)
        return b"".join(out)

    def part_index(self, media_type: str) -> int:
        for i, part in enumerate(self.parts):
            if part.media_type == media_type:
                return i
        return -1

    def with_part(self, i: int, part: MimePart) -> MultipartBody:
        parts = list(self.parts)
        parts[i] = part
        return dataclasses.replace(self, parts=tuple(parts))


@dataclass(frozen=True)
class OpaqueBody:
    data: bytes

    def to_bytes(self) -> bytes:
        return self.data


MessageBody = Union[SdpBody, MultipartBody, OpaqueBody, None]


@dataclass(frozen=True)
class SipMessage:
    start_line: StartLine
    headers: tuple[HeaderField, ...] = ()
    body: MessageBody = None
    line_terminator: str = CRLF
    modified: bool = False

    def header(self, name: str) -> HeaderField | None:
        i = self.header_index(name)
        return self.headers[i] if i >= 0 else None

    def header_index(self, name: str) -> int:
        key = name.casefold()
        alias = _COMPACT.get(key) or _COMPACT_REVERSE.get(key)
        for i, h in enumerate(self.headers):
            if h.canonical_name == key or h.canonical_name == alias:
                return i
        return -1

    def body_bytes(self) -> bytes:
        return self.body.to_bytes() if self.body is not None else b""

    def with_header(self, i: int, header: HeaderField) -> SipMessage:
        headers = list(self.headers)
        headers[i] = header
        return self.with_headers(headers)

    def with_headers(self, headers: Iterable[HeaderField]) -> SipMessage:
        return dataclasses.replace(self, headers=tuple(headers), modified=True)

    def with_body(self, body: MessageBody) -> SipMessage:
        return dataclasses.replace(self, body=body, modified=True)

    def with_start_line(self, start_line: StartLine) -> SipMessage:
        return dataclasses.replace(self, start_line=start_line, modified=True)

    @property
    def method(self) -> str | None:
        return self.start_line.method

    def to_bytes(self) -> bytes:
        return serialize_message(self)


def parse_message(data: bytes) -> SipMessage:
    """Parse one complete SIP message.

    Accepts CRLF or bare-LF line endings (consistently), rejects folded
    headers, trusts Content-Length when present and otherwise takes the rest
    of the input as the body.
    """
    nl = data.find(b"\n")
    if nl < 0:
        raise MalformedMessage("no line terminator")
    term = CRLF if nl > 0 and data[nl - 1:nl] == b"\r" else LF
    T = term.encode()
    end = data.find(T + T)
    if data.startswith(T):
        raise MalformedMessage("no start line")
    if end < 0:
        raise MalformedMessage("missing empty line after the header section")
    head = data[:end].decode(ENCODING, ERRORS)
    rest = data[end + 2 * len(T):]
    if term == LF and "\r" in head:
        raise MalformedMessage("mixed line terminators")
    if term == CRLF and head.count("\n") != head.count("\r\n"):
        raise MalformedMessage("mixed line terminators")
    lines = head.split(term)
    start = StartLine.parse(lines[0])
    headers = tuple(HeaderField.parse(line) for line in lines[1:])
    msg = SipMessage(start, headers, None, term)

    cl = msg.header("content-length")
    if cl is not None:
        try:
            n = int(cl.value.strip())
        except ValueError:
            raise MalformedMessage(f"bad Content-Length {cl.value!r}") from None
        if n < 0 or len(rest) < n:
            raise MalformedMessage(f"body shorter than Content-Length {n}")
        if len(rest) > n:
            raise MalformedMessage(f"{len(rest) - n} bytes after the declared body")
    if not rest:
        return msg
    return dataclasses.replace(msg, body=_classify_body(msg, rest, term))


def _classify_body(msg: SipMessage, data: bytes, term: str) -> MessageBody:
    ct = msg.header("content-type")
    media = ct.value.split(";")[0].strip().casefold() if ct else ""
    body = None
    if media == "application/sdp":
        body = SdpBody.parse(data, term)
    elif media.startswith("multipart/"):
        boundary = ct.param("boundary")
        if boundary:
            body = MultipartBody.parse(data, boundary.strip('"'), term)
    return body if body is not None else OpaqueBody(data)


def serialize_message(msg: SipMessage) -> bytes:
    T = msg.line_terminator
    body = msg.body_bytes()
    headers = msg.headers
    if msg.modified:
        i = msg.header_index("content-length")
        if i >= 0:
            headers = list(headers)
            headers[i] = headers[i].with_value(str(len(body)))
    lines = [msg.start_line.to_line()] + [h.to_line() for h in headers]
    return (T.join(lines) + T + T).encode(ENCODING, ERRORS) + body


def find_header(msg: SipMessage, canonical_name: str) -> HeaderField | None:
    return msg.header(canonical_name)


def canonicalize(msg: SipMessage, reorderable: Iterable[str] = DEFAULT_REORDERABLE) -> SipMessage:
    """Warden reference form: no trailing blanks, standard name case,
    reorderable headers in alphabetical order. Values and body are untouched."""
    keys = {name.casefold() for name in reorderable}
    headers = [
        dataclasses.replace(h, raw_name=standard_name(h.raw_name), trailing_ws="")
        for h in msg.headers
    ]
    slots = [i for i, h in enumerate(headers) if h.canonical_name in keys]
    ordered = sorted((headers[i] for i in slots), key=lambda h: h.canonical_name)
    for i, h in zip(slots, ordered):
        headers[i] = h
    return dataclasses.replace(
        msg,
        start_line=dataclasses.replace(msg.start_line, trailing_ws=""),
        headers=tuple(headers),
    )


def read_flow(data: bytes) -> list[SipMessage]:
    """Split a flow file on separator lines and parse each message."""
    chunks, cur = [], []
    for line in data.splitlines(keepends=True):
        if line.rstrip(b"\r\n") == FLOW_SEPARATOR:
            chunks.append(b"".join(cur))
            cur = []
        else:
            cur.append(line)
    if cur or chunks:
        chunks.append(b"".join(cur))
    return [parse_message(c) for c in chunks]


def write_flow(messages: Iterable[SipMessage]) -> bytes:
    out = []
    msgs = list(messages)
    for i, msg in enumerate(msgs):
        data = serialize_message(msg)
        out.append(data)
        if i < len(msgs) - 1:
            if not data.endswith(b"\n"):
                raise ValueError(f"message {i} does not end with a line break; cannot be followed by a separator")
            out.append(FLOW_SEPARATOR + msg.line_terminator.encode())
    return b"".join(out)

"""Reference carrier messages.

``INVITE_SDP``        INVITE with an SDP offer, as a typical UA emits it.
``INVITE_SMIME``      INVITE whose SDP is wrapped in S/MIME multipart/signed.
``WHITESPACE_SAMPLE`` short INVITE with SP/HT runs after the lines.

Content-Length values are the true body lengths. Header lines that are
commonly shown folded are written unfolded, since the parser rejects folding.
"""

from __future__ import annotations

CRLF = "\r\n"


def _crlf(lines: list[str]) -> bytes:
    return CRLF.join(lines).encode()


_SDP_LINES = [
    "v=0",
    "o=alice 2890844526 2890844526 IN IP4 client.atlanta.example.com",
    "s=-",
    "c=IN IP4 192.0.2.101",
    "t=0 0",
    "k=clear:9123123kjhdasdoq12e31021n2e4",
    "m=audio 49172 RTP/AVP 0",
    "a=rtpmap:0 PCMU/8000",
    "",
]
SDP_OFFER = _crlf(_SDP_LINES)

INVITE_SDP = _crlf([
    "INVITE sip:bob@biloxi.example.com SIP/2.0",
    "Via: SIP/2.0/TCP client.atlanta.example.com:5060;branch=z9hG4bK74bf9",
    "Max-Forwards: 70",
    "From: Alice <sip:alice@atlanta.example.com>;tag=9fxced76s1",
    "To: Bob <sip:bob@biloxi.example.com>",
    "Call-ID: 3848276298220188511@atlanta.example.com",
    "CSeq: 12345 INVITE",
    "Contact: AliceM <sip:alice@client.atlanta.example.com;transport=tcp>",
    "Content-Type: application/sdp",
    f"Content-Length: {len(SDP_OFFER)}",
    "",
    "",
]) + SDP_OFFER

BOUNDARY = "992d915fef419824"

SIGNATURE_TEXT = (
    "ghyHhHUujhJhJh77n8HHGTrfvbnj756tbB9HG4VQpFyF467GhIGfHfYT6\r\n"
    "QpFyF467GhIGfHfYT6jH77n8HHGghyHhHUujhJh756tbB9HGTrfvbnj\r\n"
    "n8HHGTrfvhJhJh776tbB9HG4VQbnj7567GhIGfHfYT6ghyHhHUujpFyF4\r\n"
    "7GhIGfHfYT64VQbnj756\r\n"
)

SMIME_BODY = _crlf([
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

INVITE_SMIME = _crlf([
    "INVITE sip: bob@biloxi.example.com SIP/2.0",
    "Via: SIP/2.0/UDP 160.85.170.139:5060;branch=z9hG4bK4129d28b8904",
    "To: Bob <sip: bob@biloxi.example.com>",
    "From: Alice <sip: alice@atlanta.example.com>;tag=daa21162",
    "Call-ID: 392c3f2b568e92a8eb37d448886eddl1a@160.85.170.139",
    "CSeq: 1 INVITE",
    "Max-Forwards: 70",
    "Contact: <sip:alice@client.atlanta.example.com:5060>",
    f"Content-Type: multipart/signed;boundary={BOUNDARY};micalg=sha1;protocol=application/pkcs7-signature",
    f"Content-Length: {len(SMIME_BODY)}",
    "",
    "",
]) + SMIME_BODY

WHITESPACE_SAMPLE = (
    "INVITE sip:bob@biloxi.example.com SIP/2.0  \t \t\r\n"
    "From: Alice <sip:alice@atlanta.example.com>;tag=9fxced76s1\t \t\r\n"
    "To: Bob <sip:bob@biloxi.example.com>\t \t\t \t  \r\n"
    "Call-ID: 3848276298220188511@atlanta.example.com \t  \r\n"
    "CSeq: 12345 INVITE\r\n"
    "\r\n"
).encode()

CORPUS = {
    "invite_sdp": INVITE_SDP,
    "invite_smime": INVITE_SMIME,
    "whitespace_sample": WHITESPACE_SAMPLE,
}

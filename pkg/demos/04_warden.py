"""
The warden's view
=================

Structural channels (whitespace, letter case, header order) are easy to spot.
Token channels filled with well-mixed bits mostly are not.
"""

import random

from sipsteg import BitString
from sipsteg.analyzer import scan_flow, scan_message
from sipsteg.callflow import default_scenario, flow_capacity, flow_embed
from sipsteg.corpus import WHITESPACE_SAMPLE
from sipsteg.message import parse_message

print(scan_message(parse_message(WHITESPACE_SAMPLE)).to_text())

rng = random.Random(1)
call = default_scenario()
print("canonical call:", scan_flow(call.messages()).to_text())

for channels in ({"case_modulation"}, {"branch", "tag", "call_id"}):
    cap = flow_capacity(call, enabled=channels)
    payload = BitString.from_int(rng.getrandbits(cap - 16), cap - 16)
    report = scan_flow(flow_embed(call, payload, enabled=channels))
    print(sorted(channels), "->", report.per_channel_counts or "clean")

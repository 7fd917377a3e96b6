"""
A covert message across a whole call
====================================

The default call is INVITE, ACK, two in-call OPTIONS and BYE.  A payload is
framed with a 16-bit length and spread over every message and channel.
"""

from sipsteg import BitString
from sipsteg.callflow import build_schedule, default_scenario, flow_capacity, flow_embed, flow_extract
from sipsteg.channels import CHANNEL_IDS
from sipsteg.message import read_flow, write_flow

call = default_scenario()
print("messages:", [t.method for t in call.templates])
print("capacity:", flow_capacity(call), "bits (16 of them are the length prefix)")

# the schedule is what sender and receiver agree on without talking
for index, cid in build_schedule(call, CHANNEL_IDS)[:14]:
    print(index, cid)

secret = BitString.from_bytes(b"meet at the usual place, 9pm")
flow = flow_embed(call, secret)
wire = write_flow(flow)
print(len(wire), "bytes on the wire")

# %% the receiver only sees the messages
got = flow_extract(read_flow(wire))
print(got.to_bytes())

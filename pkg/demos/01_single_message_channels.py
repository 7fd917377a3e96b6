"""
Hiding bits in one INVITE
=========================

Walks each covert channel over the INVITE-with-SDP sample and shows what the
carrier field looks like before and after.
"""

from sipsteg import BitString, channel_capacity, embed, extract, parse_message
from sipsteg.channels import CHANNEL_IDS
from sipsteg.corpus import INVITE_SDP, INVITE_SMIME

invite = parse_message(INVITE_SDP)
signed = parse_message(INVITE_SMIME)

# %% capacities per channel: structured carriers only exist in one of the two samples
for cid in CHANNEL_IDS:
    print(f"{cid:<16} sdp={channel_capacity(cid, invite):>4}  smime={channel_capacity(cid, signed):>4}")

# %% the From tag carries 32 bits as 8 hex characters
msg, used = embed("tag", invite, BitString.from_int(0xDEADBEEF, 32))
print(msg.header("from").value, "<- consumed", used)

# %% a whole secret word spread over the token channels of one message
secret = BitString.from_bytes(b"covert!")
pos = 0
for cid in ("branch", "call_id", "free_text"):
    invite, used = embed(cid, invite, secret[pos:])
    pos += used
print(invite.to_bytes().decode().split("\r\n\r\n")[0])

recovered = extract("branch", invite) + extract("call_id", invite)
print(recovered[: len(secret)].to_bytes())

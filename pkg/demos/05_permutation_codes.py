"""
Bits as header order
====================

Six reorderable headers have 720 orderings, enough for 9 bits.  Orderings are
numbered lexicographically, starting from alphabetical order.
"""

import math

from sipsteg import BitString, embed, parse_message
from sipsteg.bits import lehmer_decode, lehmer_encode, permutation_bits
from sipsteg.corpus import INVITE_SDP

for n in range(2, 8):
    print(n, math.factorial(n), permutation_bits(n))

print(lehmer_encode(5, 3), lehmer_decode((2, 1, 0)))

invite = parse_message(INVITE_SDP)
for value in (0, 1, 511):
    msg, _ = embed("header_reorder", invite, BitString.from_int(value, 9))
    print(value, [h.raw_name for h in msg.headers])

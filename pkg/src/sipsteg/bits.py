"""Bit strings, constrained-alphabet text codecs, payload framing and
permutation ranking.

Every codec here is big-endian: the first bit of a payload becomes the most
significant bit of the first symbol, integer or byte it lands in.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

from .errors import (
    AlphabetTooSmall,
    IndexOutOfRange,
    NotAPermutation,
    PayloadTooLong,
    SymbolNotInAlphabet,
    TruncatedStream,
)

FRAME_PREFIX_BITS = 16


class BitString:
    """Immutable ordered sequence of bits.

    >>> BitString.from_int(5, 4)
    BitString('0101')
    >>> BitString("10") + BitString("1")
    BitString('101')
    """

    __slots__ = ("_bits",)

    def __init__(self, bits: str | Iterable[int] = ""):
        if not isinstance(bits, str):
            bits = "".join("1" if b else "0" for b in bits)
        elif bits.strip("01"):
            raise ValueError(f"bit string may only contain '0' and '1': {bits!r}")
        self._bits = bits

    @classmethod
    def from_int(cls, value: int, width: int) -> BitString:
        if width < 0 or value < 0 or value >> width:
            raise ValueError(f"{value} does not fit in {width} bits")
        return cls(format(value, f"0{width}b") if width else "")

    @classmethod
    def from_bytes(cls, data: bytes) -> BitString:
        return cls("".join(format(b, "08b") for b in data))

    @classmethod
    def zeros(cls, n: int) -> BitString:
        return cls("0" * n)

    def to_int(self) -> int:
        return int(self._bits, 2) if self._bits else 0

    def to_bytes(self) -> bytes:
        """Pack MSB-first, zero-padding the last byte."""
        padded = self.pad(-(-len(self) // 8) * 8)
        return int(padded._bits or "0", 2).to_bytes(len(padded) // 8, "big")

    def pad(self, n: int) -> BitString:
        """Right-pad with zeros to at least ``n`` bits."""
        if len(self._bits) >= n:
            return self
        return BitString(self._bits + "0" * (n - len(self._bits)))

    def read(self, pos: int, n: int) -> BitString:
        """Return bits ``[pos, pos + n)``; reading past the end is an error."""
        if pos < 0 or n < 0 or pos + n > len(self._bits):
            raise IndexError(f"read of {n} bits at {pos} exceeds length {len(self._bits)}")
        return BitString(self._bits[pos:pos + n])

    def __len__(self) -> int:
        return len(self._bits)

    def __iter__(self):
        return (1 if c == "1" else 0 for c in self._bits)

    def __getitem__(self, key):
        if isinstance(key, slice):
            return BitString(self._bits[key])
        return 1 if self._bits[key] == "1" else 0

    def __add__(self, other: BitString) -> BitString:
        return BitString(self._bits + other._bits)

    def __eq__(self, other) -> bool:
        return isinstance(other, BitString) and self._bits == other._bits

    def __hash__(self) -> int:
        return hash(self._bits)

    def __str__(self) -> str:
        return self._bits

    def __repr__(self) -> str:
        return f"BitString({self._bits!r})"

    def startswith(self, other: BitString) -> bool:
        return self._bits.startswith(other._bits)


def concat(parts: Iterable[BitString]) -> BitString:
    return BitString("".join(str(p) for p in parts))


@dataclass(frozen=True)
class Alphabet:
    name: str
    symbols: str

    def __post_init__(self):
        if len(set(self.symbols)) != len(self.symbols):
            raise ValueError(f"alphabet {self.name!r} has repeated symbols")

    @property
    def bits_per_symbol(self) -> int:
        return int(math.log2(len(self.symbols))) if len(self.symbols) >= 2 else 0

    @property
    def usable(self) -> str:
        return self.symbols[: 1 << self.bits_per_symbol]

    def __contains__(self, ch: str) -> bool:
        return ch in self.usable


HEX = Alphabet("hex", "0123456789abcdef")
# Characters legal in a SIP token; index 0 is "A".
TOKEN64 = Alphabet(
    "token64",
    "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789-.",
)
ALPHABETS = {a.name: a for a in (HEX, TOKEN64)}


def encode_text(payload: BitString, alphabet: Alphabet, n_chars: int) -> str:
    """Render the first ``n_chars * bits_per_symbol`` payload bits as text.

    Short payloads are zero-padded on the right.
    """
    if len(alphabet.symbols) < 2:
        raise AlphabetTooSmall(f"alphabet {alphabet.name!r} needs at least 2 symbols")
    width = alphabet.bits_per_symbol
    bits = str(payload.pad(n_chars * width))
    return "".join(
        alphabet.symbols[int(bits[i * width:(i + 1) * width], 2)] for i in range(n_chars)
    )


def decode_text(s: str, alphabet: Alphabet) -> BitString:
    if len(alphabet.symbols) < 2:
        raise AlphabetTooSmall(f"alphabet {alphabet.name!r} needs at least 2 symbols")
    width = alphabet.bits_per_symbol
    usable = alphabet.usable
    out = []
    for ch in s:
        idx = usable.find(ch)
        if idx < 0:
            raise SymbolNotInAlphabet(f"{ch!r} is not in alphabet {alphabet.name!r}")
        out.append(format(idx, f"0{width}b"))
    return BitString("".join(out))


def lehmer_encode(index: int, n: int) -> tuple[int, ...]:
    """Permutation of ``range(n)`` at position ``index`` in lexicographic order."""
    if n < 0 or not 0 <= index < math.factorial(n):
        raise IndexOutOfRange(f"index {index} outside [0, {n}!)")
    pool = list(range(n))
    perm = []
    for i in range(n - 1, -1, -1):
        digit, index = divmod(index, math.factorial(i))
        perm.append(pool.pop(digit))
    return tuple(perm)


def lehmer_decode(perm: Sequence[int]) -> int:
    n = len(perm)
    if sorted(perm) != list(range(n)):
        raise NotAPermutation(f"{list(perm)} is not a permutation of 0..{n - 1}")
    pool = list(range(n))
    index = 0
    for i, p in enumerate(perm):
        digit = pool.index(p)
        pool.pop(digit)
        index += digit * math.factorial(n - 1 - i)
    return index


def permutation_bits(n: int) -> int:
    """Whole bits a permutation of ``n`` items can carry: floor(log2(n!))."""
    return math.factorial(n).bit_length() - 1 if n >= 1 else 0


def frame_payload(payload: BitString) -> BitString:
    if len(payload) >= 1 << FRAME_PREFIX_BITS:
        raise PayloadTooLong(f"{len(payload)} bits; framing allows at most {(1 << FRAME_PREFIX_BITS) - 1}")
    return BitString.from_int(len(payload), FRAME_PREFIX_BITS) + payload


def deframe_payload(stream: BitString) -> BitString:
    if len(stream) < FRAME_PREFIX_BITS:
        raise TruncatedStream(f"stream of {len(stream)} bits has no length prefix")
    n = stream[:FRAME_PREFIX_BITS].to_int()
    if FRAME_PREFIX_BITS + n > len(stream):
        raise TruncatedStream(f"prefix declares {n} bits, only {len(stream) - FRAME_PREFIX_BITS} follow")
    return stream[FRAME_PREFIX_BITS:FRAME_PREFIX_BITS + n]

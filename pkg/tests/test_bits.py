import itertools
import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from sipsteg.bits import (
    HEX,
    TOKEN64,
    Alphabet,
    BitString,
    decode_text,
    deframe_payload,
    encode_text,
    frame_payload,
    lehmer_decode,
    lehmer_encode,
    permutation_bits,
)
from sipsteg.errors import (
    AlphabetTooSmall,
    IndexOutOfRange,
    NotAPermutation,
    PayloadTooLong,
    SymbolNotInAlphabet,
    TruncatedStream,
)

bitstrings = st.text(alphabet="01", max_size=400).map(BitString)


def lexicographic_permutations(n):
    # itertools yields permutations of a sorted input in lexicographic order
    return list(itertools.permutations(range(n)))


class TestBitString:
    def test_from_int_and_back(self):
        assert str(BitString.from_int(0x992D, 16)) == "1001100100101101"
        assert BitString.from_int(0x992D, 16).to_int() == 0x992D

    def test_bytes_msb_first(self):
        assert str(BitString.from_bytes(b"\x80\x01")) == "1000000000000001"
        assert BitString("1").to_bytes() == b"\x80"
        assert BitString().to_bytes() == b""

    def test_concatenation_lengths_add(self):
        assert len(BitString("101") + BitString("11")) == 5

    def test_read_past_end_is_error(self):
        b = BitString("1010")
        assert b.read(1, 3) == BitString("010")
        with pytest.raises(IndexError):
            b.read(2, 3)

    def test_rejects_non_bits(self):
        with pytest.raises(ValueError):
            BitString("012")

    def test_from_int_overflow(self):
        with pytest.raises(ValueError):
            BitString.from_int(16, 4)


class TestTextCodec:
    def test_hex_boundary_prefix(self):
        assert encode_text(BitString.from_int(0x992D, 16), HEX, 4) == "992d"

    def test_zero_padding(self):
        assert encode_text(BitString(), HEX, 2) == "00"

    def test_nibbles(self):
        assert encode_text(BitString("101010111100"), HEX, 3) == "abc"

    def test_decode(self):
        assert decode_text("992d", HEX) == BitString.from_int(0x992D, 16)
        assert decode_text("00", HEX) == BitString.zeros(8)

    def test_decode_illegal_symbol(self):
        with pytest.raises(SymbolNotInAlphabet):
            decode_text("zz", HEX)

    def test_alphabet_too_small(self):
        with pytest.raises(AlphabetTooSmall):
            encode_text(BitString("1"), Alphabet("one", "x"), 3)

    def test_token64_shape(self):
        assert TOKEN64.bits_per_symbol == 6
        assert TOKEN64.symbols[0] == "A"
        assert set(TOKEN64.symbols) <= set("abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ0123456789-.")

    def test_non_power_of_two_alphabet_uses_prefix(self):
        abc = Alphabet("abc", "abc")
        assert abc.bits_per_symbol == 1
        assert encode_text(BitString("01"), abc, 2) == "ab"
        with pytest.raises(SymbolNotInAlphabet):
            decode_text("c", abc)

    @settings(max_examples=10_000, deadline=None)
    @given(bitstrings, st.sampled_from([HEX, TOKEN64]), st.integers(0, 70))
    def test_round_trip(self, payload, alphabet, n_chars):
        text = encode_text(payload, alphabet, n_chars)
        assert len(text) == n_chars
        width = n_chars * alphabet.bits_per_symbol
        assert decode_text(text, alphabet) == payload[:width].pad(width)


class TestLehmer:
    @pytest.mark.parametrize("index,n,perm", [(0, 3, (0, 1, 2)), (4, 3, (2, 0, 1)), (5, 3, (2, 1, 0))])
    def test_encode(self, index, n, perm):
        assert lehmer_encode(index, n) == perm
        assert lexicographic_permutations(n)[index] == perm

    @pytest.mark.parametrize("perm,index", [((0, 1, 2), 0), ((2, 0, 1), 4), ((1, 0), 1)])
    def test_decode(self, perm, index):
        assert lehmer_decode(perm) == index

    @pytest.mark.parametrize("n", range(0, 8))
    def test_against_enumeration(self, n):
        for index, perm in enumerate(lexicographic_permutations(n)):
            assert lehmer_encode(index, n) == perm
            assert lehmer_decode(perm) == index

    def test_errors(self):
        with pytest.raises(IndexOutOfRange):
            lehmer_encode(6, 3)
        with pytest.raises(IndexOutOfRange):
            lehmer_encode(-1, 3)
        with pytest.raises(NotAPermutation):
            lehmer_decode([0, 0, 1])

    @pytest.mark.parametrize("n", range(1, 12))
    def test_permutation_bits(self, n):
        assert permutation_bits(n) == math.floor(math.log2(math.factorial(n)))


class TestFraming:
    def test_empty(self):
        assert frame_payload(BitString()) == BitString.zeros(16)
        assert deframe_payload(BitString.zeros(16)) == BitString()

    def test_byte(self):
        framed = frame_payload(BitString.from_int(0xFF, 8))
        assert framed == BitString.from_int(0x0008, 16) + BitString.from_int(0xFF, 8)
        assert len(framed) == 24

    def test_trailing_junk_ignored(self):
        stream = BitString.from_int(8, 16) + BitString.from_int(0xFF, 8) + BitString("10110")
        assert deframe_payload(stream) == BitString.from_int(0xFF, 8)

    def test_too_long(self):
        with pytest.raises(PayloadTooLong):
            frame_payload(BitString.zeros(1 << 16))

    def test_truncated(self):
        with pytest.raises(TruncatedStream):
            deframe_payload(BitString.from_int(0x10, 16) + BitString.zeros(8))
        with pytest.raises(TruncatedStream):
            deframe_payload(BitString("1"))

    @settings(max_examples=500, deadline=None)
    @given(bitstrings, bitstrings)
    def test_round_trip_with_padding(self, payload, padding):
        assert deframe_payload(frame_payload(payload) + padding) == payload

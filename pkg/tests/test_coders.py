import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pccodec import (ArithmeticDecoder, ArithmeticEncoder, Bitstream,
                     CorruptStream, CumulativeTable, PrecisionOverflow,
                     elias_decode, elias_encode, elias_length)

from conftest import bits_of


def encode_bits(v: int) -> str:
    bs = Bitstream()
    elias_encode(v, bs)
    return bits_of(bs)


class TestBitstream:
    @given(st.lists(st.integers(0, 1), max_size=200))
    @settings(deadline=None)
    def test_roundtrip(self, bits):
        bs = Bitstream()
        for b in bits:
            bs.write_bit(b)
        assert len(bs) == len(bits)
        assert [bs.read_bit() for _ in bits] == bits

    def test_bytes_roundtrip(self):
        bs = Bitstream()
        bs.write_bits(0b1011001, 7)
        data = bs.to_bytes()
        back = Bitstream.from_bytes(data, 7)
        assert bits_of(back) == "1011001"
        assert back.padding_is_zero()

    def test_read_past_end(self):
        bs = Bitstream()
        bs.write_bit(1)
        bs.read_bit()
        with pytest.raises(CorruptStream):
            bs.read_bit()
        assert bs.read_bit_padded() == 0  # decoder-only zero extension

    def test_padding_flag(self):
        back = Bitstream.from_bytes(b"\xA0", 3)
        assert back.padding_is_zero()
        assert not Bitstream.from_bytes(b"\xA1", 3).padding_is_zero()


class TestElias:
    def test_golden_codewords(self):
        assert encode_bits(0) == "1"
        assert encode_bits(1) == "0100"
        assert encode_bits(16) == "001010001"

    @given(st.integers(0, 2 ** 62))
    @settings(deadline=None, max_examples=300)
    def test_roundtrip(self, v):
        bs = Bitstream()
        elias_encode(v, bs)
        assert len(bs) == elias_length(v)
        assert elias_decode(bs) == v
        assert bs.pos == len(bs)

    def test_prefix_free_exhaustive(self):
        words = sorted(encode_bits(v) for v in range(100_000))
        for a, b in zip(words, words[1:]):
            assert not b.startswith(a)

    def test_length_bound(self):
        # realized length within 4 bits of the analytical cost, log grid to 2^31
        vs = [0] + [int(2 ** (k / 2)) for k in range(0, 63)]
        for v in vs:
            lv = math.log2(max(v, 1))
            assert elias_length(v) <= 1 + lv + 2 * math.log2(1 + lv) + 4

    def test_corrupt_prefix(self):
        bs = Bitstream()
        bs.write_bits(0, 8)  # all-zero prefix is not a codeword
        with pytest.raises(CorruptStream):
            elias_decode(bs)


def roundtrip_segments(table, segments):
    """Encode symbol-index segments with one flush each; decode and compare."""
    out = Bitstream()
    enc = ArithmeticEncoder()
    for seg in segments:
        for s in seg:
            enc.encode(*table.interval(s), out)
        enc.flush(out)
    stream = Bitstream.from_bytes(out.to_bytes(), len(out))
    dec = ArithmeticDecoder(stream)
    got = []
    for seg in segments:
        dec.start_segment()
        got.append([dec.decode(table) for _ in seg])
        dec.end_segment()
    assert stream.pos == len(out)
    return out, got


class TestArithmeticCoder:
    def test_zero_information_symbol(self):
        out = Bitstream()
        enc = ArithmeticEncoder()
        table = CumulativeTable([1])
        enc.encode(*table.interval(0), out)
        enc.flush(out)
        assert len(out) <= 2

    def test_empty_flush(self):
        out = Bitstream()
        ArithmeticEncoder().flush(out)
        assert len(out) <= 2

    def test_double_flush(self):
        out = Bitstream()
        enc = ArithmeticEncoder()
        enc.flush(out)
        first = len(out)
        enc.flush(out)
        assert len(out) - first <= 2
        stream = Bitstream.from_bytes(out.to_bytes(), len(out))
        dec = ArithmeticDecoder(stream)
        for _ in range(2):
            dec.start_segment()
            dec.end_segment()
        assert stream.pos == len(out)

    def test_equiprobable_eight(self):
        table = CumulativeTable([1, 1])
        out, got = roundtrip_segments(table, [[0, 1, 1, 0, 1, 0, 0, 1]])
        assert got == [[0, 1, 1, 0, 1, 0, 0, 1]]
        assert len(out) <= 8 + 2

    def test_skewed_run(self):
        table = CumulativeTable([255, 1])
        out, got = roundtrip_segments(table, [[0] * 100])
        assert got == [[0] * 100]
        assert len(out) <= math.ceil(100 * math.log2(256 / 255)) + 2

    def test_segment_bit_bound_and_roundtrip(self):
        rng = np.random.default_rng(11)
        for trial in range(40):
            weights = rng.integers(1, 50, size=rng.integers(1, 9)).tolist()
            table = CumulativeTable(weights)
            segments = [list(rng.integers(0, len(weights), size=rng.integers(0, 60)))
                        for _ in range(rng.integers(1, 5))]
            out, got = roundtrip_segments(table, segments)
            assert got == [list(map(int, s)) for s in segments]
            # per-flush-segment: bits <= ceil(-log2 Q) + 2
            pos = 0
            enc = ArithmeticEncoder()
            for seg in segments:
                tmp = Bitstream()
                for s in seg:
                    enc.encode(*table.interval(s), tmp)
                enc.flush(tmp)
                q = sum(math.log2(weights[s] / table.total) for s in seg)
                assert len(tmp) <= math.ceil(-q) + 2
                pos += len(tmp)
            assert pos == len(out)

    def test_ceil_sum_consistency(self):
        rng = np.random.default_rng(5)
        table = CumulativeTable([3, 2, 5])
        seg = list(rng.integers(0, 3, size=100))
        out = Bitstream()
        enc = ArithmeticEncoder()
        for s in seg:
            enc.encode(*table.interval(s), out)
        enc.flush(out)
        bound = sum(math.ceil(-math.log2(table.interval(s)[1] - table.interval(s)[0])
                              + math.log2(table.total)) for s in seg) + 2
        assert len(out) <= bound

    def test_determinism(self):
        table = CumulativeTable([4, 3, 2, 1])
        seq = [0, 1, 2, 3, 0, 0, 1, 2]
        streams = []
        for _ in range(2):
            out = Bitstream()
            enc = ArithmeticEncoder()
            for s in seq:
                enc.encode(*table.interval(s), out)
            enc.flush(out)
            streams.append((len(out), out.to_bytes()))
        assert streams[0] == streams[1]

    def test_total_overflow_rejected(self):
        out = Bitstream()
        enc = ArithmeticEncoder()
        with pytest.raises(PrecisionOverflow):
            enc.encode(0, 1, (1 << 32) + 1, out)

    def test_truncation_detected(self):
        table = CumulativeTable([1, 1])
        out = Bitstream()
        enc = ArithmeticEncoder()
        for s in [0, 1, 0, 1, 1, 0]:
            enc.encode(*table.interval(s), out)
        enc.flush(out)
        for cut in range(len(out)):
            stream = Bitstream.from_bytes(out.to_bytes(), cut)
            dec = ArithmeticDecoder(stream)
            dec.start_segment()
            try:
                got = [dec.decode(table) for _ in range(6)]
                dec.end_segment()
            except CorruptStream:
                continue  # detected truncation
            assert got != [0, 1, 0, 1, 1, 0]

"""Bit-level primitives: bitstream, exact-integer arithmetic coder, Elias integer code.

The arithmetic coder supports mid-stream flushing: a flush terminates the current
substring with at most 2 bits (plus any deferred straddle bits) and resets the
interval, so independently coded substrings can be spliced at exact bit positions.
The decoder replays the encoder's renormalization schedule, which lets it recover
the exact bit length of each substring (emitted = shifts + 2, consumed = 64 + shifts)
and verify the flush marker bits.
"""

from __future__ import annotations

from .errors import CorruptStream, PrecisionOverflow

PRECISION = 64
FULL = 1 << PRECISION
HALF = FULL >> 1
QUARTER = FULL >> 2
THREE_QUARTERS = HALF + QUARTER
MAX_TOTAL = 1 << 32
FLUSH_SLACK = 2  # bits a flush emits beyond the deferred straddle bits


class Bitstream:
    """Append-only bit buffer (MSB-first within bytes) with an independent read cursor."""

    __slots__ = ("_buf", "_len", "pos")

    def __init__(self) -> None:
        self._buf = bytearray()
        self._len = 0
        self.pos = 0

    def __len__(self) -> int:
        return self._len

    @classmethod
    def from_bytes(cls, data: bytes, bit_length: int) -> "Bitstream":
        if not 0 <= bit_length <= 8 * len(data):
            raise CorruptStream("bit length inconsistent with payload size")
        bs = cls()
        bs._buf = bytearray(data)
        bs._len = bit_length
        return bs

    def to_bytes(self) -> bytes:
        return bytes(self._buf)

    def write_bit(self, bit: int) -> None:
        if self._len & 7 == 0:
            self._buf.append(0)
        if bit:
            self._buf[self._len >> 3] |= 0x80 >> (self._len & 7)
        self._len += 1

    def write_bits(self, value: int, width: int) -> None:
        for shift in range(width - 1, -1, -1):
            self.write_bit((value >> shift) & 1)

    def peek_bit(self, i: int) -> int:
        if not 0 <= i < self._len:
            raise CorruptStream("bit index past end of stream")
        return (self._buf[i >> 3] >> (7 - (i & 7))) & 1

    def read_bit(self) -> int:
        b = self.peek_bit(self.pos)
        self.pos += 1
        return b

    def read_bit_padded(self) -> int:
        # Zero-extends past the end; only the arithmetic decoder may use this,
        # its resync logic repositions the cursor afterwards.
        if self.pos >= self._len:
            self.pos += 1
            return 0
        return self.read_bit()

    def padding_is_zero(self) -> bool:
        """True iff all bits of the final partial byte beyond the length are zero."""
        if self._len & 7:
            tail = self._buf[self._len >> 3] & (0xFF >> (self._len & 7))
            if tail:
                return False
        return 8 * len(self._buf) - self._len < 8


def elias_length(v: int) -> int:
    """Codeword length in bits of the integer code for v >= 0."""
    nb = (v + 1).bit_length() - 1
    return 2 * ((nb + 1).bit_length() - 1) + 1 + nb


def elias_encode(v: int, out: Bitstream) -> None:
    """Prefix-free integer code for v >= 0 (v+1 under the Elias delta construction)."""
    if v < 0:
        raise ValueError("integer code domain is v >= 0")
    w = v + 1
    nb = w.bit_length() - 1          # payload bits after the length header
    lb = (nb + 1).bit_length() - 1   # leading zeros of the header
    out.write_bits(0, lb)
    out.write_bits(nb + 1, lb + 1)
    if nb:
        out.write_bits(w & ((1 << nb) - 1), nb)


def elias_decode(src: Bitstream) -> int:
    z = 0
    while src.read_bit() == 0:
        z += 1
        if z > 6:
            raise CorruptStream("invalid integer-code prefix")
    header = 1
    for _ in range(z):
        header = (header << 1) | src.read_bit()
    nb = header - 1
    if nb > 62:
        raise CorruptStream("integer code out of range")
    w = 1
    for _ in range(nb):
        w = (w << 1) | src.read_bit()
    return w - 1


class CumulativeTable:
    """Static interval partition over a weight vector; the simplest coder model."""

    __slots__ = ("_cum", "total")

    def __init__(self, weights) -> None:
        self._cum = [0]
        for w in weights:
            if w <= 0:
                raise ValueError("weights must be positive")
            self._cum.append(self._cum[-1] + w)
        self.total = self._cum[-1]

    def interval(self, k: int):
        return self._cum[k], self._cum[k + 1], self.total

    def locate(self, scaled: int):
        lo, hi = 0, len(self._cum) - 1
        while hi - lo > 1:
            mid = (lo + hi) >> 1
            if self._cum[mid] <= scaled:
                lo = mid
            else:
                hi = mid
        return lo, self._cum[lo], self._cum[lo + 1]


class ArithmeticEncoder:
    """Exact-integer arithmetic encoder on 64-bit interval registers.

    After every renormalization the interval width exceeds 2**62, so any symbol
    total up to 2**32 yields non-empty subintervals. ``flush`` terminates the
    current substring (<= 2 bits + pending) and restarts on a fresh interval.
    """

    __slots__ = ("low", "high", "pending")

    def __init__(self) -> None:
        self.low = 0
        self.high = FULL - 1
        self.pending = 0

    def encode(self, cum_lo: int, cum_hi: int, total: int, out: Bitstream) -> None:
        if total > MAX_TOTAL:
            raise PrecisionOverflow(f"total {total} exceeds 2**32")
        if not 0 <= cum_lo < cum_hi <= total:
            raise ValueError("inconsistent symbol interval")
        width = self.high - self.low + 1
        self.high = self.low + width * cum_hi // total - 1
        self.low = self.low + width * cum_lo // total
        self._renormalize(out)

    def _renormalize(self, out: Bitstream) -> None:
        low, high = self.low, self.high
        while True:
            if high < HALF:
                self._emit(0, out)
            elif low >= HALF:
                self._emit(1, out)
                low -= HALF
                high -= HALF
            elif low >= QUARTER and high < THREE_QUARTERS:
                self.pending += 1
                low -= QUARTER
                high -= QUARTER
            else:
                break
            low <<= 1
            high = (high << 1) | 1
        self.low, self.high = low, high

    def _emit(self, bit: int, out: Bitstream) -> None:
        out.write_bit(bit)
        inv = bit ^ 1
        for _ in range(self.pending):
            out.write_bit(inv)
        self.pending = 0

    def flush(self, out: Bitstream) -> None:
        """Terminate the current substring so any continuation decodes it, then reset."""
        self.pending += 1
        self._emit(0 if self.low < QUARTER else 1, out)
        self.low = 0
        self.high = FULL - 1


class ArithmeticDecoder:
    """Mirror of :class:`ArithmeticEncoder`, segment-aware for mid-stream flushes."""

    __slots__ = ("stream", "low", "high", "value", "pending", "shifts", "seg_start")

    def __init__(self, stream: Bitstream) -> None:
        self.stream = stream
        self.seg_start = -1

    def start_segment(self) -> None:
        st = self.stream
        self.seg_start = st.pos
        self.low = 0
        self.high = FULL - 1
        self.pending = 0
        self.shifts = 0
        v = 0
        for _ in range(PRECISION):
            v = (v << 1) | st.read_bit_padded()
        self.value = v

    def decode(self, model) -> int:
        """Decode one symbol; ``model`` provides .total and .locate(scaled)."""
        # A substring cannot claim more bits than remain in the real stream.
        if self.shifts > len(self.stream) - self.seg_start:
            raise CorruptStream("substring overruns the stream")
        total = model.total
        if total > MAX_TOTAL:
            raise PrecisionOverflow(f"total {total} exceeds 2**32")
        width = self.high - self.low + 1
        scaled = ((self.value - self.low + 1) * total - 1) // width
        k, cum_lo, cum_hi = model.locate(scaled)
        self.high = self.low + width * cum_hi // total - 1
        self.low = self.low + width * cum_lo // total
        if not self.low <= self.value <= self.high:
            raise CorruptStream("arithmetic desynchronization")
        low, high, value = self.low, self.high, self.value
        st = self.stream
        shifts = 0
        while True:
            if high < HALF:
                self.pending = 0
            elif low >= HALF:
                self.pending = 0
                low -= HALF
                high -= HALF
                value -= HALF
            elif low >= QUARTER and high < THREE_QUARTERS:
                self.pending += 1
                low -= QUARTER
                high -= QUARTER
                value -= QUARTER
            else:
                break
            low <<= 1
            high = (high << 1) | 1
            value = (value << 1) | st.read_bit_padded()
            shifts += 1
        self.low, self.high, self.value = low, high, value
        self.shifts += shifts
        return k

    def end_segment(self) -> None:
        """Validate the flush marker and position the cursor at the substring end."""
        st = self.stream
        end = self.seg_start + self.shifts + FLUSH_SLACK
        if end > len(st):
            raise CorruptStream("truncated substring")
        first = 0 if self.low < QUARTER else 1
        flush_start = self.seg_start + self.shifts - self.pending
        if st.peek_bit(flush_start) != first:
            raise CorruptStream("flush marker mismatch")
        for i in range(flush_start + 1, end):
            if st.peek_bit(i) == first:
                raise CorruptStream("flush marker mismatch")
        st.pos = end

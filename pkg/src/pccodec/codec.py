"""Pattern-censoring codec.

First occurrences of symbols are censored: the mixture coder sees the escape
symbol 0 and the symbol identity goes out through a prefix-free integer code;
repeat occurrences are coded as their dictionary rank under an add-one-half
(Krichevsky-Trofimov) mixture over the growing alphabet {0..K}. Every escape
flushes the arithmetic coder so the integer codeword can be spliced at an
exact bit position; a final escape with integer payload 0 terminates the
stream.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .coders import (ArithmeticDecoder, ArithmeticEncoder, Bitstream,
                     elias_decode, elias_encode, elias_length)
from .errors import (CorruptStream, InvalidSymbol, LengthLimitExceeded,
                     RankOutOfRange)

MAGIC = b"PCC1"
VERSION = 1
MAX_SYMBOL = 1 << 62
MAX_LENGTH = 1 << 31
_HEADER_LEN = 13


class _Fenwick:
    """Growable 1-indexed Fenwick tree over positive integer weights."""

    __slots__ = ("n", "tree")

    def __init__(self) -> None:
        self.n = 0
        self.tree = [0]

    def append(self, w: int) -> None:
        self.n += 1
        i = self.n
        s = w
        k = i - 1
        stop = i - (i & -i)
        while k > stop:
            s += self.tree[k]
            k -= k & -k
        self.tree.append(s)

    def add(self, i: int, delta: int) -> None:
        n = self.n
        while i <= n:
            self.tree[i] += delta
            i += i & -i

    def prefix(self, i: int) -> int:
        s = 0
        tree = self.tree
        while i > 0:
            s += tree[i]
            i -= i & -i
        return s

    def search(self, value: int):
        """(count, cum) with count = #elements whose cumulative sum is <= value."""
        idx = 0
        rem = value
        bit = 1 << (self.n.bit_length())
        tree = self.tree
        n = self.n
        while bit:
            nxt = idx + bit
            if nxt <= n and tree[nxt] <= rem:
                idx = nxt
                rem -= tree[nxt]
            bit >>= 1
        return idx, value - rem


class Dictionary:
    """Symbol <-> rank-of-insertion map; rank 0 is permanently the escape."""

    __slots__ = ("by_symbol", "by_rank")

    def __init__(self) -> None:
        self.by_symbol: dict[int, int] = {}
        self.by_rank: list[int] = [0]

    @property
    def K(self) -> int:
        return len(self.by_rank) - 1

    def rank_of(self, symbol: int):
        return self.by_symbol.get(symbol)

    def symbol_of(self, rank: int) -> int:
        if not 0 <= rank < len(self.by_rank):
            raise RankOutOfRange(f"rank {rank} not in 0..{self.K}")
        return self.by_rank[rank]

    def insert(self, symbol: int) -> int:
        rank = len(self.by_rank)
        self.by_symbol[symbol] = rank
        self.by_rank.append(symbol)
        return rank

    def items(self):
        return list(enumerate(self.by_rank))


class KTState:
    """Add-one-half mixture counts over ranks 0..K of the censored sequence.

    Rank k carries integer weight 2*n~_k + 1; the predictive mass of rank k is
    weight_k / (2i + K + 1), an exact rational. Doubles as the coder model:
    ``interval``/``locate`` expose the partition of [0, total).
    """

    __slots__ = ("i", "K", "_weights", "_fw")

    def __init__(self) -> None:
        self.i = 0
        self.K = 0
        self._weights = [1]
        self._fw = _Fenwick()
        self._fw.append(1)

    @property
    def total(self) -> int:
        return 2 * self.i + self.K + 1

    def n_tilde(self, k: int) -> int:
        return (self._weights[k] - 1) // 2

    def interval(self, k: int):
        if not 0 <= k <= self.K:
            raise RankOutOfRange(f"rank {k} not in 0..{self.K}")
        lo = self._fw.prefix(k)
        return lo, lo + self._weights[k], self.total

    def locate(self, scaled: int):
        k, lo = self._fw.search(scaled)
        if k > self.K:
            raise CorruptStream("code value outside the mixture alphabet")
        return k, lo, lo + self._weights[k]

    def advance(self, k: int) -> None:
        """Account one censored-sequence occurrence of rank k."""
        self._weights[k] += 2
        self._fw.add(k + 1, 2)
        self.i += 1

    def insert_rank(self) -> None:
        """New dictionary entry: rank K+1 starts with zero occurrences."""
        self.K += 1
        self._weights.append(1)
        self._fw.append(1)

    def verify(self) -> None:
        """Integer identity sum_k (2*n~_k + 1) = 2i + K + 1, in rational form."""
        s = sum(self._weights)
        if s != self.total:
            raise AssertionError(f"mixture weights sum {s} != {self.total}")
        if sum(Fraction(w, self.total) for w in self._weights) != 1:
            raise AssertionError("predictive masses do not sum to 1")


def kt_predictive(state: KTState, k: int):
    """Exact predictive probability of rank k as (numerator, denominator)."""
    if not 0 <= k <= state.K:
        raise RankOutOfRange(f"rank {k} not in 0..{state.K}")
    return state._weights[k], state.total


def _as_symbol_array(seq) -> np.ndarray:
    try:
        arr = (np.asarray(seq, dtype=np.int64) if not isinstance(seq, np.ndarray)
               else seq.astype(np.int64, copy=False))
    except (OverflowError, ValueError, TypeError) as exc:
        raise InvalidSymbol(f"symbols must be integers in [1, 2**62]: {exc}") from exc
    if arr.ndim != 1:
        arr = arr.reshape(-1)
    if arr.size > MAX_LENGTH:
        raise LengthLimitExceeded(f"{arr.size} symbols exceeds the 2**31 cap")
    if arr.size and (int(arr.min()) < 1 or int(arr.max()) > MAX_SYMBOL):
        raise InvalidSymbol("symbols must be integers in [1, 2**62]")
    return arr


def censor(seq):
    """Split a message into its censored sequence, redacted symbols, and dictionary.

    The censored sequence replaces each first occurrence with 0 and each repeat
    with the rank of insertion of its symbol; the redacted subsequence lists the
    first occurrences in order.
    """
    arr = _as_symbol_array(seq)
    d = Dictionary()
    censored = np.empty(arr.size, dtype=np.int64)
    redacted = []
    by_symbol = d.by_symbol
    for idx in range(arr.size):
        x = int(arr[idx])
        k = by_symbol.get(x)
        if k is None:
            censored[idx] = 0
            redacted.append(x)
            d.insert(x)
        else:
            censored[idx] = k
    return censored, np.array(redacted, dtype=np.int64), d


@dataclass(frozen=True)
class PcContainer:
    """On-disk format: magic 'PCC1' | version 0x01 | bit length (8B big-endian) | payload."""

    bit_length: int
    payload: bytes

    def to_bytes(self) -> bytes:
        return MAGIC + bytes([VERSION]) + self.bit_length.to_bytes(8, "big") + self.payload

    @classmethod
    def from_bytes(cls, blob: bytes) -> "PcContainer":
        if len(blob) < _HEADER_LEN or blob[:4] != MAGIC:
            raise CorruptStream("bad magic")
        if blob[4] != VERSION:
            raise CorruptStream(f"unsupported version {blob[4]}")
        bit_length = int.from_bytes(blob[5:13], "big")
        payload = blob[13:]
        if not bit_length <= 8 * len(payload) < bit_length + 8:
            raise CorruptStream("bit length inconsistent with payload size")
        stream = Bitstream.from_bytes(payload, bit_length)
        if not stream.padding_is_zero():
            raise CorruptStream("nonzero padding after the payload bits")
        return cls(bit_length, payload)

    def write(self, path) -> None:
        with open(path, "wb") as fh:
            fh.write(self.to_bytes())

    @classmethod
    def read(cls, path) -> "PcContainer":
        with open(path, "rb") as fh:
            return cls.from_bytes(fh.read())


def _encode_reference(arr: np.ndarray, model_check: bool) -> Bitstream:
    out = Bitstream()
    enc = ArithmeticEncoder()
    kt = KTState()
    ranks: dict[int, int] = {}
    n = arr.size
    for idx in range(n + 1):
        x = int(arr[idx]) if idx < n else 0
        k = ranks.get(x)
        if k is not None:
            lo, hi, total = kt.interval(k)
            enc.encode(lo, hi, total, out)
            kt.advance(k)
        else:
            lo, hi, total = kt.interval(0)
            enc.encode(lo, hi, total, out)
            enc.flush(out)
            elias_encode(x, out)
            kt.advance(0)
            if x != 0:
                kt.insert_rank()
                ranks[x] = kt.K
        if model_check:
            kt.verify()
    return out


def encode(seq, use_fast: bool = True, model_check: bool = False) -> PcContainer:
    """Compress a sequence of positive integers into a container."""
    arr = _as_symbol_array(seq)
    if use_fast and not model_check and arr.size <= ((1 << 32) - 2) // 3:
        from . import _fast
        if _fast.available():
            try:
                buf, nbits, _ = _fast.encode_kernel(arr)
                return PcContainer(int(nbits), bytes(buf))
            except Exception:
                pass  # kernel unavailable; reference path below
    out = _encode_reference(arr, model_check)
    return PcContainer(len(out), out.to_bytes())


def decode(container: PcContainer) -> np.ndarray:
    """Reconstruct the exact message; raises CorruptStream on any inconsistency."""
    stream = Bitstream.from_bytes(container.payload, container.bit_length)
    if not container.bit_length <= 8 * len(container.payload) < container.bit_length + 8:
        raise CorruptStream("bit length inconsistent with payload size")
    if not stream.padding_is_zero():
        raise CorruptStream("nonzero padding after the payload bits")
    dec = ArithmeticDecoder(stream)
    kt = KTState()
    d = Dictionary()
    out: list[int] = []
    dec.start_segment()
    while True:
        k = dec.decode(kt)
        if k != 0:
            out.append(d.symbol_of(k))
            kt.advance(k)
            continue
        dec.end_segment()
        v = elias_decode(stream)
        kt.advance(0)
        if v == 0:
            break
        if v > MAX_SYMBOL:
            raise CorruptStream("decoded symbol out of range")
        if v in d.by_symbol:
            raise CorruptStream("repeated dictionary insertion")
        d.insert(v)
        kt.insert_rank()
        out.append(v)
        dec.start_segment()
    if stream.pos != container.bit_length:
        raise CorruptStream("trailing garbage beyond the coded stream")
    return np.array(out, dtype=np.int64)


@dataclass(frozen=True)
class IdealCodeLength:
    """Flush-free information content of a message under the codec's model."""

    mixture_bits: float
    elias_bits: float
    distinct: int

    @property
    def total(self) -> float:
        return self.mixture_bits + self.elias_bits


def ideal_codelength(seq, use_fast: bool = True) -> IdealCodeLength:
    """Sum of -log2 predictive masses along the censored sequence (terminal
    escape included) plus the realized integer-code lengths."""
    arr = _as_symbol_array(seq)
    if use_fast:
        from . import _fast
        if _fast.available():
            try:
                mix, eb, kn = _fast.ideal_kernel(arr)
                return IdealCodeLength(float(mix), float(eb), int(kn))
            except Exception:
                pass
    ranks: dict[int, int] = {}
    weights = [1]
    total = 1
    K = 0
    mixture = 0.0
    elias_bits = 0
    n = arr.size
    for idx in range(n + 1):
        x = int(arr[idx]) if idx < n else 0
        k = ranks.get(x)
        if k is not None:
            mixture += math.log2(total) - math.log2(weights[k])
            weights[k] += 2
            total += 2
        else:
            mixture += math.log2(total) - math.log2(weights[0])
            weights[0] += 2
            total += 2
            elias_bits += elias_length(x)
            if x != 0:
                K += 1
                ranks[x] = K
                weights.append(1)
                total += 1
    return IdealCodeLength(mixture, float(elias_bits), K)

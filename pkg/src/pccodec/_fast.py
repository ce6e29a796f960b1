"""Optional numba kernels for the hot encode paths.

Bit-identical to the pure-Python reference in codec.py (verified by tests).
The 64-bit interval registers need a 96-bit multiply-divide, emulated with
32-bit limbs since numba has no int128. The bit buffer is preallocated at a
hard worst-case bound (a symbol step never exceeds ~200 emitted bits), so the
inlined bit writer never reallocates; an overflow guard raises and the caller
falls back to the reference path.
"""

from __future__ import annotations

import numpy as np

try:
    from numba import njit, types
    from numba.typed import Dict

    HAVE_NUMBA = True
except Exception:  # pragma: no cover - numba is a declared dependency
    HAVE_NUMBA = False

_BROKEN = False


def available() -> bool:
    return HAVE_NUMBA and not _BROKEN


def disable() -> None:
    global _BROKEN
    _BROKEN = True


if HAVE_NUMBA:
    U0 = np.uint64(0)
    U1 = np.uint64(1)
    S32 = np.uint64(32)
    M32 = np.uint64(0xFFFFFFFF)
    UMAX = np.uint64(0xFFFFFFFFFFFFFFFF)
    HALF = np.uint64(0x8000000000000000)
    QUARTER = np.uint64(0x4000000000000000)
    THREEQ = np.uint64(0xC000000000000000)

    @njit(inline="always")
    def _muldiv(width_m1, cum, total):
        # ((width_m1 + 1) * cum) // total with 0 < cum < total <= 2**32;
        # the quotient fits in 64 bits, so the top limb is < total.
        w_lo = width_m1 & M32
        w_hi = width_m1 >> S32
        a = w_lo * cum
        b = w_hi * cum
        a2 = a + cum
        carry = U1 if a2 < a else U0
        limb1full = (b & M32) + (a2 >> S32) + (carry << S32)
        limb2 = (b >> S32) + (limb1full >> S32)
        limb1 = limb1full & M32
        limb0 = a2 & M32
        r = limb2 % total
        cur = (r << S32) | limb1
        q1 = cur // total
        r = cur % total
        cur = (r << S32) | limb0
        q0 = cur // total
        return (q1 << S32) | q0

    @njit(inline="always")
    def _wbit(buf, nbits, bit):
        if bit:
            buf[nbits >> 3] |= np.uint8(128 >> (nbits & 7))
        return nbits + 1

    @njit(inline="always")
    def _fw_add(tree, n, i, delta):
        while i <= n:
            tree[i] += delta
            i += i & (-i)

    @njit(inline="always")
    def _fw_prefix(tree, i):
        s = 0
        while i > 0:
            s += tree[i]
            i -= i & (-i)
        return s

    @njit(inline="always")
    def _fw_append(tree, n, w):
        i = n + 1
        s = w
        k = i - 1
        stop = i - (i & (-i))
        while k > stop:
            s += tree[k]
            k -= k & (-k)
        tree[i] = s

    @njit(inline="always")
    def _arith_encode(buf, nbits, low, high, pending, lo, hi, total):
        width_m1 = high - low
        utot = np.uint64(total)
        if hi == total:
            new_high = high
        else:
            new_high = low + _muldiv(width_m1, np.uint64(hi), utot) - U1
        if lo == 0:
            new_low = low
        else:
            new_low = low + _muldiv(width_m1, np.uint64(lo), utot)
        low = new_low
        high = new_high
        while True:
            if high < HALF:
                nbits = _wbit(buf, nbits, 0)
                for _ in range(pending):
                    nbits = _wbit(buf, nbits, 1)
                pending = 0
            elif low >= HALF:
                nbits = _wbit(buf, nbits, 1)
                for _ in range(pending):
                    nbits = _wbit(buf, nbits, 0)
                pending = 0
                low -= HALF
                high -= HALF
            elif low >= QUARTER and high < THREEQ:
                pending += 1
                low -= QUARTER
                high -= QUARTER
            else:
                break
            low = low << U1
            high = (high << U1) | U1
        return nbits, low, high, pending

    @njit(inline="always")
    def _flush(buf, nbits, low, pending):
        pending += 1
        bit = 0 if low < QUARTER else 1
        nbits = _wbit(buf, nbits, bit)
        inv = 1 - bit
        for _ in range(pending):
            nbits = _wbit(buf, nbits, inv)
        return nbits

    @njit(inline="always")
    def _elias(buf, nbits, v):
        w = v + 1
        nb = -1
        t = w
        while t:
            nb += 1
            t >>= 1
        length = nb + 1
        lb = -1
        t = length
        while t:
            lb += 1
            t >>= 1
        for _ in range(lb):
            nbits = _wbit(buf, nbits, 0)
        for shift in range(lb, -1, -1):
            nbits = _wbit(buf, nbits, (length >> shift) & 1)
        for shift in range(nb - 1, -1, -1):
            nbits = _wbit(buf, nbits, (w >> shift) & 1)
        return nbits

    @njit(cache=True)
    def _encode_impl(syms):
        n = syms.shape[0]
        # hard ceiling: <= ~200 emitted bits per input symbol (mixture step,
        # flush backlog amortization, 75-bit integer code), plus slack
        buf = np.zeros(32 * (n + 1) + 4096, dtype=np.uint8)
        cap_bits = buf.shape[0] * 8 - 64
        nbits = 0
        low = U0
        high = UMAX
        pending = 0
        cap = 128
        tree = np.zeros(cap + 1, dtype=np.int64)
        weights = np.zeros(cap, dtype=np.int64)
        weights[0] = 1
        tree[1] = 1
        nrank = 1
        total = 1
        K = 0
        ranks = Dict.empty(types.int64, types.int64)
        ext = np.zeros(n + 1, dtype=np.int64)
        ext[:n] = syms
        for idx in range(n + 1):
            x = ext[idx]
            if x in ranks:
                k = ranks[x]
                lo = _fw_prefix(tree, k)
                hi = lo + weights[k]
                nbits, low, high, pending = _arith_encode(
                    buf, nbits, low, high, pending, lo, hi, total)
                weights[k] += 2
                _fw_add(tree, nrank, k + 1, 2)
                total += 2
            else:
                nbits, low, high, pending = _arith_encode(
                    buf, nbits, low, high, pending, 0, weights[0], total)
                nbits = _flush(buf, nbits, low, pending)
                low = U0
                high = UMAX
                pending = 0
                nbits = _elias(buf, nbits, x)
                weights[0] += 2
                _fw_add(tree, nrank, 1, 2)
                total += 2
                if x != 0:
                    K += 1
                    ranks[x] = K
                    if nrank >= cap - 1:
                        ncap = cap * 2
                        ntree = np.zeros(ncap + 1, dtype=np.int64)
                        ntree[1: cap + 1] = tree[1:]
                        nweights = np.zeros(ncap, dtype=np.int64)
                        nweights[:cap] = weights
                        tree = ntree
                        weights = nweights
                        cap = ncap
                    _fw_append(tree, nrank, 1)
                    weights[nrank] = 1
                    nrank += 1
                    total += 1
            if nbits >= cap_bits:
                raise RuntimeError("bit buffer overflow")
        nbytes = (nbits + 7) // 8
        return buf[:nbytes], nbits, K

    @njit(cache=True)
    def _ideal_impl(syms):
        n = syms.shape[0]
        cap = 128
        weights = np.zeros(cap, dtype=np.int64)
        weights[0] = 1
        nrank = 1
        total = 1
        K = 0
        ranks = Dict.empty(types.int64, types.int64)
        mixture = 0.0
        elias_bits = 0
        ext = np.zeros(n + 1, dtype=np.int64)
        ext[:n] = syms
        for idx in range(n + 1):
            x = ext[idx]
            if x in ranks:
                k = ranks[x]
                mixture += np.log2(float(total)) - np.log2(float(weights[k]))
                weights[k] += 2
                total += 2
            else:
                mixture += np.log2(float(total)) - np.log2(float(weights[0]))
                weights[0] += 2
                total += 2
                w = x + 1
                nb = -1
                t = w
                while t:
                    nb += 1
                    t >>= 1
                length = nb + 1
                lb = -1
                t = length
                while t:
                    lb += 1
                    t >>= 1
                elias_bits += 2 * lb + 1 + nb
                if x != 0:
                    K += 1
                    ranks[x] = K
                    if nrank >= cap:
                        ncap = cap * 2
                        nweights = np.zeros(ncap, dtype=np.int64)
                        nweights[:cap] = weights
                        weights = nweights
                        cap = ncap
                    weights[nrank] = 1
                    nrank += 1
                    total += 1
        return mixture, float(elias_bits), K


def encode_kernel(arr: np.ndarray):
    try:
        return _encode_impl(arr)
    except Exception:
        disable()
        raise


def ideal_kernel(arr: np.ndarray):
    try:
        return _ideal_impl(arr)
    except Exception:
        disable()
        raise

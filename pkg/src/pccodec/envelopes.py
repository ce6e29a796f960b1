"""Envelope functions, envelope distributions, and source laws on positive integers.

An envelope is a non-increasing function f: {1,2,...} -> (0,1] with total mass
strictly between 1 and infinity. It dominates a class of probability laws
(p_j <= f(j) for all j) and induces a canonical "envelope distribution": place
F(k) = 1 - sum_{j>k} f(j) once the tail mass drops to 1, zero before.

Laws are represented as a materialized prefix of atoms plus an analytic tail
(closed forms or Hurwitz zeta), so counting/mass/occupancy queries and exact
inverse-CDF sampling work without truncating infinite supports.
"""

from __future__ import annotations

import math
import threading

import numpy as np
from scipy.integrate import quad
from scipy.special import gammaincc, gamma as gamma_fn, zeta

from .errors import DomainError, InvalidEnvelope

MASS_TOL = 2.0 ** -40       # conservation budget for lazy-tail accounting
_ATOM_FLOOR = 2.0 ** -52    # materialization floor for summed families
_MAX_DENSE_TABLE = 1 << 22  # sampling table cap; rarer draws fall back to search


# ---------------------------------------------------------------------------
# envelope families
# ---------------------------------------------------------------------------

class Envelope:
    """Base class for envelope families; also serves as the analytic tail of a law.

    Subclasses implement a non-increasing ``value`` along with closed-form (or
    certified numeric) tail sums. ``support_end`` is None for infinite support.
    """

    support_end: int | None = None

    def value(self, j: int) -> float:
        raise NotImplementedError

    def values(self, js: np.ndarray) -> np.ndarray:
        return np.array([self.value(int(j)) for j in js], dtype=float)

    def tail_mass(self, k: int) -> float:
        """sum_{j>k} f(j)."""
        raise NotImplementedError

    def tail_mass_vec(self, ks: np.ndarray) -> np.ndarray:
        return np.array([self.tail_mass(int(k)) for k in ks], dtype=float)

    def tail_power_sum(self, power: int, k: int) -> float:
        """sum_{j>k} f(j)**power."""
        raise NotImplementedError

    def continuous(self, x: float) -> float:
        """Monotone continuous extension of f, valid beyond the head region."""
        raise NotImplementedError

    def log2_continuous(self, x):
        """log2 of the continuous extension; accepts scalars or arrays."""
        return np.log2(self.continuous(x))

    def tail_weighted_sum(self, k: int, weight) -> float:
        """sum_{j>k} f(j)*weight(j) for smooth, slowly varying ``weight``.

        Midpoint integral of the continuous extension plus the first
        Euler-Maclaurin correction; callers pick k large enough that the
        remainder they tolerate exceeds f(k+1)*weight(k+1).
        """
        g = lambda x: self.continuous(x) * weight(x)
        est, _ = quad(g, k + 0.5, np.inf, limit=200)
        h = 1e-3 * (k + 1)
        gprime = (g(k + 0.5 + h) - g(k + 0.5 - h)) / (2 * h)
        return est - gprime / 24.0

    def total_mass(self) -> float:
        return self.tail_mass(0)

    def spec_string(self) -> str:
        raise NotImplementedError

    def __repr__(self) -> str:
        return f"{type(self).__name__}({self.spec_string()!r})"


class GeometricEnvelope(Envelope):
    """f(j) = C * q**j with 0 < q < 1."""

    def __init__(self, C: float, q: float, _validate: bool = True) -> None:
        self.C = float(C)
        self.q = float(q)
        if not (0.0 < self.q < 1.0) or self.C <= 0.0:
            raise InvalidEnvelope("geometric requires C > 0 and q in (0,1)")
        self._lnq = math.log(self.q)
        self._lnC = math.log(self.C)
        if _validate:
            if self.C * self.q > 1.0 + 1e-12:
                raise InvalidEnvelope("f(1) = C*q exceeds 1")
            if self.total_mass() <= 1.0:
                raise InvalidEnvelope(f"total mass {self.total_mass():g} <= 1")

    def value(self, j: int) -> float:
        # direct power keeps dyadic cases exact (q=1/2 gives exact atoms)
        return self.C * self.q ** j

    def values(self, js: np.ndarray) -> np.ndarray:
        with np.errstate(under="ignore"):
            return self.C * np.power(self.q, np.asarray(js, dtype=float))

    def tail_mass(self, k: int) -> float:
        return self.C * self.q ** (k + 1) / (1.0 - self.q)

    def tail_mass_vec(self, ks: np.ndarray) -> np.ndarray:
        with np.errstate(under="ignore"):
            return self.C * np.power(self.q, np.asarray(ks, dtype=float) + 1.0) / (1.0 - self.q)

    def tail_power_sum(self, power: int, k: int) -> float:
        # (C q^{k+1})^p / (1 - q^p), computed in logs to dodge over/underflow
        lead = power * (self._lnC + (k + 1) * self._lnq)
        if lead < -745.0:
            return 0.0
        return math.exp(lead) / (1.0 - math.exp(power * self._lnq))

    def continuous(self, x: float) -> float:
        return math.exp(self._lnC + x * self._lnq)

    def log2_continuous(self, x):
        return (self._lnC + np.asarray(x, dtype=float) * self._lnq) / math.log(2.0)

    def spec_string(self) -> str:
        return f"geom:C={self.C:g},q={self.q:g}"


class PowerLawEnvelope(Envelope):
    """f(j) = min(1, C * j**(-1/alpha)) with alpha in (0,1)."""

    def __init__(self, C: float, alpha: float) -> None:
        self.C = float(C)
        self.alpha = float(alpha)
        if not (0.0 < self.alpha < 1.0) or self.C <= 0.0:
            raise InvalidEnvelope("power law requires C > 0 and alpha in (0,1)")
        self.s = 1.0 / self.alpha
        # first index where the raw power term is <= 1
        j0 = max(1, math.ceil(self.C ** self.alpha - 1e-12))
        while self.C * j0 ** (-self.s) > 1.0:
            j0 += 1
        while j0 > 1 and self.C * (j0 - 1) ** (-self.s) <= 1.0:
            j0 -= 1
        self.j0 = j0
        if self.total_mass() <= 1.0:
            raise InvalidEnvelope(f"total mass {self.total_mass():g} <= 1")

    def value(self, j: int) -> float:
        if j < self.j0:
            return 1.0
        return self.C * j ** (-self.s)

    def values(self, js: np.ndarray) -> np.ndarray:
        js = np.asarray(js, dtype=float)
        return np.where(js < self.j0, 1.0, self.C * js ** (-self.s))

    def tail_mass(self, k: int) -> float:
        if k + 1 < self.j0:
            return (self.j0 - 1 - k) + self.C * float(zeta(self.s, self.j0))
        return self.C * float(zeta(self.s, k + 1))

    def tail_mass_vec(self, ks: np.ndarray) -> np.ndarray:
        ks = np.asarray(ks, dtype=float)
        head = np.maximum(self.j0 - 1 - ks, 0.0)
        return head + self.C * zeta(self.s, np.maximum(ks + 1, self.j0))

    def tail_power_sum(self, power: int, k: int) -> float:
        start = max(k + 1, self.j0)
        head = max(self.j0 - 1 - k, 0)  # atoms equal to 1 contribute 1**power
        s = power * self.s
        if s > 1400.0:  # underflows double precision for any start >= 2
            z = 0.0 if start >= 2 else 1.0
        else:
            z = float(zeta(s, start))
        if z <= 0.0:
            return float(head)
        return head + math.exp(power * math.log(self.C) + math.log(z))

    def continuous(self, x: float) -> float:
        return self.C * x ** (-self.s)

    def log2_continuous(self, x):
        return (math.log(self.C) - self.s * np.log(np.asarray(x, dtype=float))) / math.log(2.0)

    def spec_string(self) -> str:
        return f"power:C={self.C:g},alpha={self.alpha:g}"


class StretchedExpEnvelope(Envelope):
    """f(j) = C * exp(-Cp * j**beta) with C, Cp, beta > 0."""

    _JMAX_CAP = 2_000_000

    def __init__(self, C: float, Cprime: float, beta: float) -> None:
        self.C = float(C)
        self.Cp = float(Cprime)
        self.beta = float(beta)
        if self.C <= 0.0 or self.Cp <= 0.0 or self.beta <= 0.0:
            raise InvalidEnvelope("stretched-exponential parameters must be positive")
        if self.value(1) > 1.0 + 1e-12:
            raise InvalidEnvelope("f(1) = C*exp(-Cp) exceeds 1")
        # materialization horizon: beyond it, atoms are below the float floor
        arg = (52.0 * math.log(2.0) + max(math.log(self.C), 0.0)) / self.Cp
        jmax = int(math.ceil(arg ** (1.0 / self.beta))) + 4
        if jmax > self._JMAX_CAP:
            raise InvalidEnvelope("unsupported parameter range: tail decays too slowly to certify")
        self._jmax = jmax
        js = np.arange(1, jmax + 1, dtype=float)
        self._f = self.C * np.exp(-self.Cp * js ** self.beta)
        # suffix sums in extended precision; _suffix[k] = sum_{j>k, j<=jmax} f(j)
        suf = np.zeros(jmax + 1, dtype=np.longdouble)
        suf[:jmax] = np.cumsum(self._f[::-1].astype(np.longdouble))[::-1]
        self._suffix = suf
        self._beyond = self._integral_tail(jmax)
        if self.total_mass() <= 1.0:
            raise InvalidEnvelope(f"total mass {self.total_mass():g} <= 1")

    def _integral_tail(self, k: int) -> float:
        # midpoint integral of C*exp(-Cp x^beta) over [k+1/2, inf), via the
        # upper incomplete gamma function; below 2**-52 by choice of jmax
        a = 1.0 / self.beta
        x0 = self.Cp * (k + 0.5) ** self.beta
        if x0 > 700.0:
            return 0.0
        return self.C * a * self.Cp ** (-a) * float(gamma_fn(a)) * float(gammaincc(a, x0))

    def value(self, j: int) -> float:
        return self.C * math.exp(-self.Cp * j ** self.beta)

    def values(self, js: np.ndarray) -> np.ndarray:
        js = np.asarray(js, dtype=float)
        return self.C * np.exp(-self.Cp * js ** self.beta)

    def tail_mass(self, k: int) -> float:
        if k < self._jmax:
            return float(self._suffix[k] + self._beyond)
        return self._integral_tail(k)

    def tail_mass_vec(self, ks: np.ndarray) -> np.ndarray:
        ks = np.asarray(ks, dtype=np.int64)
        out = np.empty(ks.shape, dtype=float)
        inside = ks < self._jmax
        out[inside] = self._suffix[ks[inside]].astype(float) + self._beyond
        for i in np.nonzero(~inside)[0]:
            out[i] = self._integral_tail(int(ks[i]))
        return out

    def tail_power_sum(self, power: int, k: int) -> float:
        if k >= self._jmax:
            return 0.0
        return float(np.sum(self._f[k:] ** power))

    def tail_weighted_sum(self, k: int, weight) -> float:
        if k >= self._jmax:
            return 0.0
        js = np.arange(k + 1, self._jmax + 1, dtype=float)
        return float(np.dot(self._f[k:], weight(js)))

    def continuous(self, x: float) -> float:
        return self.C * math.exp(-self.Cp * x ** self.beta)

    def log2_continuous(self, x):
        x = np.asarray(x, dtype=float)
        return (math.log(self.C) - self.Cp * x ** self.beta) / math.log(2.0)

    def spec_string(self) -> str:
        return f"sexp:C={self.C:g},Cp={self.Cp:g},beta={self.beta:g}"


class ExplicitEnvelope(Envelope):
    """Finite-support envelope given by an explicit non-increasing list in (0,1]."""

    def __init__(self, values) -> None:
        vals = tuple(float(v) for v in values)
        if not vals:
            raise InvalidEnvelope("explicit envelope needs at least one value")
        for v in vals:
            if not 0.0 < v <= 1.0:
                raise InvalidEnvelope("explicit envelope values must lie in (0,1]")
        if any(a < b for a, b in zip(vals, vals[1:])):
            raise InvalidEnvelope("explicit envelope must be non-increasing")
        if math.fsum(vals) <= 1.0:
            raise InvalidEnvelope(f"total mass {math.fsum(vals):g} <= 1")
        self._vals = np.array(vals, dtype=float)
        self.support_end = len(vals)
        suf = np.zeros(len(vals) + 1)
        suf[:-1] = np.cumsum(self._vals[::-1])[::-1]
        self._suffix = suf

    def value(self, j: int) -> float:
        return float(self._vals[j - 1]) if j <= self.support_end else 0.0

    def values(self, js: np.ndarray) -> np.ndarray:
        js = np.asarray(js, dtype=np.int64)
        out = np.zeros(js.shape, dtype=float)
        inside = js <= self.support_end
        out[inside] = self._vals[js[inside] - 1]
        return out

    def tail_mass(self, k: int) -> float:
        return float(self._suffix[min(k, self.support_end)])

    def tail_mass_vec(self, ks: np.ndarray) -> np.ndarray:
        ks = np.minimum(np.asarray(ks, dtype=np.int64), self.support_end)
        return self._suffix[ks].astype(float)

    def tail_power_sum(self, power: int, k: int) -> float:
        if k >= self.support_end:
            return 0.0
        return float(np.sum(self._vals[k:] ** power))

    def tail_weighted_sum(self, k: int, weight) -> float:
        if k >= self.support_end:
            return 0.0
        js = np.arange(k + 1, self.support_end + 1, dtype=float)
        return float(np.dot(self._vals[k:], weight(js)))

    def continuous(self, x: float) -> float:
        j = int(math.floor(x))
        return self.value(max(j, 1))

    def log2_continuous(self, x):
        js = np.maximum(np.floor(np.asarray(x, dtype=float)).astype(np.int64), 1)
        return np.log2(self.values(js))

    def spec_string(self) -> str:
        return "explicit:" + ",".join(f"{v:g}" for v in self._vals)


_FAMILIES = {
    "geom": (GeometricEnvelope, ("C", "q")),
    "power": (PowerLawEnvelope, ("C", "alpha")),
    "sexp": (StretchedExpEnvelope, ("C", "Cp", "beta")),
}


def make_envelope(family: str, **params) -> Envelope:
    """Build and validate an envelope; family is one of geom/power/sexp/explicit."""
    if family == "explicit":
        return ExplicitEnvelope(params["values"])
    if family not in _FAMILIES:
        raise InvalidEnvelope(f"unknown envelope family {family!r}")
    cls, names = _FAMILIES[family]
    if set(params) != set(names):
        raise InvalidEnvelope(f"{family} expects parameters {names}")
    try:
        return cls(**{("Cprime" if k == "Cp" else k): float(v) for k, v in params.items()})
    except (TypeError, ValueError) as exc:
        raise InvalidEnvelope(str(exc)) from exc


def parse_envelope(text: str) -> Envelope:
    """Parse the CLI grammar: geom:C=2,q=0.5 | power:C=1,alpha=0.5 |
    sexp:C=1,Cp=1,beta=1 | explicit:p1,p2,..."""
    try:
        family, _, body = text.partition(":")
        family = family.strip()
        if family == "explicit":
            return make_envelope("explicit", values=[float(tok) for tok in body.split(",") if tok])
        params = {}
        for item in body.split(","):
            key, _, val = item.partition("=")
            params[key.strip()] = float(val)
        return make_envelope(family, **params)
    except InvalidEnvelope:
        raise
    except Exception as exc:
        raise InvalidEnvelope(f"cannot parse envelope spec {text!r}: {exc}") from exc


# ---------------------------------------------------------------------------
# source laws
# ---------------------------------------------------------------------------

class SourceSpec:
    """A probability law on {1,2,...}: materialized prefix + analytic tail atoms.

    Atoms p_1..p_{tail_from} are stored; for j > tail_from the atom is
    tail_model.value(j), which is non-increasing there. Construction validates
    conservation to within 2**-40. Instances are immutable up to an internal
    sampling cache, whose growth is lock-protected (concurrent readers always
    see a consistent prefix).
    """

    def __init__(self, prefix, tail_model: Envelope | None, envelope: Envelope | None = None,
                 label: str = "source") -> None:
        self._prefix = np.asarray(prefix, dtype=float)
        if np.any(self._prefix < 0):
            raise ValueError("atoms must be non-negative")
        self.tail_from = len(self._prefix)
        self.tail_model = tail_model
        self.envelope = envelope
        self.label = label
        suf = np.zeros(self.tail_from + 1)
        suf[:-1] = np.cumsum(self._prefix[::-1].astype(np.longdouble))[::-1].astype(float)
        self._prefix_suffix = suf
        self._model_tail0 = tail_model.tail_mass(self.tail_from) if tail_model is not None else 0.0
        total = math.fsum(self._prefix) + self._model_tail0
        if abs(total - 1.0) > MASS_TOL:
            raise ValueError(f"atom masses sum to {total!r}, not 1")
        self._lock = threading.Lock()
        self._cdf_table = None
        self._memo: dict = {}
        if envelope is not None:
            sup = envelope.values(np.arange(1, self.tail_from + 1))
            if np.any(self._prefix > sup + 1e-12):
                raise ValueError("law is not dominated by its envelope")

    # -- atoms ------------------------------------------------------------

    def atom(self, j: int) -> float:
        """p_j."""
        if j < 1:
            raise DomainError("symbols are positive integers")
        if j <= self.tail_from:
            return float(self._prefix[j - 1])
        if self.tail_model is None:
            return 0.0
        return self.tail_model.value(j)

    def atoms_block(self, lo: int, hi: int) -> np.ndarray:
        """Atoms p_lo..p_hi inclusive as an array."""
        if lo < 1 or hi < lo - 1:
            raise DomainError("bad atom range")
        out = np.zeros(hi - lo + 1)
        m = min(hi, self.tail_from)
        if m >= lo:
            out[: m - lo + 1] = self._prefix[lo - 1: m]
        if hi > self.tail_from:
            start = max(lo, self.tail_from + 1)
            if self.tail_model is not None:
                out[start - lo:] = self.tail_model.values(np.arange(start, hi + 1))
        return out

    def tail_mass(self, k: int) -> float:
        """sum_{j>k} p_j."""
        if k < 0:
            raise DomainError("k must be >= 0")
        if k >= self.tail_from:
            return self.tail_model.tail_mass(k) if self.tail_model is not None else 0.0
        return float(self._prefix_suffix[k]) + self._model_tail0

    def cdf(self, k: int) -> float:
        return min(1.0, max(0.0, 1.0 - self.tail_mass(k)))

    def power_tail(self, power: int, k: int) -> float:
        """sum_{j>k} p_j**power for k >= tail_from."""
        if k < self.tail_from:
            raise DomainError("power_tail needs k >= tail_from")
        return self.tail_model.tail_power_sum(power, k) if self.tail_model is not None else 0.0

    def weighted_tail(self, k: int, weight) -> float:
        """sum_{j>k} p_j*weight(j) for k >= tail_from and smooth weight."""
        if k < self.tail_from:
            raise DomainError("weighted_tail needs k >= tail_from")
        return self.tail_model.tail_weighted_sum(k, weight) if self.tail_model is not None else 0.0

    @property
    def finite_support(self) -> int | None:
        if self.tail_model is None:
            return self.tail_from
        return self.tail_model.support_end

    # -- counting machinery ------------------------------------------------

    def _tail_search(self, x: float, strict: bool) -> int:
        """Largest j > tail_from with atom(j) >= x (> x if strict); tail_from if none."""
        model = self.tail_model
        if model is None:
            return self.tail_from
        ok = (lambda v: v > x) if strict else (lambda v: v >= x)
        j = self.tail_from + 1
        if model.support_end is not None and j > model.support_end:
            return self.tail_from
        if not ok(model.value(j)):
            return self.tail_from
        lo, step = j, 1
        while True:
            hi = lo + step
            if model.support_end is not None and hi > model.support_end:
                hi = model.support_end + 1
                break
            if ok(model.value(hi)):
                lo = hi
                step <<= 1
            else:
                break
        while hi - lo > 1:
            mid = (lo + hi) // 2
            if ok(model.value(mid)):
                lo = mid
            else:
                hi = mid
        return lo

    def counting(self, x: float) -> int:
        """Number of atoms with p_j >= x (Karlin's counting function)."""
        if x <= 0.0:
            raise DomainError("counting function is defined for x > 0")
        count = int(np.count_nonzero(self._prefix >= x))
        jstar = self._tail_search(x, strict=False)
        return count + (jstar - self.tail_from)

    def mass_above(self, x: float, include_equal: bool = True) -> float:
        """Total mass of atoms with p_j >= x (or > x)."""
        if x <= 0.0:
            return 1.0  # every positive atom qualifies
        if include_equal:
            head = float(np.sum(self._prefix[self._prefix >= x]))
        else:
            head = float(np.sum(self._prefix[self._prefix > x]))
        jstar = self._tail_search(x, strict=not include_equal)
        return head + (self.tail_mass(self.tail_from) - self.tail_mass(jstar))

    def small_mass(self, x: float, strict: bool = False) -> float:
        """Total mass of atoms with p_j <= x (or < x when strict)."""
        if not 0.0 <= x <= 1.0:
            raise DomainError("mass queries are defined on [0,1]")
        if x == 0.0:
            return 0.0  # zero atoms carry no mass
        if strict:
            head = float(np.sum(self._prefix[self._prefix < x]))
        else:
            head = float(np.sum(self._prefix[self._prefix <= x]))
        # tail atoms <= x are exactly those past the last atom above the cut
        jstar = self._tail_search(x, strict=not strict)
        return head + self.tail_mass(jstar)

    def dense_cut(self, x: float) -> int:
        """Smallest M >= tail_from such that every atom beyond M is < x."""
        return max(self.tail_from, self._tail_search(x, strict=False))

    # -- sampling -----------------------------------------------------------

    def _cdf_block(self, size: int) -> np.ndarray:
        ks = np.arange(1, size + 1)
        out = np.empty(size)
        m = min(size, self.tail_from)
        out[:m] = 1.0 - (self._prefix_suffix[1: m + 1] + self._model_tail0)
        if size > self.tail_from and self.tail_model is not None:
            out[self.tail_from:] = 1.0 - self.tail_model.tail_mass_vec(ks[self.tail_from:])
        elif size > self.tail_from:
            out[self.tail_from:] = 1.0
        np.maximum.accumulate(out, out=out)
        return np.clip(out, 0.0, 1.0)

    def _ensure_table(self, target_u: float) -> np.ndarray:
        with self._lock:
            table = self._cdf_table
            size = 64 if table is None else len(table)
            if table is not None and (table[-1] > target_u or len(table) >= _MAX_DENSE_TABLE):
                return table
            while True:
                table = self._cdf_block(size)
                if table[-1] > target_u or size >= _MAX_DENSE_TABLE:
                    break
                size *= 2
            self._cdf_table = table
            return table

    def _locate_u(self, u: float, lo: int) -> int:
        # smallest k with cdf(k) > u, knowing cdf(lo) <= u
        step = 1
        hi = lo + 1
        while self.cdf(hi) <= u:
            lo = hi
            step <<= 1
            hi = lo + step
        while hi - lo > 1:
            mid = (lo + hi) // 2
            if self.cdf(mid) <= u:
                lo = mid
            else:
                hi = mid
        return hi

    def sample(self, n: int, seed) -> np.ndarray:
        """n i.i.d. draws by exact inverse-CDF (no truncation bias); deterministic."""
        if n < 0:
            raise DomainError("sample size must be >= 0")
        rng = np.random.default_rng(seed)
        u = rng.random(n)
        if n == 0:
            return np.empty(0, dtype=np.int64)
        table = self._ensure_table(float(np.max(u)))
        idx = np.searchsorted(table, u, side="right")
        out = (idx + 1).astype(np.int64)
        over = np.nonzero(idx >= len(table))[0]
        for i in over:
            out[i] = self._locate_u(float(u[i]), len(table))
        return out

    def neg_log2_pmf(self, symbols: np.ndarray) -> float:
        """-log2 of the product law evaluated at the given symbols."""
        symbols = np.asarray(symbols, dtype=np.int64)
        if symbols.size == 0:
            return 0.0
        uniq, counts = np.unique(symbols, return_counts=True)
        probs = np.array([self.atom(int(j)) for j in uniq])
        if np.any(probs <= 0.0):
            raise DomainError("sequence contains zero-probability symbols")
        return float(-np.dot(counts, np.log2(probs)))

    def __repr__(self) -> str:
        return f"SourceSpec({self.label!r})"


class EnvelopeDistribution(SourceSpec):
    """The canonical distribution of an envelope: head mass at ell_f - 1, f beyond."""

    def __init__(self, env: Envelope) -> None:
        ell = _first_tail_at_most_one(env)
        prefix = np.zeros(ell)
        prefix[ell - 2] = 1.0 - env.tail_mass(ell - 1)
        prefix[ell - 1] = env.value(ell)
        super().__init__(prefix, env, envelope=env, label=env.spec_string())
        self.ell_f = ell

    def F(self, k: int) -> float:
        """Cumulative distribution at k (zero below the head index)."""
        if k < 0:
            raise DomainError("k must be >= 0")
        if k + 1 < self.ell_f:
            return 0.0
        return self.cdf(k)

    def fj(self, j: int) -> float:
        """Envelope probability of symbol j."""
        return self.atom(j)


def _first_tail_at_most_one(env: Envelope) -> int:
    # smallest ell >= 1 with sum_{j>=ell} f(j) <= 1; total mass > 1 forces ell >= 2
    lo, hi = 1, 2
    while env.tail_mass(hi - 1) > 1.0:
        lo = hi
        hi *= 2
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if env.tail_mass(mid - 1) > 1.0:
            lo = mid
        else:
            hi = mid
    return hi


def envelope_distribution(env: Envelope) -> EnvelopeDistribution:
    return EnvelopeDistribution(env)


# ---------------------------------------------------------------------------
# members of an envelope class
# ---------------------------------------------------------------------------

def finite_source(probs, label: str = "finite") -> SourceSpec:
    return SourceSpec(np.asarray(probs, dtype=float), None, label=label)


def uniform_source(k: int) -> SourceSpec:
    return finite_source(np.full(k, 1.0 / k), label=f"uniform{{1..{k}}}")


def point_mass() -> SourceSpec:
    return finite_source([1.0], label="point")


def geometric_source(p: float) -> SourceSpec:
    """Geometric law on {1,2,...} with success probability p."""
    if not 0.0 < p < 1.0:
        raise DomainError("success probability must be in (0,1)")
    tail = GeometricEnvelope(p / (1.0 - p), 1.0 - p, _validate=False)
    return SourceSpec(np.array([p]), tail, label=f"geometric(p={p:g})")


def perturbed_member(ed: EnvelopeDistribution, seed, width: int = 24,
                     strength: float = 0.9) -> SourceSpec:
    """A non-canonical member of the envelope class.

    Random downward perturbation of the envelope probabilities over a finite
    window, with the removed mass re-deposited on the head atom (the only atom
    with guaranteed headroom below f). Keeps conservation and domination exact.
    """
    rng = np.random.default_rng(seed)
    env = ed.envelope
    span = ed.ell_f + width
    if env.support_end is not None:
        span = min(span, env.support_end)
    prefix = ed.atoms_block(1, span).copy()
    head = ed.ell_f - 2  # 0-based index of the head atom
    headroom = env.value(ed.ell_f - 1) - prefix[head]
    deltas = rng.random(span - ed.ell_f + 1) * strength * prefix[ed.ell_f - 1: span]
    pool = deltas.sum()
    cap = 0.95 * headroom
    if pool > cap and pool > 0:
        deltas *= cap / pool
        pool = deltas.sum()
    prefix[ed.ell_f - 1: span] -= deltas
    prefix[head] += pool
    return SourceSpec(prefix, env, envelope=env,
                      label=f"perturbed[{env.spec_string()};seed={seed}]")


# ---------------------------------------------------------------------------
# module-level operations (accept EnvelopeDistribution or SourceSpec)
# ---------------------------------------------------------------------------

def counting_function(dist: SourceSpec, x: float) -> int:
    """Number of atoms with mass at least x."""
    return dist.counting(x)


def small_mass(dist: SourceSpec, x: float, strict: bool = False) -> float:
    """Cumulated probability of atoms with mass at most x (< x when strict)."""
    return dist.small_mass(x, strict=strict)


def sample(spec: SourceSpec, n: int, rng_seed) -> np.ndarray:
    """n i.i.d. symbols from the law; deterministic given the seed."""
    return spec.sample(n, rng_seed)

"""Occupancy statistics of i.i.d. samples and the finite-n inequalities they obey.

Exact expectations (number of distinct symbols, singletons, missing mass) are
evaluated as a dense sum over atoms with n*p_j > 1/2 plus an alternating
binomial series over analytic tail power sums, so heavy tails cost no accuracy.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import stats

from .envelopes import SourceSpec
from .errors import DomainError, LemmaViolation

_E = math.e
_SLACK_TOL = 1e-9  # numerical cushion folded into reported slacks


@dataclass
class OccupancyProfile:
    """Counts of an observed sample: per-symbol occurrences and the profile."""

    n: int
    counts: dict
    K: int
    K_r: dict
    missing_mass: float | None = None

    def check_identities(self) -> None:
        assert sum(self.counts.values()) == self.n
        assert self.K == sum(self.K_r.values())
        assert sum(r * kr for r, kr in self.K_r.items()) == self.n


def profile(sequence, spec: SourceSpec | None = None) -> OccupancyProfile:
    """Single-pass occupancy profile; missing mass needs the sampling law."""
    seq = np.asarray(sequence, dtype=np.int64)
    if seq.size and seq.min() < 1:
        raise DomainError("symbols are positive integers")
    uniq, cnt = np.unique(seq, return_counts=True)
    counts = {int(s): int(c) for s, c in zip(uniq, cnt)}
    rs, kr = np.unique(cnt, return_counts=True)
    k_r = {int(r): int(k) for r, k in zip(rs, kr)}
    missing = None
    if spec is not None:
        seen = math.fsum(spec.atom(int(s)) for s in uniq)
        missing = max(0.0, min(1.0, 1.0 - seen))
    return OccupancyProfile(n=int(seq.size), counts=counts, K=int(uniq.size),
                            K_r=k_r, missing_mass=missing)


# ---------------------------------------------------------------------------
# exact expected occupancy
# ---------------------------------------------------------------------------

def _lbinom(n: int, k: int) -> float:
    if k < 0 or k > n:
        return -math.inf
    return math.lgamma(n + 1) - math.lgamma(k + 1) - math.lgamma(n - k + 1)


def _dense_atoms(spec: SourceSpec, n: int):
    cut = spec.dense_cut(0.5 / n)  # beyond cut, n*p < 1/2
    return cut, spec.atoms_block(1, cut)


def _alt_tail(spec: SourceSpec, cut: int, log_coef, sign_first: int = 1) -> float:
    """sum over k>=1 of sign_first*(-1)^(k-1) * exp(log_coef(k)) * S_k with
    S_k = sum_{j>cut} p_j^k; terms decay at least like 2^-k here."""
    total = 0.0
    sign = sign_first
    for k in range(1, 80):
        lc = log_coef(k)
        if lc == -math.inf:
            break
        s_k = spec.power_tail(k, cut)
        if s_k <= 0.0:
            break
        term = math.exp(lc + math.log(s_k))
        total += sign * term
        sign = -sign
        if term < 1e-17 * (1.0 + abs(total)):
            break
    return total


def expected_distinct(spec: SourceSpec, n: int) -> float:
    """E[number of distinct symbols in an n-sample]."""
    if n <= 0:
        return 0.0
    cut, p = _dense_atoms(spec, n)
    pos = p[p > 0.0]
    with np.errstate(divide="ignore"):  # p = 1 atoms hit log1p(-1)
        dense = float(np.sum(-np.expm1(n * np.log1p(-pos))))
    tail = _alt_tail(spec, cut, lambda k: _lbinom(n, k))
    return dense + tail


def expected_singletons(spec: SourceSpec, n: int) -> float:
    """E[number of symbols seen exactly once in an n-sample]."""
    if n < 1:
        raise DomainError("n must be >= 1")
    cut, p = _dense_atoms(spec, n)
    pos = p[p > 0.0]
    with np.errstate(divide="ignore"):
        dense = float(np.sum(n * pos * np.exp((n - 1) * np.log1p(-pos))))
    tail = _alt_tail(spec, cut, lambda k: math.log(n) + _lbinom(n - 1, k - 1))
    return dense + tail


def expected_missing_mass(spec: SourceSpec, n: int) -> float:
    """E[total probability of the symbols unseen in an n-sample]."""
    if n < 1:
        raise DomainError("n must be >= 1")
    cut, p = _dense_atoms(spec, n)
    pos = p[p > 0.0]
    with np.errstate(divide="ignore"):
        dense = float(np.sum(pos * np.exp(n * np.log1p(-pos))))
    tail = _alt_tail(spec, cut, lambda k: _lbinom(n, k - 1))
    return dense + tail


def mean_inverse_distinct(spec: SourceSpec, n: int, trials: int = 2000, seed: int = 7):
    """Monte Carlo (mean, standard error) of 1/K_n; per-trial seed = seed XOR trial."""
    vals = np.empty(trials)
    for t in range(trials):
        draw = spec.sample(n, seed ^ t)
        vals[t] = 1.0 / len(np.unique(draw))
    return float(vals.mean()), float(vals.std(ddof=1) / math.sqrt(trials))


def inverse_distinct_product_exact_n2(spec: SourceSpec) -> float:
    """E K_2 * E[1/K_2] in closed form: with s = sum p_j^2, (2-s)(1+s)/2."""
    s = float(np.sum(spec.atoms_block(1, spec.tail_from) ** 2)) + spec.power_tail(2, spec.tail_from)
    return (2.0 - s) * (1.0 + s) / 2.0


# ---------------------------------------------------------------------------
# inequality checks
# ---------------------------------------------------------------------------

@dataclass
class InequalityRow:
    name: str
    lhs: float
    rhs: float

    @property
    def slack(self) -> float:
        return self.rhs - self.lhs

    @property
    def ok(self) -> bool:
        return self.slack >= -_SLACK_TOL


@dataclass
class OccupancyLemmaReport:
    n: int
    rows: list = field(default_factory=list)

    def raise_on_violation(self) -> None:
        for row in self.rows:
            if not row.ok:
                raise LemmaViolation(
                    f"{row.name} failed at n={self.n}: lhs={row.lhs!r} rhs={row.rhs!r}")


def check_occupancy_lemma(spec: SourceSpec, n: int, trials: int = 2000,
                          seed: int = 7) -> OccupancyLemmaReport:
    """Verify the chain E M_{n,0} <= E K_{n,1}/n <= E K_n/n, the counting-function
    bracket on E K_n, and 1 <= E K_n * E[1/K_n] <= 3 (Monte Carlo, 3-sigma band)."""
    if n < 1:
        raise DomainError("n must be >= 1")
    ek = expected_distinct(spec, n)
    ek1 = expected_singletons(spec, n)
    em = expected_missing_mass(spec, n)
    nu_hat = spec.counting(1.0 / n)
    nu1_open = spec.small_mass(1.0 / n, strict=True)
    inv_mean, inv_se = mean_inverse_distinct(spec, n, trials=trials, seed=seed)
    product = ek * inv_mean
    band = 3.0 * ek * inv_se
    report = OccupancyLemmaReport(n=n, rows=[
        InequalityRow("missing_mass_vs_singletons", em, ek1 / n),
        InequalityRow("singletons_vs_distinct", ek1 / n, ek / n),
        InequalityRow("distinct_lower_count", (_E - 1.0) / _E * nu_hat, ek),
        InequalityRow("distinct_upper_count", ek, nu_hat + n * nu1_open),
        InequalityRow("inv_distinct_product_lower", 1.0, product + band),
        InequalityRow("inv_distinct_product_upper", product - band, 3.0),
    ])
    report.raise_on_violation()
    return report


def check_binomial_inverse_lemma(n: int, p: float) -> InequalityRow:
    """Exact E[1/(N-1/2) | N>0] for N ~ Bin(n,p) against (1/np)(1 + 9/np)."""
    if n < 1 or not 0.0 < p < 1.0:
        raise DomainError("need n >= 1 and p in (0,1)")
    ks = np.arange(1, n + 1)
    pmf = stats.binom.pmf(ks, n, p)
    p_pos = 1.0 - (1.0 - p) ** n
    lhs = float(np.sum(pmf / (ks - 0.5))) / p_pos
    mean = n * p
    rhs = (1.0 / mean) * (1.0 + 9.0 / mean)
    row = InequalityRow(f"binomial_inverse(n={n},p={p:g})", lhs, rhs)
    if not row.ok:
        raise LemmaViolation(f"binomial inverse bound failed at n={n}, p={p}")
    return row


def poisson_tail_slack(lam: float, t: float) -> InequalityRow:
    """Exact P(N >= lam+t) for N ~ Poisson(lam) against exp(-t^2/(2(lam+t/3)))."""
    if lam <= 0 or t <= 0:
        raise DomainError("need lam > 0 and t > 0")
    k = math.ceil(lam + t)
    lhs = float(stats.poisson.sf(k - 1, lam))
    rhs = math.exp(-t * t / (2.0 * (lam + t / 3.0)))
    row = InequalityRow(f"poisson_tail(lam={lam:g},t={t:g})", lhs, rhs)
    if not row.ok:
        raise LemmaViolation(f"poisson tail bound failed at lam={lam}, t={t}")
    return row

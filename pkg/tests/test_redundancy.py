import math

import numpy as np
import pytest

import pccodec as pc
from pccodec import DomainError, elias_length, idealized_elias_cost

LOG2E = math.log2(math.e)


class TestRedundancyRate:
    def test_geometric_n8_exact(self, geom_dist):
        assert pc.redundancy_rate(geom_dist, 8) == pytest.approx(1.5, abs=1e-12)

    def test_n1_zero(self, geom_dist, power_dist):
        assert pc.redundancy_rate(geom_dist, 1) == 0.0
        assert pc.redundancy_rate(power_dist, 1) == 0.0

    def test_monotone_in_n(self, geom_dist, power_dist, sexp_dist):
        for ed in (geom_dist, power_dist, sexp_dist):
            vals = [pc.redundancy_rate(ed, n) for n in (1, 4, 16, 64, 256, 1024)]
            assert all(v >= 0 for v in vals)
            assert all(b >= a for a, b in zip(vals, vals[1:]))

    def test_quadrature_agreement(self, geom_dist, power_dist, sexp_dist):
        explicit = pc.envelope_distribution(
            pc.make_envelope("explicit", values=[0.9, 0.5, 0.3, 0.2]))
        for ed in (geom_dist, power_dist, sexp_dist, explicit):
            for n in (10, 1000, 10 ** 5):
                closed = pc.redundancy_rate(ed, n)
                quadr = pc.redundancy_rate_quadrature(ed, n)
                assert closed == pytest.approx(quadr, rel=1e-9, abs=1e-12)


class TestBoundReports:
    def test_upper_geometric_n8(self, geom_dist):
        rep = pc.redundancy_upper(geom_dist, 8)
        assert rep.upper_integral == pytest.approx(1.5, abs=1e-12)
        assert rep.upper_count == pytest.approx(LOG2E * 3, abs=1e-12)
        assert rep.upper_mass == pytest.approx(LOG2E * 8 * 0.25, abs=1e-12)
        assert rep.head_term == pytest.approx(2 * 3.0, abs=1e-12)

    def test_upper_terms_nonnegative(self, geom_dist, power_dist, sexp_dist):
        for ed in (geom_dist, power_dist, sexp_dist):
            for n in (1, 10, 100, 10 ** 4):
                rep = pc.redundancy_upper(ed, n)
                assert rep.upper_integral >= 0 and rep.upper_count >= 0
                assert rep.upper_mass >= 0 and rep.head_term >= 0

    def test_point_like_envelope_count_bounded(self):
        ed = pc.envelope_distribution(pc.make_envelope("explicit", values=[0.9, 0.9]))
        for n in (1, 10, 1000, 10 ** 6):
            assert pc.redundancy_upper(ed, n).upper_count <= 2 * LOG2E + 1e-12

    def test_lower_heavy_tail_candidates(self):
        ed = pc.envelope_distribution(pc.make_envelope("power", C=1, alpha=0.6))
        rep = pc.redundancy_lower(ed, 10 ** 5)
        assert rep.lower_integral < 0  # counting penalty swamps the integral
        assert rep.lower_occupancy > 0

    def test_lower_identity_and_trend(self, geom_dist):
        for n in (1 << 10, 1 << 13, 1 << 16):
            rep = pc.redundancy_lower(geom_dist, n)
            m = max(1, math.floor(n - n ** (2 / 3)))
            expect = pc.redundancy_rate(geom_dist, m) - 5 * geom_dist.counting(1 / m) - 1
            assert rep.lower_integral == pytest.approx(expect, rel=1e-12)
        lows = [pc.redundancy_lower(geom_dist, n).lower_integral
                for n in (1 << 10, 1 << 13, 1 << 16)]
        assert lows[-1] > lows[0]

    def test_lower_domain(self, geom_dist):
        rep = pc.redundancy_lower(geom_dist, 8)
        assert math.isfinite(rep.lower_integral) and math.isfinite(rep.lower_occupancy)
        with pytest.raises(DomainError):
            pc.redundancy_lower(geom_dist, 7)


def direct_sum_oracle(atoms, prefix, idealized):
    """Literal conditional relative-entropy step over an explicit atom list."""
    seen = {}
    for x in prefix:
        seen[x] = seen.get(x, 0) + 1
    i, K = len(prefix), len(seen)
    genie = i + (K + 1) / 2.0
    acc = 0.0
    for j, p in enumerate(atoms, start=1):
        if p <= 0:
            continue
        if j in seen:
            q = (seen[j] - 0.5) / genie
        else:
            cost = idealized_elias_cost(j) if idealized else elias_length(j)
            q = (K + 0.5) / genie * 2.0 ** (-cost)
        acc += p * math.log2(p / q)
    return acc


class TestDecomposition:
    @pytest.mark.parametrize("idealized", [True, False])
    def test_uniform2_identity(self, idealized):
        u2 = pc.uniform_source(2)
        d = pc.instantaneous_decomposition(u2, [1, 2], idealized_elias=idealized)
        direct = pc.direct_conditional_redundancy(u2, [1, 2], idealized_elias=idealized)
        assert d.total == pytest.approx(direct, abs=1e-9)
        assert direct == pytest.approx(direct_sum_oracle([0.5, 0.5], [1, 2], idealized))

    @pytest.mark.parametrize("idealized", [True, False])
    def test_random_prefix_identities(self, idealized):
        rng = np.random.default_rng(3)
        for support in (2, 4, 9):
            spec = pc.uniform_source(support)
            for trial in range(6):
                prefix = rng.integers(1, support + 1, size=rng.integers(0, 12)).tolist()
                d = pc.instantaneous_decomposition(spec, prefix, idealized_elias=idealized)
                direct = direct_sum_oracle([1 / support] * support, prefix, idealized)
                assert d.total == pytest.approx(direct, abs=1e-9)

    def test_all_seen_kills_unseen_terms(self):
        u2 = pc.uniform_source(2)
        d = pc.instantaneous_decomposition(u2, [1, 2, 1])
        assert abs(d.C) < 1e-12 and abs(d.D) < 1e-12

    def test_empty_prefix(self):
        u4 = pc.uniform_source(4)
        d = pc.instantaneous_decomposition(u4, [])
        assert d.B == 0.0
        direct = direct_sum_oracle([0.25] * 4, [], True)
        assert d.total == pytest.approx(direct, abs=1e-9)

    def test_infinite_support_identity(self):
        # geometric law truncated far below the tolerance serves as the oracle
        gs = pc.geometric_source(0.5)
        atoms = [0.5 * 0.5 ** (j - 1) for j in range(1, 120)]
        for prefix in ([], [1], [1, 1, 2, 4]):
            d = pc.instantaneous_decomposition(gs, prefix)
            assert d.total == pytest.approx(direct_sum_oracle(atoms, prefix, True), abs=1e-8)


class TestEmpiricalRedundancy:
    def test_deterministic(self, geom_dist):
        a = pc.empirical_redundancy(geom_dist, [64], trials=1, seed=5)
        b = pc.empirical_redundancy(geom_dist, [64], trials=1, seed=5)
        assert a == b

    def test_point_mass_closed_form(self):
        # redundancy == ideal code length; the 1-run has an explicit Gamma form
        pm = pc.point_mass()
        for n in (16, 256, 4096):
            rep = pc.empirical_redundancy(pm, [n], trials=1, seed=1)[0]
            assert rep.mean_neg_log_p == 0.0
            ones_run = -(math.lgamma(n - 0.5) - math.lgamma(0.5)
                         - math.lgamma(n + 1)) / math.log(2)
            terminal = -math.log2(3.0 / (2 * n + 2))
            expect = ones_run + terminal + elias_length(1) + 1
            assert rep.redundancy_bits == pytest.approx(expect, abs=1e-6)

    def test_uniform8_kt_regime(self):
        # On a fixed k-alphabet the mixture pays (k-1)/2*log2(n) plus
        # ~(2k+1)/2*log2(n) for the always-alive escape mass, so the ratio
        # concentrates near 3k/(k-1) = 24/7 here; assert scale and stability.
        u8 = pc.uniform_source(8)
        n = 1 << 14
        rep = pc.empirical_redundancy(u8, [n], trials=400, seed=11)[0]
        ratio = rep.redundancy_bits / ((8 - 1) / 2 * math.log2(n))
        assert 0.5 <= ratio <= 4.0
        assert ratio == pytest.approx(3 * 8 / (8 - 1), abs=0.35)

    def test_geometric_positive_redundancy(self, geom_dist):
        reps = pc.empirical_redundancy(geom_dist, [256, 1024], trials=60, seed=2)
        for rep in reps:
            assert rep.redundancy_bits > 0
            assert rep.mean_code_bits >= rep.mean_ideal_bits

    def test_idealized_elias_mode(self, geom_dist):
        rows_real = pc.redundancy_trials(geom_dist, 128, 3, seed=4)
        rows_ideal = pc.redundancy_trials(geom_dist, 128, 3, seed=4, idealized_elias=True)
        for (t, _, ib_r, _), (_, _, ib_i, _) in zip(rows_real, rows_ideal):
            s = geom_dist.sample(128, 4 ^ t)
            _, redacted, _ = pc.censor(s)
            il = pc.ideal_codelength(s)
            expect = il.mixture_bits + sum(idealized_elias_cost(int(v)) for v in redacted) + 1.0
            assert ib_i == pytest.approx(expect, abs=1e-9)
            assert ib_r == pytest.approx(il.total, abs=1e-9)


class TestDistFreeBound:
    def test_geometric_envelope_dist(self, geom_dist):
        rep = pc.check_distfree_bound(geom_dist, 100, trials=800, seed=6)
        assert rep.slack > 0

    def test_uniform4(self):
        rep = pc.check_distfree_bound(pc.uniform_source(4), 50, trials=800, seed=6)
        assert rep.slack > 0

    def test_point_mass(self):
        rep = pc.check_distfree_bound(pc.point_mass(), 10, trials=50, seed=6)
        assert rep.slack > 0
        assert rep.lhs_se == pytest.approx(0.0, abs=1e-12)

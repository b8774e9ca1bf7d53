import math

import numpy as np
import pytest

from rdeq.info import JointTable, ValidationError, h2
from rdeq.simulate import (
    EnumerationLimitError,
    SchemeFeasibilityError,
    SchemeRates,
    SimConfig,
    SimReport,
    sim_binning_lossless,
    sim_separation_scheme,
    sim_uncoded,
    uncoded_equivocation,
)
from helpers import oracle_conditional_entropy

UNCODED_01_01 = 0.2579141414502827


class TestUncodedEquivocation:
    def test_counterexample_value(self):
        assert uncoded_equivocation(0.1, 0.1) == pytest.approx(UNCODED_01_01, abs=1e-15)
        assert uncoded_equivocation(0.1, 0.1) == pytest.approx(0.258, abs=1e-3)

    def test_perfect_observation(self):
        assert uncoded_equivocation(0.0, 0.0) == 0.0
        assert uncoded_equivocation(0.0, 0.3) == 0.0

    def test_useless_channel_output(self):
        assert uncoded_equivocation(0.1, 0.5) == pytest.approx(h2(0.1), abs=1e-12)

    def test_matches_table_oracle(self):
        # independent route: brute-force H(A | E, Z) on the 8-cell joint
        for eps, zeta in [(0.1, 0.1), (0.25, 0.05), (0.4, 0.3), (0.5, 0.5)]:
            p = np.zeros((2, 2, 2))
            for a in (0, 1):
                for e in (0, 1):
                    for z in (0, 1):
                        pe = eps if e != a else 1 - eps
                        pz = zeta if z != a else 1 - zeta
                        p[a, e, z] = 0.5 * pe * pz
            JointTable(p)  # sanity: a valid joint
            want = oracle_conditional_entropy(p, (0,), (1, 2))
            assert uncoded_equivocation(eps, zeta) == pytest.approx(want, abs=1e-12)

    def test_domain(self):
        with pytest.raises(ValidationError):
            uncoded_equivocation(0.7, 0.1)


class TestSimUncoded:
    def test_matches_closed_form_exactly(self):
        config = SimConfig(n=10, trials=64, seed=3, eps=0.1, zeta=0.1)
        report = sim_uncoded(config)
        assert report.equivocation_per_symbol == pytest.approx(UNCODED_01_01, abs=1e-12)
        assert report.mean_distortion == 0.0
        assert report.decode_error_rate == 0.0

    def test_perfect_eavesdropper(self):
        report = sim_uncoded(SimConfig(n=8, trials=16, seed=0, eps=0.0, zeta=0.2))
        assert report.equivocation_per_symbol == 0.0


class TestSimBinning:
    def test_independent_eve_uniform_coset(self):
        # decoder has the source (beta = 0), eavesdropper independent:
        # the residual is exactly the coset size, (1 - R) bits per symbol
        config = SimConfig(n=12, trials=100, seed=1, beta=0.0, eps=0.5)
        report = sim_binning_lossless(config, 0.5)
        assert report.decode_error_rate == 0.0
        assert report.equivocation_per_symbol == pytest.approx(0.5, abs=1e-9)

    def test_full_rate_reveals_everything(self):
        config = SimConfig(n=12, trials=50, seed=2, beta=0.5, eps=0.1)
        report = sim_binning_lossless(config, 1.0)
        assert report.equivocation_per_symbol == 0.0
        assert report.decode_error_rate == 0.0

    def test_decode_error_shrinks_with_blocklength(self):
        errs = []
        for n in (8, 12, 16):
            config = SimConfig(n=n, trials=500, seed=11, beta=0.5, eps=0.1)
            errs.append(sim_binning_lossless(config, 0.7).decode_error_rate)
        assert errs[0] > errs[1] > errs[2]

    def test_equivocation_bounded_by_side_information_gap(self):
        for seed in range(4):
            config = SimConfig(n=10, trials=50, seed=seed, beta=0.6, eps=0.15)
            report = sim_binning_lossless(config, 0.6)
            assert report.equivocation_per_symbol <= h2(0.15) + 1e-9

    def test_reproducible_and_parallel_identical(self):
        config = SimConfig(n=12, trials=64, seed=5, beta=0.5, eps=0.1)
        a = sim_binning_lossless(config, 0.6, workers=1)
        b = sim_binning_lossless(config, 0.6, workers=1)
        c = sim_binning_lossless(config, 0.6, workers=3)
        assert a == b == c

    def test_rate_domain(self):
        config = SimConfig(n=10, trials=10, seed=0)
        with pytest.raises(SchemeFeasibilityError):
            sim_binning_lossless(config, 1.2)

    def test_enumeration_bound(self):
        config = SimConfig(n=20, trials=5, seed=0, beta=0.5, eps=0.1)
        with pytest.raises(EnumerationLimitError):
            sim_binning_lossless(config, 0.05)


class TestSchemeRates:
    def test_recombination_invariants(self):
        SchemeRates(r1=0.3, r2=0.4, rc=0.5, rp=0.2, rf=0.1)
        with pytest.raises(SchemeFeasibilityError):
            SchemeRates(r1=0.3, r2=0.4, rc=0.5, rp=0.3, rf=0.0)  # rate not conserved
        with pytest.raises(SchemeFeasibilityError):
            SchemeRates(r1=0.6, r2=0.1, rc=0.5, rp=0.2, rf=0.0)  # r1 > rc
        with pytest.raises(SchemeFeasibilityError):
            SchemeRates(r1=-0.1, r2=0.1, rc=0.0, rp=0.0, rf=0.0)


class TestSimSeparation:
    def test_useless_eve_channel_leaves_side_information_entropy(self):
        config = SimConfig(n=10, trials=40, seed=3, beta=1.0, eps=0.1, zeta=0.5)
        rates = SchemeRates(r1=0.5, r2=0.5, rc=0.5, rp=0.5, rf=0.3, k=2.0)
        report = sim_separation_scheme(config, rates)
        assert report.equivocation_per_symbol == pytest.approx(h2(0.1), abs=1e-9)
        assert report.decode_error_rate == 0.0

    def test_clear_eve_channel_reduces_to_binning_residual(self):
        # zeta = 0 and no fictitious message: the channel layer protects
        # nothing, so only the bin coset is left (matched bit counts)
        config = SimConfig(n=12, trials=300, seed=7, beta=1.0, eps=0.1, zeta=0.0)
        rates = SchemeRates(r1=0.25, r2=0.25, rc=0.25, rp=0.25, rf=0.0, k=1.0)
        sep = sim_separation_scheme(config, rates)
        bin_ = sim_binning_lossless(config, 0.5)
        assert sep.equivocation_per_symbol == pytest.approx(
            bin_.equivocation_per_symbol, abs=1e-9
        )

    def test_fictitious_rate_never_hurts(self):
        values = []
        for rf in (0.0, 0.25, 0.5):
            config = SimConfig(n=12, trials=500, seed=99, beta=1.0, eps=0.1, zeta=0.25)
            rates = SchemeRates(r1=0.5, r2=0.5, rc=0.5, rp=0.5, rf=rf, k=2.0)
            values.append(sim_separation_scheme(config, rates).equivocation_per_symbol)
        assert values[0] <= values[1] <= values[2]

    def test_equivocation_bounded_by_side_information_gap(self):
        config = SimConfig(n=10, trials=60, seed=21, beta=1.0, eps=0.2, zeta=0.3)
        rates = SchemeRates(r1=0.5, r2=0.5, rc=0.5, rp=0.5, rf=0.2, k=2.0)
        report = sim_separation_scheme(config, rates)
        assert report.equivocation_per_symbol <= h2(0.2) + 1e-9

    def test_reproducible_and_parallel_identical(self):
        config = SimConfig(n=10, trials=48, seed=5, beta=1.0, eps=0.1, zeta=0.25)
        rates = SchemeRates(r1=0.5, r2=0.5, rc=0.5, rp=0.5, rf=0.25, k=2.0)
        a = sim_separation_scheme(config, rates, workers=1)
        b = sim_separation_scheme(config, rates, workers=3)
        assert a == b

    def test_channel_budget_enforced(self):
        config = SimConfig(n=12, trials=10, seed=0, beta=1.0, eps=0.1, zeta=0.1)
        rates = SchemeRates(r1=0.5, r2=0.5, rc=0.5, rp=0.5, rf=0.5, k=1.0)
        with pytest.raises(SchemeFeasibilityError):
            sim_separation_scheme(config, rates)

    def test_blocklength_cap(self):
        config = SimConfig(n=18, trials=5, seed=0)
        rates = SchemeRates(r1=0.5, r2=0.5, rc=0.5, rp=0.5, rf=0.0, k=1.0)
        with pytest.raises(EnumerationLimitError):
            sim_separation_scheme(config, rates)


class TestConfidenceHalfwidth:
    def test_rerun_with_fresh_seed_lands_inside_band(self):
        hits = 0
        pairs = 20
        for i in range(pairs):
            base = SimConfig(n=10, trials=120, seed=1000 + i, beta=0.5, eps=0.15)
            other = SimConfig(n=10, trials=120, seed=5000 + i, beta=0.5, eps=0.15)
            r1 = sim_binning_lossless(base, 0.7)
            r2 = sim_binning_lossless(other, 0.7)
            if abs(r1.equivocation_per_symbol - r2.equivocation_per_symbol) <= r1.confidence_halfwidth:
                hits += 1
        assert hits >= 0.95 * pairs

    def test_config_validation(self):
        with pytest.raises(ValidationError):
            SimConfig(n=0, trials=10, seed=0)
        with pytest.raises(ValidationError):
            SimConfig(n=25, trials=10, seed=0)
        with pytest.raises(ValidationError):
            SimConfig(n=10, trials=10, seed=0, eps=0.9)

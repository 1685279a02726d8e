# tests/test_rounding.py
"""
Tests for unit-cube rounding:
- Prefix rounding is the exact optimum over 0/1 vectors
- Tie-breaking, scale invariance and permutation equivariance
- Seeded heavy-tailed sweeps up to n = 64
- Threshold rounding on integer vectors
- Smooth rounding and its rho-dependent guarantee
- The harmonic root family and the projection example
"""

import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from src.analysis.rounding import (RoundingError, brute_force_best, harmonic_root_vector,
                                   prefix_guarantee, projection_beta_ratio, round_prefix,
                                   round_smooth, round_threshold, smooth_guarantee,
                                   threshold_guarantee)
from src.models import LemmaTag

non_negative_vectors = st.lists(
    st.floats(min_value=0.0, max_value=1e3, allow_nan=False, allow_infinity=False, allow_subnormal=False),
    min_size=1, max_size=12,
).filter(lambda values: any(v > 1e-6 for v in values))

TIED_PREFIXES = [1, 0, 1, 2, 1, 1, 1, 3, 2, 0, 3]
SWEEP_SEED = 4242


class TestPrefixRounding:
    """Test the best prefix of the sorted vector"""

    def test_single_coordinate(self):
        """Test that a one-entry vector rounds to itself with ratio 1"""
        outcome = round_prefix([5.0])

        assert outcome.support == (0,)
        assert outcome.achieved_ratio == pytest.approx(1.0)
        assert outcome.lemma_tag is LemmaTag.PREFIX

    def test_constant_vector_takes_everything(self):
        """Test that equal entries give the full support"""
        outcome = round_prefix(np.ones(6))

        assert outcome.support == tuple(range(6))
        assert outcome.achieved_ratio == pytest.approx(1.0)

    def test_dominant_entry(self):
        """Test that one large entry wins on its own"""
        outcome = round_prefix([0.1, 10.0, 0.1])

        assert outcome.support == (1,)

    def test_ties_prefer_smallest_support(self):
        """Test that (1, 0) keeps only the first coordinate"""
        outcome = round_prefix([1.0, 0.0])

        assert outcome.support == (0,)
        assert outcome.achieved_ratio == pytest.approx(1.0)

    def test_rejects_zero_vector(self):
        """Test that the zero vector has nothing to round"""
        with pytest.raises(RoundingError):
            round_prefix([0.0, 0.0])

    def test_rejects_negative_entries(self):
        """Test that entries must be non-negative"""
        with pytest.raises(RoundingError):
            round_prefix([1.0, -0.5])

    def test_rejects_non_finite(self):
        """Test that NaN entries are refused"""
        with pytest.raises(RoundingError):
            round_prefix([1.0, float('nan')])

    @settings(max_examples=300, deadline=None)
    @given(non_negative_vectors)
    def test_matches_brute_force(self, values):
        """Test that the prefix optimum equals the 2^n enumeration"""
        outcome = round_prefix(values)
        best, _ = brute_force_best(values)

        assert outcome.achieved_ratio == pytest.approx(best, rel=1e-12, abs=1e-12)

    def test_exact_tie_takes_smallest_prefix(self):
        """Test sorted sums 10/sqrt(4) = 15/sqrt(9): the four-entry prefix wins"""
        outcome = round_prefix(TIED_PREFIXES)

        assert outcome.support == (3, 7, 8, 10)
        assert outcome.achieved_ratio == pytest.approx(5.0 / math.sqrt(31.0))

    @pytest.mark.parametrize("scale", [3.7, 0.1, 1e-3, 2.0 ** 40])
    def test_scale_invariance(self, scale):
        """Test that c * z keeps the support and the ratio, ties included"""
        base = round_prefix(TIED_PREFIXES)
        scaled = round_prefix(scale * np.asarray(TIED_PREFIXES, dtype=float))

        assert scaled.support == base.support
        assert scaled.achieved_ratio == pytest.approx(base.achieved_ratio, rel=1e-12)

    def test_scale_invariance_on_random_vectors(self, rng):
        """Test support and ratio under random positive scalings"""
        for _ in range(200):
            z = rng.exponential(size=int(rng.integers(1, 40)))
            c = float(rng.uniform(1e-3, 1e3))
            base = round_prefix(z)
            scaled = round_prefix(c * z)

            assert scaled.support == base.support
            assert scaled.achieved_ratio == pytest.approx(base.achieved_ratio, rel=1e-12)

    def test_permutation_equivariance(self, rng):
        """Test that permuting z permutes the support and keeps the ratio"""
        vectors = [np.asarray(TIED_PREFIXES, dtype=float)]
        vectors += [rng.exponential(size=int(rng.integers(1, 40))) for _ in range(200)]
        for z in vectors:
            perm = rng.permutation(z.size)
            base = round_prefix(z)
            permuted = round_prefix(z[perm])

            assert permuted.support == tuple(sorted(int(np.flatnonzero(perm == i)[0]) for i in base.support))
            assert permuted.achieved_ratio == pytest.approx(base.achieved_ratio, rel=1e-12)

    @settings(max_examples=300, deadline=None)
    @given(non_negative_vectors)
    def test_guarantee(self, values):
        """Test ratio >= 2 / sqrt(ln n + 4)"""
        outcome = round_prefix(values)

        assert outcome.guarantee == pytest.approx(prefix_guarantee(len(values)))
        assert outcome.achieved_ratio >= outcome.guarantee - 1e-12


class TestThresholdRounding:
    """Test level sets of integer vectors"""

    def test_worked_example(self):
        """Test (3, 1) with cap 3: level 3 beats level 1 (9 > 16/2)"""
        outcome = round_threshold([3, 1], 3)

        assert outcome.level == 3
        assert outcome.support == (0,)
        assert outcome.achieved_ratio == pytest.approx(3.0 / math.sqrt(10.0))
        assert outcome.lemma_tag is LemmaTag.THRESHOLD

    def test_constant_vector(self):
        """Test that equal entries form one level"""
        outcome = round_threshold([2, 2, 2], 2)

        assert outcome.level == 2
        assert outcome.support == (0, 1, 2)

    def test_float_integers_accepted(self):
        """Test that integral floats are accepted"""
        assert round_threshold(np.array([1.0, 0.0, 1.0]), 1).support == (0, 2)

    def test_rejects_fractional(self):
        """Test that non-integers are refused"""
        with pytest.raises(RoundingError):
            round_threshold([1.5, 1.0], 2)

    def test_rejects_over_cap(self):
        """Test that entries above the cap are refused"""
        with pytest.raises(RoundingError):
            round_threshold([4, 1], 3)

    def test_rejects_bad_cap(self):
        """Test that the cap is a positive integer"""
        with pytest.raises(RoundingError):
            round_threshold([1, 1], 0)

    @settings(max_examples=300, deadline=None)
    @given(st.integers(min_value=1, max_value=50).flatmap(
        lambda cap: st.tuples(st.just(cap),
                              st.lists(st.integers(min_value=0, max_value=cap), min_size=1, max_size=12)
                              .filter(any))))
    def test_guarantee(self, case):
        """Test ratio >= 1 / sqrt(ln Delta + 1)"""
        cap, values = case
        outcome = round_threshold(values, cap)

        assert outcome.guarantee == pytest.approx(threshold_guarantee(cap))
        assert outcome.achieved_ratio >= outcome.guarantee - 1e-12
        assert set(outcome.support) == {i for i, v in enumerate(values) if v >= outcome.level}


class TestSmoothRounding:
    """Test the rho-dependent rounding"""

    def test_constant_vector(self):
        """Test that rho = 1 gives the full support"""
        outcome = round_smooth([2.0, 2.0, 2.0])

        assert outcome.rho == 1.0
        assert outcome.support == (0, 1, 2)
        assert outcome.guarantee == pytest.approx(smooth_guarantee(1.0))
        assert outcome.lemma_tag is LemmaTag.SMOOTH

    def test_reports_rho(self):
        """Test that the reported rho is rho(z)"""
        outcome = round_smooth([2.0, 1.0, 1.0, 1.0, 1.0, 1.0])

        assert outcome.rho == 2.0
        assert outcome.achieved_ratio >= outcome.guarantee

    @settings(max_examples=300, deadline=None)
    @given(non_negative_vectors)
    def test_guarantee(self, values):
        """Test ratio >= 1 / sqrt(8 (ln rho + 1))"""
        outcome = round_smooth(values)

        assert outcome.achieved_ratio >= outcome.guarantee - 1e-12
        assert outcome.achieved_ratio <= 1.0 + 1e-12


class TestHeavyTailedSweep:
    """Test the prefix and smooth guarantees for n up to 64"""

    @pytest.mark.parametrize("n", range(13, 65))
    def test_pareto_vectors(self, n):
        """Test 60 seeded Pareto(1.2) vectors of length n"""
        rng = np.random.default_rng(SWEEP_SEED + n)
        for _ in range(60):
            z = rng.pareto(1.2, size=n) + 1e-9
            prefix = round_prefix(z)
            smooth = round_smooth(z)

            assert prefix.achieved_ratio >= prefix_guarantee(n) - 1e-12
            assert smooth.achieved_ratio >= smooth.guarantee - 1e-12
            assert smooth.achieved_ratio <= prefix.achieved_ratio * (1.0 + 1e-12)

    @pytest.mark.parametrize("n", [13, 32, 64])
    def test_sparse_integer_vectors(self, n):
        """Test mostly-zero integer vectors, where prefix ties are exact"""
        rng = np.random.default_rng(SWEEP_SEED - n)
        for _ in range(60):
            z = rng.integers(0, 4, size=n) * (rng.random(n) < 0.3)
            if not z.any():
                continue
            outcome = round_prefix(z)

            assert outcome.achieved_ratio >= prefix_guarantee(n) - 1e-12
            assert outcome.support == round_prefix(2.5 * z.astype(float)).support


class TestBruteForce:
    """Test the enumeration reference"""

    def test_limit(self):
        """Test that more than 20 coordinates are refused"""
        with pytest.raises(RoundingError):
            brute_force_best(np.ones(21))

    def test_small_example(self):
        """Test (1, 1, 0): the two ones"""
        ratio, support = brute_force_best([1.0, 1.0, 0.0])

        assert ratio == pytest.approx(1.0)
        assert support == (0, 1)


class TestTightnessFamily:
    """Test the harmonic root vectors"""

    def test_vector(self):
        """Test (1, 1/sqrt(2), 1/sqrt(3))"""
        assert np.allclose(harmonic_root_vector(3), [1.0, 1.0 / math.sqrt(2.0), 1.0 / math.sqrt(3.0)])

    def test_domain(self):
        """Test that n must be positive"""
        with pytest.raises(ValueError):
            harmonic_root_vector(0)

    @pytest.mark.parametrize("n", [2, 3, 5, 10, 32, 64])
    def test_ratio_below_upper_bound(self, n):
        """Test max ratio < 2 / sqrt(ln n)"""
        ratio = round_prefix(harmonic_root_vector(n)).achieved_ratio

        assert ratio < 2.0 / math.sqrt(math.log(n))

    @pytest.mark.parametrize("n", [4, 16, 64])
    def test_projection_example(self, n):
        """Test that the projection ratio equals the prefix ratio"""
        report = projection_beta_ratio(n)

        assert report['ratio'] == pytest.approx(report['prefix_ratio'], rel=1e-10)
        assert report['guarantee'] <= report['ratio'] < report['upper']

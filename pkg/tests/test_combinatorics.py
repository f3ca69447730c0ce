from fractions import Fraction
from math import comb

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import spaces_under_test
from oracles import gamma_bruteforce, jensen_lhs_bruteforce, rademacher_bruteforce

from dimfree import (
    CapacityError,
    ColoredPointSet,
    InputError,
    NormSpec,
    PointSet,
    balanced_subset_count,
    enumerate_balanced_subsets,
    euclidean,
    gamma_coefficient,
    gamma_coefficient_exact,
    jensen_inequality_check,
    norm,
    sample_balanced_subset,
)

L2 = euclidean()


class TestGamma:
    def test_frozen_values(self):
        assert gamma_coefficient_exact(4, 2) == Fraction(5, 8)
        assert gamma_coefficient_exact(2, 1) == Fraction(1, 2)
        assert gamma_coefficient_exact(6, 3) == Fraction(11, 16)

    def test_in_half_one_range(self):
        # boundary 1/2 is attained exactly at (2, 1)
        for n in range(2, 41):
            for d in range(1, n):
                g = gamma_coefficient_exact(n, d)
                assert Fraction(1, 2) <= g < 1, (n, d, g)

    def test_matches_double_sum_bruteforce(self):
        for n in range(2, 7):
            for d in range(1, n):
                assert gamma_coefficient_exact(n, d) == gamma_bruteforce(n, d)

    def test_symmetry_observed(self):
        # not asserted as an API contract, but it does hold numerically
        for n in range(2, 26):
            for d in range(1, n):
                assert gamma_coefficient_exact(n, d) == gamma_coefficient_exact(
                    n, n - d
                )

    def test_out_of_range(self):
        with pytest.raises(InputError):
            gamma_coefficient(4, 0)
        with pytest.raises(InputError):
            gamma_coefficient(4, 4)
        with pytest.raises(InputError):
            gamma_coefficient(1, 1)

    def test_big_n_exact(self):
        # binom(64, 32) overflows 64-bit products; must still be exact
        g = gamma_coefficient_exact(64, 32)
        assert Fraction(1, 2) < g < 1


def _cset(rng, r, n, dim):
    pts = rng.normal(size=(r * n, dim))
    return ColoredPointSet(
        tuple(PointSet(pts[i * n : (i + 1) * n]) for i in range(r))
    )


class TestEnumeration:
    @pytest.mark.parametrize(
        "r,n,d,count",
        [(1, 2, 1, 2), (2, 2, 1, 4), (2, 4, 2, 36)],
    )
    def test_counts(self, rng, r, n, d, count):
        cs = _cset(rng, r, n, 3)
        subs = list(enumerate_balanced_subsets(cs, d))
        assert len(subs) == count == balanced_subset_count(n, d, r)
        assert len(set(s.per_color for s in subs)) == count

    def test_each_subset_balanced(self, rng):
        cs = _cset(rng, 2, 4, 2)
        for s in enumerate_balanced_subsets(cs, 2):
            assert all(len(ix) == 2 for ix in s.per_color)
            assert all(len(set(ix)) == 2 for ix in s.per_color)

    def test_capacity_error_carries_count(self, rng):
        cs = _cset(rng, 4, 16, 2)
        with pytest.raises(CapacityError) as exc:
            list(enumerate_balanced_subsets(cs, 8))
        assert exc.value.count == comb(16, 8) ** 4


class TestSampling:
    def test_full_set_when_d_equals_n(self, rng):
        cs = _cset(rng, 2, 3, 2)
        s = sample_balanced_subset(cs, 3, seed=5)
        assert s.per_color == ((0, 1, 2), (0, 1, 2))

    def test_deterministic(self, rng):
        cs = _cset(rng, 2, 5, 2)
        a = sample_balanced_subset(cs, 2, seed=11)
        b = sample_balanced_subset(cs, 2, seed=11)
        assert a == b

    def test_uniform_frequencies(self, rng):
        cs = _cset(rng, 1, 2, 2)
        hits = 0
        n_samples = 10_000
        for i in range(n_samples):
            if sample_balanced_subset(cs, 1, seed=i).per_color[0] == (0,):
                hits += 1
        assert abs(hits / n_samples - 0.5) <= 0.02


class TestJensen:
    def test_two_point_hand_case(self):
        x = np.array([2.0, 1.0])
        cs = ColoredPointSet((PointSet([x, -x]),))
        rep = jensen_inequality_check(L2, cs, 1)
        assert rep.gamma == pytest.approx(0.5)
        assert rep.lhs == pytest.approx(0.5 * norm(L2, x))
        assert rep.rhs == pytest.approx(norm(L2, x))
        assert rep.holds

    def test_all_zero_degenerate_equality(self):
        cs = ColoredPointSet(
            (PointSet([[0.0, 1e-300], [0.0, 0.0]]),)
        )
        rep = jensen_inequality_check(L2, cs, 1)
        assert rep.lhs == pytest.approx(0.0, abs=1e-250)
        assert rep.rhs == pytest.approx(0.0, abs=1e-250)
        assert rep.holds

    def test_matches_bruteforce_both_sides(self, rng):
        cs = _cset(rng, 2, 4, 3)
        rep = jensen_inequality_check(L2, cs, 2)
        nf = lambda v: norm(L2, v)
        lhs = jensen_lhs_bruteforce(nf, [c.coords for c in cs.classes], 2, rep.gamma)
        recentred = np.concatenate(
            [c.coords - c.coords.mean(axis=0) for c in cs.classes]
        )
        rhs = rademacher_bruteforce(nf, recentred)
        assert rep.lhs == pytest.approx(lhs)
        assert rep.rhs == pytest.approx(rhs)
        assert rep.holds

    def test_recentring_is_internal(self, rng):
        # a large common shift must not change either side
        cs = _cset(rng, 2, 3, 4)
        shifted = ColoredPointSet(
            tuple(PointSet(c.coords + 100.0) for c in cs.classes)
        )
        a = jensen_inequality_check(L2, cs, 1)
        b = jensen_inequality_check(L2, shifted, 1)
        assert a.lhs == pytest.approx(b.lhs)
        assert a.rhs == pytest.approx(b.rhs)

    def test_scalar_phi_abs(self, rng):
        # dim-1 points, phi = |.| (the norm): exhaustive check
        for seed in range(10):
            r = np.random.default_rng(seed)
            cs = _cset(r, 1, 4, 1)
            assert jensen_inequality_check(L2, cs, 2).holds

    @settings(max_examples=60, deadline=None)
    @given(
        seed=st.integers(min_value=0, max_value=10**6),
        r=st.integers(min_value=1, max_value=2),
        n=st.integers(min_value=2, max_value=6),
        dim=st.integers(min_value=1, max_value=5),
        qi=st.integers(min_value=0, max_value=4),
    )
    def test_holds_on_random_instances(self, seed, r, n, dim, qi):
        space = spaces_under_test()[qi]
        rng = np.random.default_rng(seed)
        cs = _cset(rng, r, n, dim)
        d = int(rng.integers(1, n))
        assert jensen_inequality_check(space, cs, d).holds

    def test_capacity_guard(self, rng):
        cs = _cset(rng, 3, 7, 2)
        with pytest.raises(CapacityError):
            jensen_inequality_check(L2, cs, 3)

    def test_d_range(self, rng):
        cs = _cset(rng, 1, 4, 2)
        with pytest.raises(InputError):
            jensen_inequality_check(L2, cs, 4)

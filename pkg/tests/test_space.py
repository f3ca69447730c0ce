import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import spaces_under_test
from oracles import rademacher_bruteforce

from dimfree import (
    CapacityError,
    ColoredPointSet,
    InputError,
    NormSpec,
    PointSet,
    bound_constant,
    centroid,
    diameter,
    euclidean,
    norm,
    rademacher_average,
    theorem_bound,
    type_inequality_check,
)

L2 = euclidean()

finite_floats = st.floats(
    min_value=-1e6, max_value=1e6, allow_nan=False, allow_infinity=False
)


class TestNormSpec:
    def test_defaults_for_q2(self):
        sp = NormSpec(2.0)
        assert sp.type_exponent == 2.0
        assert sp.type_constant == 1.0
        assert sp.w == -0.5

    def test_default_exponent_is_min_q_2(self):
        assert NormSpec(1.5).type_exponent == 1.5
        assert NormSpec(7.0).type_exponent == 2.0
        assert NormSpec(float("inf")).type_exponent == 2.0

    def test_q1_needs_explicit_exponent(self):
        with pytest.raises(InputError):
            NormSpec(1.0)
        assert NormSpec(1.0, type_exponent=1.25).w == pytest.approx(-0.2)

    @pytest.mark.parametrize("p", [0.5, 1.0, 2.5, 3.0])
    def test_exponent_range(self, p):
        with pytest.raises(InputError):
            NormSpec(2.0, type_exponent=p)

    def test_w_range(self):
        for p in np.linspace(1.01, 2.0, 23):
            w = NormSpec(2.0, type_exponent=p).w
            assert -0.5 <= w < 0.0

    def test_bad_constant(self):
        with pytest.raises(InputError):
            NormSpec(2.0, type_constant=0.0)

    def test_bad_q(self):
        with pytest.raises(InputError):
            NormSpec(0.5)


class TestNorm:
    def test_pythagorean(self):
        assert norm(L2, [3, 4]) == pytest.approx(5.0)

    def test_l1(self):
        assert norm(NormSpec(1, type_exponent=1.5), [3, -4]) == pytest.approx(7.0)

    def test_linf(self):
        assert norm(NormSpec(float("inf")), [3, -4]) == pytest.approx(4.0)

    def test_zero_iff_zero(self):
        for sp in spaces_under_test():
            assert norm(sp, [0.0, 0.0, 0.0]) == 0.0
            assert norm(sp, [0.0, 1e-12]) > 0.0

    def test_non_finite_rejected(self):
        with pytest.raises(InputError):
            norm(L2, [1.0, float("nan")])
        with pytest.raises(InputError):
            norm(L2, [float("inf"), 0.0])

    @given(
        u=st.lists(finite_floats, min_size=3, max_size=3),
        v=st.lists(finite_floats, min_size=3, max_size=3),
        c=st.floats(min_value=-100, max_value=100, allow_nan=False),
    )
    @settings(max_examples=200, deadline=None)
    def test_triangle_and_homogeneity(self, u, v, c):
        u, v = np.array(u), np.array(v)
        for sp in spaces_under_test():
            nu, nv, nuv = norm(sp, u), norm(sp, v), norm(sp, u + v)
            assert nuv <= (nu + nv) * (1 + 1e-12) + 1e-12
            assert norm(sp, c * u) == pytest.approx(abs(c) * nu, rel=1e-12, abs=1e-9)


class TestCentroidDiameter:
    def test_midpoint(self):
        assert centroid(PointSet([[0, 0], [2, 0]])) == pytest.approx([1, 0])

    def test_singleton(self):
        assert centroid(PointSet([[3.5, -1]])) == pytest.approx([3.5, -1])

    def test_mean(self):
        assert centroid(PointSet([[0, 0], [1, 0], [2, 3]])) == pytest.approx([1, 1])

    def test_empty_rejected(self):
        with pytest.raises(InputError):
            PointSet(np.zeros((0, 2)))

    def test_diameter_345(self):
        assert diameter(L2, PointSet([[0, 0], [3, 4]])) == pytest.approx(5.0)

    def test_diameter_singleton(self):
        assert diameter(L2, PointSet([[1, 2]])) == 0.0

    def test_diameter_triangle(self):
        d = diameter(L2, PointSet([[0, 0], [1, 0], [0, 1]]))
        assert d == pytest.approx(math.sqrt(2))

    def test_diameter_matches_bruteforce(self, rng):
        pts = rng.normal(size=(9, 4))
        for sp in spaces_under_test():
            want = max(
                norm(sp, pts[i] - pts[j])
                for i in range(9)
                for j in range(i + 1, 9)
            )
            assert diameter(sp, PointSet(pts)) == pytest.approx(want)


class TestColoredPointSet:
    def test_basic(self):
        cs = ColoredPointSet((PointSet([[0, 0], [1, 0]]), PointSet([[0, 1], [1, 1]])))
        assert cs.r == 2 and cs.class_size == 2 and cs.dim == 2
        assert len(cs.stacked()) == 4

    def test_unequal_sizes_rejected(self):
        with pytest.raises(InputError):
            ColoredPointSet((PointSet([[0, 0]]), PointSet([[0, 1], [1, 1]])))

    def test_shared_point_rejected(self):
        with pytest.raises(InputError):
            ColoredPointSet((PointSet([[0, 0]]), PointSet([[0, 0]])))

    def test_dim_mismatch_rejected(self):
        with pytest.raises(InputError):
            ColoredPointSet((PointSet([[0, 0]]), PointSet([[0, 0, 1]])))


class TestRademacher:
    def test_singleton(self):
        x = np.array([2.0, -1.0])
        est = rademacher_average(L2, [x])
        assert est.value == pytest.approx(norm(L2, x))

    def test_repeated_vector(self):
        e1 = [1.0, 0.0]
        assert rademacher_average(L2, [e1, e1]).value == pytest.approx(1.0)

    def test_orthonormal_pair(self):
        est = rademacher_average(L2, [[1, 0], [0, 1]])
        assert est.value == pytest.approx(math.sqrt(2))

    def test_matches_bruteforce(self, rng):
        vecs = rng.normal(size=(6, 3))
        for sp in spaces_under_test():
            want = rademacher_bruteforce(lambda v: norm(sp, v), vecs)
            assert rademacher_average(sp, vecs).value == pytest.approx(want)

    def test_permutation_invariance(self, rng):
        vecs = rng.normal(size=(7, 4))
        base = rademacher_average(L2, vecs).value
        perm = rng.permutation(7)
        assert rademacher_average(L2, vecs[perm]).value == pytest.approx(base)

    def test_negation_invariance(self, rng):
        vecs = rng.normal(size=(7, 4))
        base = rademacher_average(L2, vecs).value
        flipped = vecs.copy()
        flipped[3] *= -1
        assert rademacher_average(L2, flipped).value == pytest.approx(base)

    def test_capacity(self):
        with pytest.raises(CapacityError):
            rademacher_average(L2, np.ones((23, 2)))

    def test_monte_carlo_agrees(self, rng):
        vecs = rng.normal(size=(10, 5))
        exact = rademacher_average(L2, vecs).value
        mc = rademacher_average(L2, vecs, mode="monte_carlo", trials=20000, seed=1)
        assert abs(mc.value - exact) <= 6 * mc.stderr
        assert mc.stderr > 0

    def test_monte_carlo_deterministic(self, rng):
        vecs = rng.normal(size=(5, 3))
        a = rademacher_average(L2, vecs, mode="monte_carlo", trials=64, seed=9)
        b = rademacher_average(L2, vecs, mode="monte_carlo", trials=64, seed=9)
        assert a == b


class TestTypeInequality:
    def test_orthonormal_equality_case(self):
        rep = type_inequality_check(L2, [[1, 0], [0, 1]])
        assert rep.lhs == pytest.approx(math.sqrt(2))
        assert rep.rhs == pytest.approx(math.sqrt(2))
        assert rep.holds

    def test_singleton_any_space(self, rng):
        x = rng.normal(size=4)
        for sp in spaces_under_test():
            rep = type_inequality_check(sp, [x])
            assert rep.lhs == pytest.approx(norm(sp, x))
            assert rep.rhs >= rep.lhs * (1 - 1e-12)
            assert rep.holds

    def test_random_unit_vectors_l2(self, rng):
        # Khintchine first-moment bound: always holds at p=2, T=1
        for _ in range(20):
            vecs = rng.normal(size=(10, 6))
            vecs /= np.linalg.norm(vecs, axis=1, keepdims=True)
            assert type_inequality_check(L2, vecs).holds


class TestTheoremBound:
    def test_split_constant(self):
        assert theorem_bound(L2, "split", 1, 1.0) == pytest.approx(math.sqrt(2))

    def test_tverberg_constant(self):
        want = 2 * (math.sqrt(2) + 1)
        assert theorem_bound(L2, "tverberg", 1, 1.0) == pytest.approx(want)

    def test_selection_constant_is_doubled(self):
        assert theorem_bound(L2, "selection_or_net", 1, 1.0) == pytest.approx(
            2 * theorem_bound(L2, "tverberg", 1, 1.0)
        )

    def test_zero_diameter(self):
        for which in ("split", "tverberg", "selection_or_net"):
            assert theorem_bound(L2, which, 5, 0.0) == 0.0

    @given(
        scale=st.integers(min_value=1, max_value=10**6),
        d=st.floats(min_value=0, max_value=1e9, allow_nan=False),
    )
    @settings(max_examples=100, deadline=None)
    def test_monotone_in_scale_linear_in_d(self, scale, d):
        for sp in spaces_under_test():
            b1 = theorem_bound(sp, "tverberg", scale, d)
            b2 = theorem_bound(sp, "tverberg", scale + 1, d)
            assert b2 <= b1 * (1 + 1e-12)
            assert theorem_bound(sp, "tverberg", scale, 2.0 * d) == pytest.approx(
                2.0 * b1
            )

    def test_bad_kind(self):
        with pytest.raises(InputError):
            bound_constant(L2, "nope")

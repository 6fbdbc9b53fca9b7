import cmath
import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from charmax.discrepancy import (LatticeVector, PointSet, bound_chain_terms, dimension_scale,
                                 discrepancy_report, empirical_grid_discrepancy, etk_bound,
                                 etk_m_schedule, etk_prefactor, fh_identity_check,
                                 find_ordered_element, grid_box_coverage, lattice_vectors,
                                 ordered_middle_box_check, subgroup_point_set, weight_sum,
                                 weil_bound, weil_sum)
from charmax.errors import NotFoundError, ResourceLimitError
from charmax.numtheory import build_group_context, build_subgroup_context
from oracles import e

PAIRS = [(7, 3), (11, 5), (23, 11), (59, 29)]


def sub_of(p, q):
    return build_subgroup_context(build_group_context(p), q)


class TestPointSet:
    def test_p7_dimension_one(self):
        ps = subgroup_point_set(sub_of(7, 3), 1)
        assert ps.numerators[:, 0].tolist() == [1, 2, 4] and ps.denominator == 7
        np.testing.assert_allclose(ps.points[:, 0], [1 / 7, 2 / 7, 4 / 7])

    def test_p7_dimension_two(self):
        ps = subgroup_point_set(sub_of(7, 3), 2)
        assert ps.numerators[1].tolist() == [2, 4]
        assert ps.numerators[0].tolist() == [1, 1]

    @pytest.mark.parametrize("p,q", PAIRS)
    def test_invariants(self, p, q):
        ps = subgroup_point_set(sub_of(p, q), 3)
        assert len(ps) == q
        assert ps.points.min() >= 0 and ps.points.max() < 1
        assert ps.numerators[0].tolist() == [1, 1, 1]

    def test_csv(self):
        lines = subgroup_point_set(sub_of(7, 3), 2).to_csv().split("\n")
        assert lines[0] == "y1,y1_approx,y2,y2_approx"
        assert lines[2].startswith("2/7,0.2857142857142857,4/7,")
        assert len(lines) == 5 and lines[-1] == ""

    def test_validation(self):
        with pytest.raises(ValueError):
            PointSet.from_floats([[1.0]])
        with pytest.raises(ValueError):
            PointSet.from_rationals([[7]], 7)


class TestCoverage:
    def test_one_point_per_third(self):
        assert grid_box_coverage(PointSet.from_floats([[1 / 6], [3 / 6], [5 / 6]])) == (True, [])

    def test_floor_arithmetic(self):
        assert grid_box_coverage(PointSet.from_floats([[0.1], [0.2]])) == (False, [(1,), (2,)])

    def test_p7_fails(self):
        assert grid_box_coverage(subgroup_point_set(sub_of(7, 3), 1)) == (False, [(2,)])

    def test_budget(self):
        ps = PointSet.from_floats(np.full((1, 6), 0.5))
        with pytest.raises(ResourceLimitError):
            grid_box_coverage(ps)

    def test_exact_boundaries(self):
        # 1/3 sits exactly on a box edge and must go to box 1
        assert grid_box_coverage(PointSet.from_rationals([[0], [1], [2]], 3)) == (True, [])


class TestMiddleBox:
    def test_single_group(self):
        assert ordered_middle_box_check(PointSet.from_floats([[0.5]]), [1])
        assert not ordered_middle_box_check(PointSet.from_floats([[0.2]]), [1])

    def test_two_groups(self):
        # s = 2: six cells per axis, middle of group 1 is [1/6, 2/6), of group 2 is [4/6, 5/6)
        eps = 0.01
        ps = PointSet.from_floats([[1 / 6 + eps, 4 / 6 + eps]])
        assert ordered_middle_box_check(ps, [1, 2])
        assert not ordered_middle_box_check(ps, [2, 1])
        # 1/2 + eps opens group 2 but is not in its middle cell
        assert not ordered_middle_box_check(PointSet.from_floats([[1 / 6 + eps, 1 / 2 + eps]]), [1, 2])

    @pytest.mark.parametrize("p,q", [(59, 29), (107, 53), (227, 113)])
    def test_middle_box_implies_ordered_element(self, p, q):
        sub = sub_of(p, q)
        ps = subgroup_point_set(sub, 2)
        for sigma in itertools.permutations([1, 2]):
            if ordered_middle_box_check(ps, sigma):
                g = find_ordered_element(sub, 2, sigma)
                assert pow(g, sigma[0], p) < pow(g, sigma[1], p)


class TestETK:
    def test_weights(self):
        assert LatticeVector((0, 2, -3)).weight == 6
        assert LatticeVector((0, 0)).weight == 1

    @pytest.mark.parametrize("s,m", [(1, 1), (1, 5), (2, 3), (3, 2)])
    def test_weight_sum_closed_form(self, s, m):
        H = lattice_vectors(s, m)
        assert H.shape[0] == (2 * m + 1) ** s - 1
        direct = sum(1.0 / LatticeVector(tuple(h)).weight for h in H)
        assert weight_sum(s, m) == pytest.approx(direct, rel=1e-12)

    @pytest.mark.parametrize("s,m", [(1, 3), (2, 2), (3, 1)])
    def test_single_point(self, s, m):
        ps = PointSet.from_rationals([[1] * s], 97)
        expected = etk_prefactor(s) * (1 / m + weight_sum(s, m))
        assert etk_bound(ps, m) == pytest.approx(expected, rel=1e-12)

    @pytest.mark.parametrize("N", [2, 5, 8, 13])
    def test_equally_spaced(self, N):
        ps = PointSet.from_rationals([[k] for k in range(N)], N)
        assert etk_bound(ps, N - 1) == pytest.approx(18 / (N - 1), abs=1e-9)

    def test_float_and_rational_paths_agree(self):
        ps = subgroup_point_set(sub_of(23, 11), 2)
        floats = PointSet.from_floats(ps.points)
        assert etk_bound(ps, 4) == pytest.approx(etk_bound(floats, 4), rel=1e-10)

    def test_budget(self):
        with pytest.raises(ResourceLimitError):
            etk_bound(PointSet.from_floats(np.full((1, 6), 0.5)), 20)
        with pytest.raises(ValueError):
            etk_bound(PointSet.from_floats([[0.5]]), 0)


class TestEmpirical:
    def test_single_point(self):
        for r in (3, 6, 10):
            d = empirical_grid_discrepancy(PointSet.from_floats([[0.55]]), r)
            assert d >= 1 - 1 / r - 1e-12

    def test_equidistributed(self):
        for N in (4, 10):
            ps = PointSet.from_rationals([[k] for k in range(N)], N)
            assert empirical_grid_discrepancy(ps, N) <= 1 / N + 1e-12

    def test_two_dimensional_grid(self):
        ps = PointSet.from_rationals([[i, j] for i in range(4) for j in range(4)], 4)
        assert empirical_grid_discrepancy(ps, 4) == pytest.approx(0.0, abs=1e-12)

    def test_against_brute_force(self, rng):
        pts = rng.random((9, 2))
        r = 5
        best = 0.0
        for a1, b1, a2, b2 in itertools.product(range(r + 1), repeat=4):
            if a1 < b1 and a2 < b2:
                inside = np.sum((pts[:, 0] >= a1 / r) & (pts[:, 0] < b1 / r)
                                & (pts[:, 1] >= a2 / r) & (pts[:, 1] < b2 / r))
                best = max(best, abs(inside / 9 - (b1 - a1) * (b2 - a2) / r**2))
        assert empirical_grid_discrepancy(PointSet.from_floats(pts), r) == pytest.approx(best, abs=1e-12)

    @pytest.mark.parametrize("p,q", PAIRS)
    def test_below_etk(self, p, q):
        sub = sub_of(p, q)
        for s in (1, 2):
            ps = subgroup_point_set(sub, s)
            for m in (1, 4, 8):
                assert empirical_grid_discrepancy(ps, 3 * s) <= etk_bound(ps, m) + 1e-9


class TestWeil:
    def test_linear(self):
        for p in (5, 7, 31):
            assert abs(weil_sum(p, [3, 1])) < 1e-12

    def test_gauss_sum(self):
        assert abs(weil_sum(7, [0, 0, 1])) == pytest.approx(math.sqrt(7), abs=1e-9)
        direct = sum(e(x * x / 7) for x in range(7))
        assert weil_sum(7, [0, 0, 1]) == pytest.approx(direct, abs=1e-12)

    def test_constant_shift(self):
        base = weil_sum(11, [0, 2, 0, 5])
        shifted = weil_sum(11, [3, 2, 0, 5])
        assert shifted == pytest.approx(cmath.exp(2j * math.pi * 3 / 11) * base, abs=1e-12)

    def test_degree_conditions(self):
        with pytest.raises(ValueError):
            weil_sum(7, [1])
        with pytest.raises(ValueError):
            weil_sum(7, [1, 2, 7])
        with pytest.raises(ValueError):
            weil_sum(5, [0, 0, 0, 0, 0, 1])

    @pytest.mark.parametrize("p", [7, 11, 13, 17, 19, 23])
    def test_bound_suite(self, p):
        rng = np.random.default_rng(p)
        for deg in range(2, 6):
            for lead in range(1, p):
                coeffs = [0] * deg + [lead]
                assert abs(weil_sum(p, coeffs)) <= weil_bound(p, deg) + 1e-6
            for _ in range(500):
                coeffs = list(rng.integers(0, p, deg)) + [1]
                assert abs(weil_sum(p, coeffs)) <= weil_bound(p, deg) + 1e-6


class TestFh:
    def test_zero_vector(self):
        lhs, rhs = fh_identity_check(sub_of(11, 5), (0, 0))
        assert lhs == pytest.approx(1) and rhs == pytest.approx(1)

    def test_p7_by_direct_summation(self):
        lhs, rhs = fh_identity_check(sub_of(7, 3), LatticeVector((1,)))
        assert lhs == pytest.approx((e(1 / 7) + e(2 / 7) + e(4 / 7)) / 3, abs=1e-12)
        assert rhs == pytest.approx((-1 + sum(e(x * x / 7) for x in range(7))) / 6, abs=1e-12)
        assert abs(lhs - rhs) <= 1e-10

    @settings(max_examples=50, deadline=None)
    @given(st.lists(st.integers(-3, 3), min_size=1, max_size=4))
    def test_random_p11(self, h):
        lhs, rhs = fh_identity_check(sub_of(11, 5), h)
        assert abs(lhs - rhs) <= 1e-10

    def test_length_check(self):
        with pytest.raises(ValueError):
            fh_identity_check(sub_of(7, 3), (1, 2), s=3)


class TestOrderedElement:
    def test_dimension_one(self):
        assert find_ordered_element(sub_of(7, 3), 1, [1]) == 2

    def test_p7(self):
        assert find_ordered_element(sub_of(7, 3), 2, [1, 2]) == 2
        assert find_ordered_element(sub_of(7, 3), 2, [2, 1]) == 4

    def test_not_found(self):
        # order-3 subgroup mod 7: no element has g < g^2 < g^3 = 1
        with pytest.raises(NotFoundError):
            find_ordered_element(sub_of(7, 3), 3, [1, 2, 3])

    @pytest.mark.parametrize("p,q", [(59, 29), (107, 53)])
    def test_exact_ordering(self, p, q):
        sub = sub_of(p, q)
        for sigma in itertools.permutations([1, 2]):
            g = find_ordered_element(sub, 2, sigma)
            assert g != 1
            assert pow(g, sigma[0], p) < pow(g, sigma[1], p)

    def test_coverage_implies_everything(self):
        # find the first covered instance with s = 2 and check the implication chain
        for p, q in [(227, 113), (347, 173), (467, 233), (563, 281), (587, 293)]:
            sub = sub_of(p, q)
            ps = subgroup_point_set(sub, 2)
            covered, _ = grid_box_coverage(ps)
            if covered:
                for sigma in itertools.permutations([1, 2]):
                    assert ordered_middle_box_check(ps, sigma)
                    find_ordered_element(sub, 2, sigma)
                return
        pytest.fail("no covered instance among the test pairs")


class TestScales:
    def test_dimension_scale(self):
        assert dimension_scale(8886111, 1.0) == 4
        assert dimension_scale(7, 1.0) == 1
        prev = 0
        for p in (3, 7, 101, 10007, 1000003):
            cur = dimension_scale(p, 1.0)
            assert cur >= prev
            prev = cur
        with pytest.raises(ValueError):
            dimension_scale(2, 1.0)

    def test_m_schedule(self):
        assert etk_m_schedule(1) == 1
        assert etk_m_schedule(2) == 4
        assert etk_m_schedule(3) == 27
        assert etk_m_schedule(2, 0.5) == 2

    def test_chain_terms(self):
        terms = bound_chain_terms(107, 53, 2, 4)
        assert terms["prefactor"] == 2 * 4 * 27
        assert terms["inv_m"] == 0.25
        assert terms["coverage_target"] == pytest.approx(1 / 36)
        assert terms["weil_etk"] >= terms["prefactor"] * terms["inv_m"]

    def test_report(self):
        rep = discrepancy_report(sub_of(7, 3), 1, 4)
        assert {"s", "q", "p", "m", "etk_bound", "empirical_lower", "covered",
                "missing_count"} <= rep.keys()
        assert rep["etk_bound"] >= rep["empirical_lower"]
        assert rep["missing_count"] == 1 and rep["covered"] is False

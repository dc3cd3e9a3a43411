from fractions import Fraction as F

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from laurentnp.cyclotomic import CyclotomicInteger
from laurentnp.finite_field import SizeGuardError, build_extension
from laurentnp.oracle import (
    BatchOracle,
    LaurentCoeffVector,
    LPolynomial,
    LPolynomialError,
    _check_polynomiality,
    _sum_from_counts,
    a0_independence_check,
    absolute_trace,
    char_sum,
    curve_identity_check,
    galois_consistency_check,
    l_from_power_sums,
    l_polynomial,
    newton_polygon,
    nondegenerate_vectors,
    pi_adic_valuation,
    residue_counts,
    verify_instance,
)
from laurentnp.polygons import IntervalShape, arithmetic_polygon, hodge_polygon

from oracles import complex_sum, naive_residue_counts

KLOOSTERMAN = LaurentCoeffVector.make(3, 1, 1, [1, 0, 1])


def vec(p, d, e, a):
    return LaurentCoeffVector.make(p, d, e, a)


class TestCoeffVector:
    def test_nondegenerate(self):
        with pytest.raises(ValueError, match="a_d"):
            vec(7, 2, 1, [1, 1, 1, 0])
        with pytest.raises(ValueError, match="a_-e"):
            vec(7, 2, 1, [0, 1, 1, 1])
        with pytest.raises(ValueError, match="divides"):
            vec(3, 3, 1, [1, 1, 1, 1, 1])
        with pytest.raises(ValueError, match="coefficients"):
            vec(7, 2, 1, [1, 1, 3])

    def test_from_free(self):
        f = LaurentCoeffVector.from_free(11, IntervalShape(3, 1), [2, 3, 4, 5])
        assert f.coeffs == (2, 1, 3, 4, 5) and f[0] == 1 and f[-1] == 2

    def test_enumeration_count(self):
        assert sum(1 for _ in nondegenerate_vectors(7, IntervalShape(2, 1))) == 252
        assert sum(1 for _ in nondegenerate_vectors(11, IntervalShape(3, 1))) == 12100


class TestCharSum:
    def test_kloosterman(self):
        assert char_sum(KLOOSTERMAN, 1) == -1
        assert list(residue_counts(KLOOSTERMAN, 1)) == [0, 1, 1]

    def test_monomial(self):
        assert char_sum(vec(3, 1, 0, [0, 1]).with_a0(0), 1) == 0  # sum over F_3 of zeta^x
        f = LaurentCoeffVector.make(3, 1, 1, [1, 0, 1])
        assert char_sum(f, 1) == CyclotomicInteger.zeta(3) + CyclotomicInteger.zeta(3, 2)

    def test_trivial_counts(self):
        # the all-zero residue histogram of the torus gives q^k - 1
        assert _sum_from_counts(5, [24, 0, 0, 0, 0]) == 24

    def test_absolute_trace(self):
        F = build_extension(5, 3)
        assert absolute_trace(F, 1) == 3
        assert absolute_trace(F, F.zero) == 0

    @settings(max_examples=25)
    @given(st.sampled_from([(5, 2, 1), (7, 2, 1), (5, 3, 0), (7, 1, 2)]), st.integers(1, 2), st.data())
    def test_matches_naive(self, pde, k, data):
        p, d, e = pde
        a = data.draw(st.lists(st.integers(0, p - 1), min_size=d + e + 1, max_size=d + e + 1))
        a[-1] = a[-1] or 1
        a[0] = a[0] or 1
        f = vec(p, d, e, a)
        expected = naive_residue_counts(p, f.as_dict(), k, torus=e > 0)
        assert list(residue_counts(f, k)) == expected

    def test_guard(self):
        with pytest.raises(SizeGuardError):
            residue_counts(vec(7, 2, 1, [1, 1, 1, 1]), 3, guard=100)


class TestLPolynomial:
    def test_kloosterman(self):
        L = l_polynomial(KLOOSTERMAN)
        assert L.degree == 2
        assert L.coeffs[1] == -1 and L.coeffs[2] == 3
        assert newton_polygon(L) == hodge_polygon(IntervalShape(1, 1))

    def test_gauss_sum(self):
        L = l_polynomial(vec(5, 2, 0, [0, 0, 1]))
        assert L.degree == 1
        c = L.coeffs[1].to_complex()
        assert abs(abs(c) ** 2 - 5) < 1e-9
        assert newton_polygon(L).points == [(0, 0), (1, F(1, 2))]

    def test_first_coefficient_is_s1(self):
        f = vec(7, 2, 1, [3, 1, 2, 5])
        assert l_polynomial(f).coeffs[1] == char_sum(f, 1)

    def test_complex_embedding(self):
        f = vec(7, 2, 1, [3, 1, 2, 5])
        z = char_sum(f, 2)
        assert abs(z.to_complex() - complex_sum(7, naive_residue_counts(7, f.as_dict(), 2))) < 1e-9

    def test_degree_overshoot_detected(self):
        S = [char_sum(KLOOSTERMAN, k) for k in range(1, 5)]
        L = l_from_power_sums(3, S, 1)
        with pytest.raises(LPolynomialError):
            _check_polynomiality(L, S[1:])

    def test_inexact_division(self):
        one = CyclotomicInteger.from_int(3, 1)
        with pytest.raises(LPolynomialError):
            l_from_power_sums(3, [one, 0 * one], 2)

    def test_json(self):
        L = l_polynomial(KLOOSTERMAN)
        assert LPolynomial.from_json(3, L.to_json()).coeffs == L.coeffs

    def test_unit_polygon(self):
        L = LPolynomial(5, (CyclotomicInteger.from_int(5, 1), CyclotomicInteger.from_int(5, 1)))
        assert newton_polygon(L).points == [(0, 0), (1, 0)]

    def test_pi_adic_valuation(self):
        z = CyclotomicInteger.zeta(7)
        assert pi_adic_valuation(1 - z) == 1
        assert pi_adic_valuation(CyclotomicInteger.from_int(7, 7)) == 6

    @settings(max_examples=15)
    @given(st.lists(st.integers(0, 6), min_size=4, max_size=4))
    def test_hodge_bound_and_endpoint(self, a):
        a[0] = a[0] or 1
        a[-1] = a[-1] or 1
        f = vec(7, 2, 1, a)
        NP = newton_polygon(l_polynomial(f))
        assert NP[3] == F(3, 2)
        assert all(NP[k] >= hodge_polygon(f.shape)[k] for k in range(4))

    def test_extension_coefficients(self):
        F9 = build_extension(3, 2)
        f = LaurentCoeffVector(3, IntervalShape(1, 1), (F9.generator, F9.one, F9.one), b=2)
        L = l_polynomial(f)
        assert L.degree == 2
        assert newton_polygon(L, 2) == hodge_polygon(IntervalShape(1, 1))


class TestIdentities:
    def test_curve_identity_kloosterman(self):
        assert curve_identity_check(KLOOSTERMAN, 1)
        assert curve_identity_check(KLOOSTERMAN, 2)

    @pytest.mark.parametrize("a", [[1, 1, 1, 3], [3, 1, 0, 2], [6, 1, 5, 1]])
    @pytest.mark.parametrize("k", [1, 2])
    def test_curve_identity_f7(self, a, k):
        assert curve_identity_check(vec(7, 2, 1, a), k)

    def test_curve_identity_extension(self):
        F9 = build_extension(3, 2)
        f = LaurentCoeffVector(3, IntervalShape(1, 1), (F9.generator, F9.one, F9.one), b=2)
        assert curve_identity_check(f, 1)

    def test_a0_independence(self):
        f = vec(7, 2, 1, [1, 1, 1, 3])
        assert a0_independence_check(f, 1)
        assert a0_independence_check(f, 3)
        assert a0_independence_check(vec(11, 3, 1, [1, 1, 0, 1, 1]), 0)

    @pytest.mark.parametrize("c", [2, 3, 6])
    def test_galois(self, c):
        assert galois_consistency_check(vec(7, 2, 1, [2, 1, 4, 3]), c)


class TestVerifyInstance:
    def test_f7_generic(self):
        r = verify_instance(vec(7, 2, 1, [1, 1, 1, 3]))
        assert r.hodge_bound_ok and r.np_is_arithmetic and r.generic_match
        assert r.hasse_value != 0 and not r.counterexample

    def test_f11_degenerate_class(self):
        # a_1 = a_2 = 0 makes H vanish and the polygon leave the arithmetic one
        r = verify_instance(vec(11, 3, 1, [1, 1, 0, 0, 1]))
        assert r.hasse_value == 0 and not r.np_is_arithmetic and r.generic_match
        assert r.newton[2] > arithmetic_polygon(11, IntervalShape(3, 1))[2]

    def test_below_threshold(self):
        r = verify_instance(vec(7, 3, 2, [1, 2, 1, 3, 4, 1]))
        assert r.generic_match is None and r.stickelberger_ok is True and not r.threshold_met


class TestBatchOracle:
    def test_matches_single(self):
        shape = IntervalShape(2, 1)
        A = np.array([[1, 1, 1, 3], [3, 1, 0, 2], [6, 1, 5, 1]])
        batch = BatchOracle(7, shape).l_polynomials(A)
        for row, L in zip(A, batch):
            assert L.coeffs == l_polynomial(vec(7, 2, 1, row)).coeffs

    def test_line_case(self):
        A = np.array([[1, 2, 3, 1], [1, 0, 0, 4]])
        batch = BatchOracle(7, IntervalShape(3)).l_polynomials(A)
        for row, L in zip(A, batch):
            assert L.coeffs == l_polynomial(vec(7, 3, 0, row)).coeffs

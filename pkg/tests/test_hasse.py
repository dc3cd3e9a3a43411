import math
from fractions import Fraction as F

import pytest
from hypothesis import given, strategies as st

from laurentnp.finite_field import build_extension
from laurentnp.hasse import (
    SparseFpPolynomial,
    artin_hasse,
    enumerate_sk,
    evaluate,
    hasse_component,
    hasse_polynomial,
    lambda_mod_p,
    minimal_monomial,
    monomial_of,
    r_vector,
    tau_zero,
    unit_u_tau,
)
from laurentnp.oracle import _FieldOps
from laurentnp.polygons import IntervalShape, ThresholdWarning, is_prime, minimizing_pairs

from oracles import artin_hasse_product

S21, S31 = IntervalShape(2, 1), IntervalShape(3, 1)


def mono(shape, **exps):
    """Exponent tuple from keywords like x2=1, xm1=1 (xm1 is x_{-1})."""
    out = [0] * (shape.d + shape.e + 1)
    for name, k in exps.items():
        sub = -int(name[2:]) if name.startswith("xm") else int(name[1:])
        out[sub + shape.e] = k
    return tuple(out)


def grid():
    for p in range(5, 102):
        if not is_prime(p):
            continue
        for d in range(2, 7):
            for e in range(1, d):
                s = IntervalShape(d, e)
                if s.D % p and p > 3 * s.D:
                    yield p, s


def singleton_ks(p, s):
    return [k for k in range(1, s.d + s.e) if len(minimizing_pairs(p, s, k)) == 1]


class TestArtinHasse:
    def test_examples(self):
        assert artin_hasse(7, 2)[:3] == [1, 1, F(1, 2)]
        assert artin_hasse(3, 3)[3] == F(1, 2)

    @pytest.mark.parametrize("p", [2, 3, 5, 7, 11])
    def test_product_formula(self, p):
        assert list(artin_hasse(p, 25)) == artin_hasse_product(p, 25)

    @given(st.sampled_from([2, 3, 5, 7, 11, 13]), st.integers(0, 40))
    def test_p_integral(self, p, n):
        assert artin_hasse(p, n)[n].denominator % p != 0

    @given(st.sampled_from([5, 7, 11, 13, 17]), st.data())
    def test_factorial_below_p(self, p, data):
        n = data.draw(st.integers(0, p - 1))
        assert lambda_mod_p(p, n) == pow(math.factorial(n), -1, p)

    def test_lambda_mod_p(self):
        assert lambda_mod_p(7, 0) == 1
        assert lambda_mod_p(7, 3) == 6
        assert lambda_mod_p(11, 7) == 6


class TestRVector:
    def test_examples(self):
        assert r_vector(7, S21, 2) == {1: 3}
        assert r_vector(11, S31, 3) == {1: 5, 2: 4}
        assert r_vector(11, S31, 2) == {1: 2}

    def test_requires_singleton(self):
        with pytest.raises(ValueError, match="need exactly one"):
            r_vector(7, IntervalShape(2, 2), 2)


class TestSk:
    def test_examples(self):
        (tau,) = enumerate_sk(7, S21, 2)
        assert tau.as_dict() == {0: 0, 1: 1}
        (tau,) = enumerate_sk(11, S31, 3)
        assert tau.as_dict() == {0: 0, 1: 2, 2: 1} and tau.sign == -1
        (tau,) = enumerate_sk(11, S31, 1)
        assert tau.as_dict() == {0: 0}

    def test_units(self):
        assert unit_u_tau(7, S21, 2, enumerate_sk(7, S21, 2)[0]) == 6
        assert unit_u_tau(7, S21, 1, enumerate_sk(7, S21, 1)[0]) == 1
        assert unit_u_tau(11, S31, 3, enumerate_sk(11, S31, 3)[0]) == 10


class TestComponents:
    def test_examples(self):
        assert hasse_component(7, S21, 2).terms == {mono(S21, x2=1): 6}
        assert hasse_component(11, S31, 2).terms == {mono(S31, x1=1): 2}
        assert hasse_component(11, S31, 3).terms == {mono(S31, x3=2): 10}

    def test_hasse_polynomials(self):
        H = hasse_polynomial(7, S21).expand()
        assert H.terms == {mono(S21, x2=2, xm1=1): 6}
        assert H.pretty() == "6·x_2²·x_{-1}"
        H = hasse_polynomial(11, S31).expand()
        assert H.terms == {mono(S31, x1=1, x3=3, xm1=1): 9}
        assert H.pretty() == "9·x_1·x_3³·x_{-1}"

    def test_threshold_warning(self):
        with pytest.warns(ThresholdWarning):
            hasse_polynomial(7, IntervalShape(3, 2))

    def test_line_rejected(self):
        with pytest.raises(ValueError):
            hasse_polynomial(7, IntervalShape(3))


class TestEvaluate:
    def test_examples(self):
        H = hasse_polynomial(11, S31)
        assert evaluate(H, [1, 0, 1, 5, 1]) == 9
        assert evaluate(H, [1, 0, 0, 0, 1]) == 0
        assert evaluate(H.expand(), [1, 0, 1, 5, 1]) == 9
        x = SparseFpPolynomial.variable(11, S31, 3) * SparseFpPolynomial.variable(11, S31, -1)
        assert evaluate(x, [1, 7, 7, 7, 1]) == 1

    def test_length_mismatch(self):
        with pytest.raises(ValueError):
            evaluate(hasse_polynomial(7, S21), [1, 1, 1])

    @given(st.lists(st.integers(0, 10), min_size=5, max_size=5))
    def test_factored_matches_expanded(self, a):
        H = hasse_polynomial(11, S31)
        assert evaluate(H, a) == evaluate(H.expand(), a)
        if a[-1] == 0:
            assert evaluate(H, a) == 0

    def test_extension_field(self):
        F9 = build_extension(3, 2)
        H = SparseFpPolynomial(3, IntervalShape(1, 1), {(1, 0, 1): 2})
        g = F9.generator
        val = H.evaluate({-1: g, 0: F9.one, 1: g}, _FieldOps(F9))
        assert val == F9.mul(F9.from_int(2), F9.mul(g, g))

    def test_json_round_trip(self):
        H = hasse_polynomial(11, S31).expand()
        obj = H.to_json()
        assert obj["terms"] == [{"exponents": {"-1": 1, "1": 1, "3": 3}, "coeff": 9}]
        assert SparseFpPolynomial.from_json(obj) == H


class TestMinimalMonomial:
    def test_examples(self):
        mm = minimal_monomial(7, S21, 2)
        assert mm.monomial == mono(S21, x2=1) and mm.multiplicity == 1 and mm.tau0_attains
        mm = minimal_monomial(11, S31, 3)
        assert mm.monomial == mono(S31, x3=2) and mm.multiplicity == 1


class TestGridInvariants:
    """Structural claims over the full grid 5 <= p <= 101, 1 <= e < d <= 6, p > 3D."""

    def test_r_vector_bounds(self):
        for p, s in grid():
            for k in singleton_ks(p, s):
                ((m, n),) = minimizing_pairs(p, s, k)
                r = r_vector(p, s, k)
                pos = [r[i] for i in range(1, n + 1)]
                neg = [r[i] for i in range(-m, 0)]
                assert len(set(pos)) == len(pos) and len(set(neg)) == len(neg)
                assert all(x <= n + s.d for x in pos) and all(x <= m + s.e for x in neg)

    def test_tau0_and_degrees(self):
        for p, s in grid():
            for k in singleton_ks(p, s):
                ((m, n),) = minimizing_pairs(p, s, k)
                sk = enumerate_sk(p, s, k)
                assert tau_zero(p, s, k) in sk
                assert minimal_monomial(p, s, k).tau0_attains
                assert hasse_component(p, s, k).total_degrees() == {m + n}

    def test_divisibility(self):
        for p, s in list(grid())[::7]:
            H = hasse_polynomial(p, s).expand()
            assert H.divisible_by(s.d) and H.divisible_by(-s.e)

    def test_monomials_use_valid_subscripts(self):
        for p, s in list(grid())[::5]:
            for k in singleton_ks(p, s):
                r = r_vector(p, s, k)
                for tau in enumerate_sk(p, s, k):
                    assert sum(monomial_of(s, r, tau)) == tau.m + tau.n

from fractions import Fraction

import pytest
from mpmath import mp, mpf

from padic_rama.errors import (
    BadPrime,
    GuardExhausted,
    InvariantViolation,
    NegativeValuationSum,
)
from padic_rama.exactnum import reduce_rational
from padic_rama.series import (
    ClosedForm,
    SeriesSpec,
    numeric_sum,
    pochhammer,
    rhs_value,
    term_exact,
    truncated_sum_exact,
    truncated_sum_mod,
)

F = Fraction


def make_spec(**kw):
    defaults = dict(
        name="test",
        upper=(F(1, 2),),
        lower=(F(1),),
        sign=1,
        base=F(1, 4),
        poly=(F(1),),
        denom_linear=None,
        multiplier=F(1),
        rhs=ClosedForm(F(1)),
    )
    defaults.update(kw)
    return SeriesSpec(**defaults)


ZERO_POLY = dict(poly=(F(0),))


class TestPochhammer:
    def test_empty_product(self):
        assert pochhammer(F(1, 2), 0) == 1

    def test_half_cubed(self):
        assert pochhammer(F(1, 2), 3) == F(15, 8)  # (1/2)(3/2)(5/2)

    def test_factorial_case(self):
        for n in range(8):
            want = 1
            for k in range(1, n + 1):
                want *= k
            assert pochhammer(1, n) == want


class TestTermExact:
    def test_eq2_first_terms(self, series):
        eq2 = series["eq2"]
        assert term_exact(eq2, 0) == 1
        assert term_exact(eq2, 1) == F(-29, 128)

    def test_eq6_constant_term(self, series):
        assert term_exact(series["eq6"], 0) == 7

    def test_ratio_recurrence_matches_products(self, series):
        for name in ("eq2", "eq15"):
            spec = series[name]
            h = spec.multiplier
            for n in range(51):
                direct = term_exact(spec, n)
                incremental = h * spec.poly_at(n) / spec.linear_at(n)
                assert incremental == direct, (name, n)
                h *= spec.hyper_ratio(n)


class TestTruncatedSumExact:
    def test_matches_term_by_term_oracle(self, series):
        for spec in series.values():
            for p in (5, 7, 11, 13):
                direct = sum(term_exact(spec, n) for n in range(p))
                assert truncated_sum_exact(spec, p) == direct

    def test_zero_poly(self):
        assert truncated_sum_exact(make_spec(**ZERO_POLY), 11) == 0

    def test_eq2_p5_congruence_shape(self, series):
        # S_5 = 5^2 - (7/2) zeta(-1) 5^5 (mod 5^6)
        s = truncated_sum_exact(series["eq2"], 5)
        rhs = F(25) - F(7, 2) * F(-1, 12) * F(5) ** 5
        diff = s - rhs
        assert diff.denominator % 5 != 0
        assert diff.numerator % 5**6 == 0

    def test_eq6_p7_leading_digit(self, series):
        s = truncated_sum_exact(series["eq6"], 7)
        diff = s - 7
        assert diff.denominator % 7 != 0
        assert diff.numerator % 7**3 == 0


class TestTruncatedSumMod:
    def test_oracle_equivalence_all_fixtures(self, series):
        # the core cross-check: modular path == reduced exact path
        for spec in series.values():
            for p in (5, 7, 11, 13, 17, 19, 23, 29, 31):
                try:
                    got = truncated_sum_mod(spec, p, 8)
                except BadPrime:
                    continue
                want = reduce_rational(truncated_sum_exact(spec, p), p, 8)
                for m in range(1, 9):
                    assert got.residue(m) == want.residue(m), (spec.name, p, m)

    def test_eq15_transient_valuations_cancel(self, series):
        # at p=11, n=5 the 2n+1 factor and an upper parameter both carry p
        r = truncated_sum_mod(series["eq15"], 11, 4)
        want = reduce_rational(truncated_sum_exact(series["eq15"], 11), 11, 4)
        assert r.residue(4) == want.residue(4)

    def test_zero_poly_is_exact_zero(self):
        assert truncated_sum_mod(make_spec(**ZERO_POLY), 11, 4).is_zero

    def test_bad_prime(self, series):
        with pytest.raises(BadPrime):
            truncated_sum_mod(series["eq2"], 2, 4)  # 2 divides base denominator
        with pytest.raises(BadPrime):
            truncated_sum_mod(series["eq9"], 5, 4)  # 5 divides 80^3

    def test_negative_valuation_sum(self):
        # sum of 1/(2n+1) over n < 5 has a bare 1/5 term
        spec = make_spec(upper=(F(1),), lower=(F(1),), denom_linear=(F(2), F(1)))
        with pytest.raises(NegativeValuationSum):
            truncated_sum_mod(spec, 5, 2)

    def test_guard_exhausted(self):
        # forty lower-parameter copies of 1/2 drive the valuation to -40 < -32
        spec = make_spec(upper=(F(1),) * 40, lower=(F(1, 2),) * 40)
        with pytest.raises(GuardExhausted):
            truncated_sum_mod(spec, 5, 1)


class TestNumericSum:
    def test_error_bound_honest(self, series):
        for spec in series.values():
            v128, b128 = numeric_sum(spec, 128)
            v256, _ = numeric_sum(spec, 256)
            with mp.workprec(300):
                assert abs(v128 - v256) < b128, spec.name

    def test_term_ratio_approaches_signed_base(self, series):
        spec = series["eq2"]
        n = 1000
        ratio = spec.hyper_ratio(n) * spec.poly_at(n + 1) / spec.poly_at(n)
        assert abs(ratio - spec.sign * spec.base) < F(1, n)

    def test_zero_poly(self):
        v, b = numeric_sum(make_spec(**ZERO_POLY), 128)
        assert v == 0


class TestRhsValue:
    def test_eight_over_pi_squared(self, series):
        v = rhs_value(series["eq2"], 128)
        assert mp.nstr(v, 18) == "0.810569469138702172"

    def test_plain_integer(self, series):
        assert rhs_value(series["eq6"], 128) == 8

    def test_sqrt23_over_pi(self, series):
        with mp.workprec(160):
            want = mp.sqrt(23) / mp.pi
            assert abs(rhs_value(series["eq15"], 128) - want) < mpf(2) ** -120


class TestSpecInvariants:
    def test_base_range(self):
        with pytest.raises(InvariantViolation):
            make_spec(base=F(5, 4))
        with pytest.raises(InvariantViolation):
            make_spec(base=F(-1, 4))

    def test_parameter_range(self):
        with pytest.raises(InvariantViolation):
            make_spec(upper=(F(3, 2),))
        with pytest.raises(InvariantViolation):
            make_spec(lower=(F(0),))

    def test_poly_leading_coefficient(self):
        with pytest.raises(InvariantViolation):
            make_spec(poly=(F(1), F(0)))
        make_spec(**ZERO_POLY)  # the single-coefficient zero polynomial is fine

    def test_linear_denominator_must_not_vanish(self):
        with pytest.raises(InvariantViolation):
            make_spec(denom_linear=(F(1), F(-2)))
        with pytest.raises(InvariantViolation):
            make_spec(denom_linear=(F(-1), F(1)))
        make_spec(denom_linear=(F(2), F(-1, 3)))

    def test_sign_domain(self):
        with pytest.raises(InvariantViolation):
            make_spec(sign=2)

    def test_parameter_lists_must_balance(self):
        with pytest.raises(InvariantViolation):
            make_spec(upper=(F(1, 2), F(1, 2)), lower=(F(1),))

    def test_scaled(self, series):
        eq15 = series["eq15"]
        assert eq15.scaled(F(529, 3)).multiplier == 1
        assert eq15.scaled(F(1)) is eq15

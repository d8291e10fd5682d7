import math

import pytest

from exphardy.constants import (
    bliss_constant,
    c_n,
    gamma,
    harmonic,
    moser_bound,
    rough_constants,
    sharp_coefficient,
    sphere_volume,
)
from exphardy.errors import AboveThreshold, BelowThreshold, InvalidParam
from exphardy.quadrature import integrate_halfline


class TestSharpCoefficient:
    def test_spot_values(self):
        assert sharp_coefficient(2.0) == 0.5
        assert sharp_coefficient(3.0) == pytest.approx(4.0 / 9.0, abs=1e-16)

    def test_limit_toward_one(self):
        # matches the coefficient 1 of the n = 1 endpoint statement
        assert sharp_coefficient(1.0 + 1e-9) == pytest.approx(1.0, abs=1e-7)

    def test_range(self):
        for n in (1.2, 2.0, 5.0, 40.0):
            assert math.exp(-1.0) < sharp_coefficient(n) < 1.0

    def test_invalid(self):
        with pytest.raises(InvalidParam):
            sharp_coefficient(1.0)


class TestCn:
    def test_integer_values_are_harmonic_numbers(self):
        assert c_n(2.0) == pytest.approx(1.0, abs=1e-15)
        assert c_n(4.0) == pytest.approx(11.0 / 6.0, abs=1e-15)
        for m in range(2, 9):
            assert c_n(float(m)) == pytest.approx(harmonic(m - 1), abs=1e-13)

    def test_fractional_value(self):
        # hand-derived: integral part is 2 - 2 ln 2, sum part is 1/(2.5 - 1)
        expected = 2.0 - 2.0 * math.log(2.0) + 2.0 / 3.0
        assert c_n(2.5) == pytest.approx(expected, abs=1e-10)

    def test_below_two_has_empty_sum(self):
        # 1 < n < 2: only the integral term survives
        assert c_n(1.5) == pytest.approx(2.0 - 2.0 * math.log(2.0), abs=1e-10)

    @pytest.mark.parametrize("m", [2.0, 3.0, 4.0])
    def test_continuity_at_integers(self, m):
        for eps in (1e-6, -1e-6):
            assert abs(c_n(m + eps) - c_n(m)) < 1e-4

    def test_invalid(self):
        with pytest.raises(InvalidParam):
            c_n(1.0)


class TestGamma:
    def test_against_stdlib(self):
        xs = [0.5, 1.0, 1.5, 2.0, 3.7, 7.25, 12.0, 25.5, 50.0]
        for x in xs:
            assert gamma(x) == pytest.approx(math.gamma(x), rel=1e-12)

    def test_factorials(self):
        assert gamma(4.0) == pytest.approx(6.0, rel=1e-13)
        assert gamma(6.0) == pytest.approx(120.0, rel=1e-13)

    def test_pole(self):
        with pytest.raises(InvalidParam):
            gamma(0.0)


class TestRoughConstants:
    def test_unit_beta_n2(self):
        c, c1 = rough_constants(2.0, 1.0)
        assert c == pytest.approx(1.0, abs=1e-15)
        assert c1 == pytest.approx(0.0, abs=1e-15)

    def test_unit_beta_n3(self):
        c, _ = rough_constants(3.0, 1.0)
        assert c == pytest.approx(1.0, abs=1e-15)

    def test_threshold_equality_raises(self):
        with pytest.raises(BelowThreshold):
            rough_constants(2.0, math.sqrt(0.5))

    def test_monotone_blowup_toward_threshold(self):
        threshold = math.sqrt(0.5)
        cs = [rough_constants(2.0, threshold * (1.0 + 10.0**-k))[0] for k in range(1, 9)]
        assert all(b > a for a, b in zip(cs, cs[1:]))
        assert cs[-1] > 1e6

    def test_decreasing_in_beta(self):
        c_low, _ = rough_constants(2.0, 0.9)
        c_high, _ = rough_constants(2.0, 1.5)
        assert c_low > c_high


class TestMoserBound:
    def test_unit_case(self):
        assert moser_bound(2.0, 1.0, 1.0) == pytest.approx(1.0, abs=1e-15)

    def test_threshold(self):
        with pytest.raises(AboveThreshold):
            moser_bound(2.0, 1.0, 2.0)

    def test_small_energy_budget(self):
        # a^{1/(n-1)} = 1/4 at n = 2, so the bound is 1/(2 - 1/4) = 4/7
        assert moser_bound(2.0, 0.25, 1.0) == pytest.approx(4.0 / 7.0, abs=1e-15)

    @pytest.mark.parametrize(
        "n,a,beta", [(2.0, 1.0, 1.0), (2.0, 0.25, 1.0), (3.0, 2.0, 1.5), (2.5, 0.7, 2.0)]
    )
    def test_matches_halfline_integral(self, n, a, beta):
        rate = beta * a ** (1.0 / (n - 1.0)) - n
        direct = integrate_halfline(lambda r: math.exp(rate * r)).value
        assert moser_bound(n, a, beta) == pytest.approx(direct, abs=1e-10)


class TestBlissConstant:
    def test_k2_l4(self):
        # alpha = 1: C_b = (1/2) Gamma(4)/(Gamma(1) Gamma(3)) = 3/2
        params = bliss_constant(2.0, 4.0)
        assert params.alpha == pytest.approx(1.0, abs=1e-15)
        assert params.c_b == pytest.approx(1.5, rel=1e-12)

    def test_k3_l6(self):
        # alpha = 1: C_b = (1/4) Gamma(6)/(Gamma(1) Gamma(5)) = 5/4
        assert bliss_constant(3.0, 6.0).c_b == pytest.approx(1.25, rel=1e-12)

    def test_requires_l_above_k(self):
        with pytest.raises(InvalidParam):
            bliss_constant(2.0, 2.0)
        with pytest.raises(InvalidParam):
            bliss_constant(1.0, 4.0)


class TestSphereVolume:
    def test_values(self):
        assert sphere_volume(1) == pytest.approx(2.0 * math.pi, rel=1e-13)
        assert sphere_volume(2) == pytest.approx(4.0 * math.pi, rel=1e-13)
        assert sphere_volume(3) == pytest.approx(2.0 * math.pi**2, rel=1e-13)

    def test_invalid(self):
        with pytest.raises(InvalidParam):
            sphere_volume(0)
        with pytest.raises(InvalidParam):
            sphere_volume(2.0)  # type: ignore[arg-type]

import io
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from exphardy.errors import (
    DegenerateInput,
    InvalidParam,
    NegativeValues,
    NonFinite,
)
from exphardy.extremals import ExtremalParams, bliss_extremal, graded_grid, sample_extremal
from exphardy.quadrature import QuadratureSpec, integrate
from exphardy.radial import (
    Grid,
    RadialFunction,
    Statement,
    bliss_ratio,
    deficit,
    deficit_n1,
    energy,
    moser_functional,
    profile_csv_string,
    random_admissible,
    read_profile_csv,
    sample,
    tail_bound,
    total_variation,
    weighted_mass,
    weighted_mass_above,
    write_profile_csv,
)


@pytest.fixture
def ramp():
    # u(r) = min(r, 1), constant beyond the grid end
    grid = Grid([0.0, 1.0, 8.0])
    return RadialFunction(grid, [0.0, 1.0, 1.0])


class TestGridAndFunction:
    def test_grid_validation(self):
        with pytest.raises(InvalidParam):
            Grid([0.0, 1.0])  # fewer than 3 nodes
        with pytest.raises(InvalidParam):
            Grid([0.1, 1.0, 2.0])  # must start at 0
        with pytest.raises(InvalidParam):
            Grid([0.0, 1.0, 1.0])  # not strictly increasing

    def test_function_validation(self):
        grid = Grid([0.0, 1.0, 2.0])
        with pytest.raises(InvalidParam):
            RadialFunction(grid, [0.5, 1.0, 1.0])  # u(0) != 0
        with pytest.raises(NonFinite):
            RadialFunction(grid, [0.0, math.inf, 1.0])
        with pytest.raises(InvalidParam):
            RadialFunction(grid, [0.0, 1.0])

    def test_constant_extension(self, ramp):
        assert ramp(100.0) == 1.0
        assert ramp(0.5) == pytest.approx(0.5)

    def test_sample_requires_zero_at_origin(self):
        grid = Grid([0.0, 1.0, 2.0])
        with pytest.raises(InvalidParam):
            sample(lambda r: r + 1.0, grid)

    def test_csv_round_trip_bit_exact(self):
        grid = Grid([0.0, 1.0 / 3.0, math.pi, 7.000000001])
        u = RadialFunction(grid, [0.0, 0.1 + 0.2, math.sqrt(2.0), 1e-17])
        buf = io.StringIO(profile_csv_string(u))
        back = read_profile_csv(buf)
        assert np.array_equal(back.grid.nodes, grid.nodes)
        assert np.array_equal(back.values, u.values)

    def test_csv_file_round_trip(self, tmp_path):
        u = random_admissible(3, 6, 9.0, 2.0)
        path = tmp_path / "profile.csv"
        write_profile_csv(u, str(path))
        back = read_profile_csv(str(path))
        assert np.array_equal(back.values, u.values)

    def test_csv_header_check(self):
        with pytest.raises(InvalidParam):
            read_profile_csv(io.StringIO("x,y\n0,0\n"))


class TestEnergyAndMass:
    def test_zero_function(self):
        u = RadialFunction(Grid([0.0, 1.0, 2.0]), [0.0, 0.0, 0.0])
        assert energy(u, 2.0) == 0.0

    def test_unit_ramp(self, ramp):
        assert energy(ramp, 2.0) == pytest.approx(1.0, abs=1e-15)
        assert total_variation(ramp) == pytest.approx(1.0)

    def test_extremal_energy_on_dense_grid(self):
        p = ExtremalParams(2.0, 1.0)
        u = sample_extremal(p, graded_grid(p, 4000))
        assert energy(u, 2.0) == pytest.approx(2.0 * math.log(2.0) - 1.0, abs=1e-5)

    def test_energy_invalid_exponent(self, ramp):
        with pytest.raises(InvalidParam):
            energy(ramp, 0.5)

    def test_mass_of_zero_function(self):
        u = RadialFunction(Grid([0.0, 5.0, 30.0]), [0.0, 0.0, 0.0])
        for n in (2.0, 3.0):
            mass, tail = weighted_mass(u, n)
            assert mass + tail == pytest.approx(1.0 / n, abs=1e-14)

    def test_extremal_mass(self):
        p = ExtremalParams(2.0, 1.0)
        u = sample_extremal(p, graded_grid(p, 4000))
        mass, tail = weighted_mass(u, 2.0)
        assert mass + tail == pytest.approx(1.0, abs=1e-6)

    def test_mass_against_adaptive_quadrature(self):
        # the cellwise closed form must agree with the independent oracle
        spec = QuadratureSpec(1e-12, 1e-12, 4000)
        for seed in range(5):
            u = random_admissible(seed, 7, 9.0, 2.5)
            for n in (1.0, 2.0, 3.5):
                mass, _ = weighted_mass(u, n)
                nodes = u.grid.nodes
                oracle = sum(
                    integrate(
                        lambda r: math.exp(n * (float(u(r)) - r)),
                        nodes[i],
                        nodes[i + 1],
                        spec,
                    ).value
                    for i in range(len(nodes) - 1)
                )
                assert mass == pytest.approx(oracle, abs=1e-9)

    def test_mass_above(self):
        u = RadialFunction(Grid([0.0, 5.0, 30.0]), [0.0, 0.0, 0.0])
        # int_R^inf e^{-2r} = e^{-2R}/2
        for r0 in (0.0, 1.0, 7.0, 31.0):
            assert weighted_mass_above(u, 2.0, r0) == pytest.approx(
                math.exp(-2.0 * r0) / 2.0, rel=1e-12
            )


class TestDeficit:
    def test_zero_function_consistent(self):
        u = RadialFunction(Grid([0.0, 4.0, 25.0]), [0.0, 0.0, 0.0])
        rep = deficit(u, 2.0, Statement.CONSISTENT)
        assert rep.lhs == pytest.approx(0.0, abs=1e-14)
        assert rep.deficit == pytest.approx(1.0, abs=1e-14)

    def test_extremal_n2(self):
        p = ExtremalParams(2.0, 1.0)
        u = sample_extremal(p, graded_grid(p, 4000))
        rep = deficit(u, 2.0, Statement.CONSISTENT)
        assert rep.deficit == pytest.approx(0.5, abs=2e-5)

    def test_extremal_fractional_n(self):
        # frozen from the truncated-integral expression evaluated by the
        # antiderivative 2s - 2 ln(1+s), s = sqrt(1-t), plus (2/3)(1-2^{-3/2})
        s0 = math.sqrt(0.5)
        oracle = (
            (2.0 - 2.0 * math.log(2.0))
            - (2.0 * s0 - 2.0 * math.log(1.0 + s0))
            + (1.0 / 1.5) * (1.0 - 2.0**-1.5)
        )
        assert oracle == pytest.approx(0.7000564762573060, abs=1e-12)
        p = ExtremalParams(2.5, 1.0)
        assert p.a == pytest.approx(0.8)
        u = sample_extremal(p, graded_grid(p, 4000))
        rep = deficit(u, 2.5, Statement.CONSISTENT)
        assert rep.deficit == pytest.approx(oracle, abs=2e-5)

    def test_rejects_negative_values(self):
        u = RadialFunction(Grid([0.0, 1.0, 2.0]), [0.0, -0.1, 0.5])
        with pytest.raises(NegativeValues):
            deficit(u, 2.0)

    def test_statement_gap_is_log_n(self):
        for seed in range(25):
            u = random_admissible(seed, 8, 10.0, 3.0)
            for n in (1.5, 2.0, 2.5, 3.0, 4.0):
                gap = (
                    deficit(u, n, Statement.AS_PRINTED).deficit
                    - deficit(u, n, Statement.CONSISTENT).deficit
                )
                assert gap == pytest.approx(math.log(n), abs=1e-12)

    def test_n1_statement_requires_dedicated_op(self, ramp):
        with pytest.raises(InvalidParam):
            deficit(ramp, 2.0, Statement.N1)

    def test_report_fields(self, ramp):
        rep = deficit(ramp, 2.0)
        assert rep.deficit == rep.rhs - rep.lhs
        assert rep.mass > 0
        assert rep.energy >= 0
        assert rep.quad_error >= 0


class TestDeficitN1:
    def test_zero_function_is_equality(self):
        u = RadialFunction(Grid([0.0, 4.0, 25.0]), [0.0, 0.0, 0.0])
        rep = deficit_n1(u)
        assert abs(rep.deficit) <= 1e-9

    def test_unit_ramp(self, ramp):
        # mass = int_0^1 1 dr + e * int_1^inf e^{-r} = 2 exactly
        rep = deficit_n1(ramp)
        assert rep.lhs == pytest.approx(math.log(2.0), abs=1e-12)
        assert rep.rhs == pytest.approx(1.0, abs=1e-15)
        assert rep.deficit >= 0.0

    def test_half_ramp(self):
        u = RadialFunction(Grid([0.0, 1.0, 9.0]), [0.0, 0.5, 0.5])
        assert deficit_n1(u).deficit >= 0.0


class TestMoserFunctional:
    def test_zero_function(self):
        u = RadialFunction(Grid([0.0, 4.0, 22.0]), [0.0, 0.0, 0.0])
        assert moser_functional(u, 2.0, 1.0) == pytest.approx(0.5, abs=1e-11)

    def test_beta_zero(self):
        u = random_admissible(5, 6, 8.0, 2.0)
        for n in (2.0, 3.0):
            assert moser_functional(u, n, 0.0) == pytest.approx(1.0 / n, abs=1e-10)

    def test_unit_energy_ramp_below_bound(self, ramp):
        assert energy(ramp, 2.0) == pytest.approx(1.0)
        value = moser_functional(ramp, 2.0, 1.0)
        assert value <= 1.0 + 1e-8  # bound C_{beta,a} = 1 at n=2, a=1, beta=1

    def test_rejects_negative(self):
        u = RadialFunction(Grid([0.0, 1.0, 2.0]), [0.0, -0.5, 0.0])
        with pytest.raises(NegativeValues):
            moser_functional(u, 2.0, 1.0)


class TestTailBound:
    def test_zero_function_values(self):
        u = RadialFunction(Grid([0.0, 4.0, 22.0]), [0.0, 0.0, 0.0])
        assert tail_bound(u, 2.0, 1.0, 0.0) == pytest.approx(1.0, abs=1e-14)
        assert tail_bound(u, 2.0, 1.0, math.log(4.0)) == pytest.approx(0.25, abs=1e-14)

    def test_decreasing_in_r(self):
        u = random_admissible(2, 6, 8.0, 1.5)
        bounds = [tail_bound(u, 2.0, 1.0, r0) for r0 in (0.0, 1.0, 3.0, 10.0, 40.0)]
        assert all(b < a for a, b in zip(bounds, bounds[1:]))

    def test_dominates_measured_tail(self):
        for seed in range(40):
            u = random_admissible(seed, 6, 8.0, 1.5)
            for r0 in (0.0, 1.0, 2.0, 5.0):
                measured = weighted_mass_above(u, 2.0, r0)
                assert measured <= tail_bound(u, 2.0, 1.0, r0) + 1e-10

    def test_below_threshold(self):
        u = random_admissible(1, 4, 6.0, 1.0)
        from exphardy.errors import BelowThreshold

        with pytest.raises(BelowThreshold):
            tail_bound(u, 2.0, 0.5, 0.0)


class TestBlissRatio:
    def test_extremal_reaches_constant(self):
        # hand values: y = x/(1+x), I = int x (1+x)^{-4} = 1/6, J = 1/3
        ratio = bliss_ratio(bliss_extremal(1.0, 1.0, 1.0), 2.0, 4.0, 4000.0)
        assert ratio == pytest.approx(1.5, rel=1e-6)

    def test_extremal_k3_l6(self):
        ratio = bliss_ratio(bliss_extremal(1.0, 1.0, 1.0), 3.0, 6.0, 4000.0)
        assert ratio == pytest.approx(1.25, rel=1e-6)

    def test_homogeneity(self):
        f = lambda x: 1.0 / (1.0 + x) ** 2
        g = lambda x: 3.0 * f(x)
        r1 = bliss_ratio(f, 2.0, 4.0, 1000.0)
        r2 = bliss_ratio(g, 2.0, 4.0, 1000.0)
        assert abs(r1 - r2) < 1e-8

    def test_scale_invariance(self):
        f = lambda x: 1.0 / (1.0 + x) ** 2
        g = lambda x: 3.0 * f(2.0 * x)
        r1 = bliss_ratio(f, 2.0, 4.0, 2000.0)
        r2 = bliss_ratio(g, 2.0, 4.0, 1000.0)  # same truncation in scaled units
        assert abs(r1 - r2) < 1e-8

    def test_sub_extremal_function(self):
        ratio = bliss_ratio(lambda x: math.exp(-x), 2.0, 4.0, 60.0)
        assert ratio < 1.5

    def test_degenerate(self):
        with pytest.raises(DegenerateInput):
            bliss_ratio(lambda x: 0.0, 2.0, 4.0, 10.0)

    def test_validation(self):
        with pytest.raises(InvalidParam):
            bliss_ratio(lambda x: 1.0, 4.0, 2.0, 10.0)


class TestRandomAdmissible:
    def test_deterministic(self):
        u1 = random_admissible(42, 8, 10.0, 3.0)
        u2 = random_admissible(42, 8, 10.0, 3.0)
        assert np.array_equal(u1.values, u2.values)
        assert np.array_equal(u1.grid.nodes, u2.grid.nodes)

    def test_zero_amplitude(self):
        u = random_admissible(7, 5, 10.0, 0.0)
        assert np.all(u.values == 0.0)

    def test_admissibility(self):
        for seed in (0, 1, 2):
            u = random_admissible(seed, 8, 10.0, 3.0)
            assert u.values[0] == 0.0
            assert u.is_nonnegative()
            assert np.max(u.values) <= 3.0
            assert u.grid.r_max == 10.0

    def test_spec_example_seed(self):
        u = random_admissible(1, 8, 10.0, 3.0)
        assert deficit(u, 2.0).deficit > 0.0

    def test_validation(self):
        with pytest.raises(InvalidParam):
            random_admissible(0, 0, 10.0, 1.0)
        with pytest.raises(InvalidParam):
            random_admissible(0, 4, -1.0, 1.0)
        with pytest.raises(InvalidParam):
            random_admissible(0, 4, 10.0, -1.0)


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10_000), st.floats(0.0, 4.0))
def test_property_consistent_deficit_positive(seed, amplitude):
    u = random_admissible(seed, 6, 9.0, amplitude)
    for n in (1.5, 2.0, 3.0):
        assert deficit(u, n, Statement.CONSISTENT).deficit > 0.0
    assert deficit_n1(u).deficit >= -1e-9

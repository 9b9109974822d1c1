import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from h2path.plantmodel import (
    DEFAULT_CONSTANTS,
    DEFAULT_PEM_EFFICIENCY,
    Compressor,
    ConvergenceError,
    EfficiencyCurve,
    Electrolyser,
    GridConnection,
    PhysicalConstants,
    efficiency_at,
    equivalent_full_load_hours,
    hydrogen_mass,
    split_power,
    split_power_array,
    stack_life_years,
)

LHV = 33.3


def brute_force_split(p_h2, eta, e_comp_kwh_per_kg, iters=1000):
    """Independent fixed-point oracle: iterate the substitution map verbatim."""
    p_pem = p_h2
    for _ in range(iters):
        rate = 1000.0 * p_pem * eta / LHV
        p_pem = p_h2 - rate * e_comp_kwh_per_kg / 1000.0
    rate = 1000.0 * p_pem * eta / LHV
    return p_pem, rate


class TestPhysicalConstants:
    def test_defaults(self):
        assert DEFAULT_CONSTANTS.lhv_kwh_per_kg == 33.3
        assert DEFAULT_CONSTANTS.hhv_kwh_per_kg == 39.4

    def test_ordering_enforced(self):
        with pytest.raises(ValueError):
            PhysicalConstants(lhv_kwh_per_kg=40.0, hhv_kwh_per_kg=39.4)


class TestEfficiencyCurve:
    def test_constant_curve(self):
        curve = EfficiencyCurve.constant(0.6746)
        assert efficiency_at(curve, 0.5) == pytest.approx(0.6746)

    def test_linear_midpoint(self):
        curve = EfficiencyCurve(((0.0, 0.70), (1.0, 0.60)))
        assert efficiency_at(curve, 0.5) == pytest.approx(0.65)

    def test_below_min_load_cuts_to_zero(self):
        curve = EfficiencyCurve.constant(0.7)
        assert efficiency_at(curve, 0.02, min_load_fraction=0.05) == 0.0
        assert efficiency_at(curve, 0.05, min_load_fraction=0.05) == pytest.approx(0.7)

    def test_array_evaluation(self):
        curve = EfficiencyCurve(((0.0, 0.70), (1.0, 0.60)))
        out = efficiency_at(curve, np.array([0.0, 0.5, 1.0]))
        assert np.allclose(out, [0.70, 0.65, 0.60])

    def test_non_increasing_loads_rejected(self):
        with pytest.raises(ValueError):
            EfficiencyCurve(((0.0, 0.7), (0.0, 0.6)))

    def test_efficiency_above_one_rejected(self):
        with pytest.raises(ValueError):
            EfficiencyCurve(((0.0, 1.2),))

    def test_scaled_caps_at_one(self):
        curve = EfficiencyCurve(((0.0, 0.95), (1.0, 0.60)))
        up = curve.scaled(0.10)
        assert up.points[0][1] == 1.0
        assert up.points[1][1] == pytest.approx(0.66)

    def test_from_csv(self, tmp_path):
        f = tmp_path / "curve.csv"
        f.write_text("load_fraction,efficiency\n0,0.70\n1,0.60\n")
        curve = EfficiencyCurve.from_csv(f)
        assert curve.points == ((0.0, 0.70), (1.0, 0.60))

    def test_from_csv_bad_header(self, tmp_path):
        f = tmp_path / "curve.csv"
        f.write_text("x,y\n0,0.7\n")
        with pytest.raises(ValueError):
            EfficiencyCurve.from_csv(f)


class TestSplitPower:
    def setup_method(self):
        self.el = Electrolyser(rated_mw=10.0)
        self.comp = Compressor()

    def test_fixed_point_matches_oracles(self):
        # closed form for constant efficiency, plus the brute-force iteration
        closed = 10.0 / (1.0 + 0.399 * DEFAULT_PEM_EFFICIENCY / LHV)
        brute, brute_rate = brute_force_split(10.0, DEFAULT_PEM_EFFICIENCY, 0.399)
        p_pem, p_comp, rate = split_power(10.0, self.el, self.comp)
        assert p_pem == pytest.approx(closed, abs=1e-9)
        assert p_pem == pytest.approx(brute, abs=1e-9)
        assert rate == pytest.approx(brute_rate, abs=1e-6)
        assert abs(p_pem + p_comp - 10.0) <= 1e-9
        assert p_pem == pytest.approx(9.9198, abs=1e-4)

    def test_zero_input(self):
        assert split_power(0.0, self.el, self.comp) == (0.0, 0.0, 0.0)

    def test_no_compression_load(self):
        comp = Compressor(energy_kwh_per_kg=0.0)
        p_pem, p_comp, _ = split_power(7.3, self.el, comp)
        assert p_pem == 7.3 and p_comp == 0.0

    def test_residual_bounded_on_dense_grid(self):
        for p_h2 in np.linspace(0.0, 10.0, 101):
            p_pem, p_comp, _ = split_power(float(p_h2), self.el, self.comp)
            assert abs(p_pem + p_comp - p_h2) <= 1e-9

    @pytest.mark.parametrize("curve", [
        EfficiencyCurve.constant(0.6746),
        EfficiencyCurve(((0.0, 0.75), (1.0, 0.62))),  # decreasing with load
    ])
    def test_monotone_in_intake(self, curve):
        el = Electrolyser(rated_mw=10.0, curve=curve)
        grid = np.linspace(0.0, 10.0, 200)
        pems, rates = [], []
        for p in grid:
            p_pem, _, rate = split_power(float(p), el, self.comp)
            pems.append(p_pem)
            rates.append(rate)
        assert np.all(np.diff(pems) >= -1e-12)
        assert np.all(np.diff(rates) >= -1e-9)

    def test_non_convergence_raises(self):
        comp = Compressor(energy_kwh_per_kg=50_000.0)
        with pytest.raises(ConvergenceError):
            split_power(10.0, self.el, comp)

    def test_array_agrees_with_scalar(self):
        rng = np.random.default_rng(42)
        intake = rng.uniform(0.0, 10.0, size=50)
        p_pem, p_comp, rate = split_power_array(intake, self.el, self.comp)
        for i, p in enumerate(intake):
            s_pem, s_comp, s_rate = split_power(float(p), self.el, self.comp)
            assert p_pem[i] == pytest.approx(s_pem, abs=1e-9)
            assert p_comp[i] == pytest.approx(s_comp, abs=1e-9)
            assert rate[i] == pytest.approx(s_rate, abs=1e-6)

    def test_negative_input_rejected(self):
        with pytest.raises(ValueError):
            split_power(-1.0, self.el, self.comp)


class TestHydrogenMass:
    def test_full_load_year_output(self):
        # electrolysis share of a rated intake, sustained for a year
        mass = hydrogen_mass(9.9198, 8760.0, DEFAULT_PEM_EFFICIENCY)
        assert mass == pytest.approx(1_760_600.0, rel=1e-3)

    def test_zero_efficiency(self):
        assert hydrogen_mass(5.0, 0.5, 0.0) == 0.0

    def test_hand_arithmetic(self):
        assert hydrogen_mass(1.0, 0.5, 0.666) == pytest.approx(10.0, rel=1e-12)

    @given(
        p=st.floats(0.0, 20.0),
        h=st.floats(0.0, 10.0),
        eta=st.floats(0.0, 1.0),
        k=st.floats(0.1, 5.0),
    )
    def test_linear_in_each_argument(self, p, h, eta, k):
        base = hydrogen_mass(p, h, eta)
        assert hydrogen_mass(k * p, h, eta) == pytest.approx(k * base, rel=1e-9, abs=1e-9)
        assert hydrogen_mass(p, k * h, eta) == pytest.approx(k * base, rel=1e-9, abs=1e-9)
        if k * eta <= 1.0:
            assert hydrogen_mass(p, h, k * eta) == pytest.approx(k * base, rel=1e-9, abs=1e-9)

    def test_negative_rejected(self):
        with pytest.raises(ValueError):
            hydrogen_mass(-1.0, 0.5, 0.6)


class TestStackLife:
    def setup_method(self):
        self.el = Electrolyser(rated_mw=10.0)

    def test_high_duty(self):
        years = stack_life_years(86_900.0, self.el)  # 8,690 h of full-load duty
        assert years == pytest.approx(60_000.0 / 8_690.0, rel=1e-12)
        assert years == pytest.approx(6.90, abs=0.01)

    def test_part_duty(self):
        years = stack_life_years(42_430.0, self.el)  # 4,243 h
        assert years == pytest.approx(60_000.0 / 4_243.0, rel=1e-12)
        assert years == pytest.approx(14.14, abs=0.01)

    def test_idle_unit_lives_forever(self):
        assert math.isinf(stack_life_years(0.0, self.el))

    def test_eflh(self):
        assert equivalent_full_load_hours(43_800.0, 10.0) == pytest.approx(4_380.0)


class TestAssetValidation:
    def test_electrolyser_bad_rating(self):
        with pytest.raises(ValueError):
            Electrolyser(rated_mw=0.0)

    def test_electrolyser_bad_min_load(self):
        with pytest.raises(ValueError):
            Electrolyser(rated_mw=10.0, min_load_fraction=1.5)

    def test_compressor_negative_energy(self):
        with pytest.raises(ValueError):
            Compressor(energy_kwh_per_kg=-0.1)

    def test_grid_share_out_of_range(self):
        with pytest.raises(ValueError):
            GridConnection(line_cost_share_h2=1.5)

    def test_grid_negative_capacity(self):
        with pytest.raises(ValueError):
            GridConnection(line_capacity_mw=-1.0)

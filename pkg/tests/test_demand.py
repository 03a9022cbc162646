import numpy as np
import pytest

from heatmix.demand import (
    DemandDrivers,
    DemandVariant,
    WaterDemandParams,
    demand_trajectory,
    ingested_trajectory,
    intensity_path,
    space_heat_demand,
    water_heat_demand,
)
from heatmix.errors import ValidationError, YearGridError


def drivers_one_year(pop=1e6, floor=30.0, hdd=3000.0, intensity=100.0, income=2e4):
    years = np.array([2020, 2021])
    return DemandDrivers(
        years=years,
        population=np.full(2, pop),
        floor_per_capita=np.full(2, floor),
        hdd=np.full(2, hdd),
        heating_intensity_kj=np.full(2, intensity),
        income_per_capita=np.full(2, income),
        new_build_fraction=np.zeros(2),
    )


class TestSpaceHeat:
    def test_hand_unit_conversion(self):
        # 1e6 * 30 * 3000 * 100 kJ = 9e12 kJ = 9e15 J; / 3.6e15 J/TWh = 2.5 TWh
        d = drivers_one_year()
        assert space_heat_demand(d, 2020) == pytest.approx(2.5e9, rel=1e-12)

    def test_multiplicative_vanishing(self):
        small = space_heat_demand(drivers_one_year(pop=1e-6), 2020)
        base = space_heat_demand(drivers_one_year(), 2020)
        assert small == pytest.approx(base * 1e-12, rel=1e-12)

    def test_linearity_in_population(self):
        base = space_heat_demand(drivers_one_year(), 2020)
        double = space_heat_demand(drivers_one_year(pop=2e6), 2020)
        assert double == pytest.approx(2 * base, rel=1e-12)

    @pytest.mark.parametrize("factor", [0.5, 3.0, 7.25])
    def test_linearity_in_each_driver(self, factor):
        base = space_heat_demand(drivers_one_year(), 2020)
        for kw in ("pop", "floor", "hdd", "intensity"):
            kwargs = {{"pop": "pop", "floor": "floor", "hdd": "hdd", "intensity": "intensity"}[kw]:
                      {"pop": 1e6, "floor": 30.0, "hdd": 3000.0, "intensity": 100.0}[kw] * factor}
            if kw == "intensity" and not 10 <= 100.0 * factor <= 300:
                continue
            scaled = space_heat_demand(drivers_one_year(**kwargs), 2020)
            assert scaled == pytest.approx(factor * base, rel=1e-12)

    def test_off_grid_year(self):
        with pytest.raises(YearGridError):
            space_heat_demand(drivers_one_year(), 1999)

    def test_nonpositive_driver_rejected(self):
        with pytest.raises(ValidationError):
            drivers_one_year(pop=0.0)

    def test_intensity_band_enforced(self):
        with pytest.raises(ValidationError):
            drivers_one_year(intensity=400.0)


class TestWaterHeat:
    params = WaterDemandParams(saturation_kwh_per_person=1000.0, half_saturation_income=1e4)

    def test_zero_income(self):
        assert water_heat_demand(self.params, 0.0, 1e6) == 0.0

    def test_half_saturation(self):
        got = water_heat_demand(self.params, 1e4, 1e6)
        assert got == pytest.approx(500.0 * 1e6, rel=1e-12)

    def test_asymptote(self):
        cap = self.params.saturation_kwh_per_person * 1e6
        got = water_heat_demand(self.params, 1e12, 1e6)
        assert got < cap
        assert got == pytest.approx(cap, rel=1e-6)

    def test_monotone_in_income(self):
        incomes = np.linspace(0, 1e5, 50)
        vals = [water_heat_demand(self.params, x, 1.0) for x in incomes]
        assert np.all(np.diff(vals) >= 0)

    def test_negative_income(self):
        with pytest.raises(ValidationError):
            water_heat_demand(self.params, -1.0, 1e6)


class TestIntensityPath:
    def test_baseline_hits_target_at_target_year(self):
        path = intensity_path(DemandVariant.baseline(), 150.0, 2015, 2100)
        assert path[-1] == pytest.approx(90.0, abs=1e-12)

    def test_hold_when_below_target(self):
        path = intensity_path(DemandVariant.baseline(), 80.0, 2015, 2050)
        assert np.all(path == 80.0)

    def test_retrofit_linear_midpoint(self):
        # closed-form linear oracle: halfway year of 2020..2050 is 2035
        path = intensity_path(DemandVariant.retrofit(), 150.0, 2020, 2050)
        years = np.arange(2020, 2051)
        expected = 150.0 + (45.0 - 150.0) * (2035 - 2020) / (2050 - 2020)
        assert path[years == 2035][0] == pytest.approx(expected, rel=1e-12)
        assert expected == pytest.approx((150.0 + 45.0) / 2, rel=1e-12)

    def test_never_rises_and_holds_after_target(self):
        path = intensity_path(DemandVariant.retrofit(), 150.0, 2015, 2080)
        assert np.all(np.diff(path) <= 0)
        years = np.arange(2015, 2081)
        assert np.all(path[years >= 2050] == 45.0)


class TestTrajectory:
    def multi_year_drivers(self):
        years = np.arange(2015, 2051)
        n = len(years)
        return DemandDrivers(
            years=years,
            population=np.full(n, 1e6),
            floor_per_capita=np.full(n, 30.0),
            hdd=np.full(n, 3000.0),
            heating_intensity_kj=np.full(n, 150.0),
            income_per_capita=np.linspace(2e4, 4e4, n),
            new_build_fraction=np.clip(0.01 * (years - 2020), 0, 0.35),
        )

    def test_zero_water_equals_space(self):
        d = self.multi_year_drivers()
        water = WaterDemandParams(0.0, 1e4)
        traj = demand_trajectory(d, water, DemandVariant.baseline())
        space = [d.population[i] * 30.0 * 3000.0
                 * intensity_path(DemandVariant.baseline(), 150.0, 2015, 2050)[i] / 3600.0
                 for i in range(len(d.years))]
        assert np.allclose(traj.ue_total_kwh, space, rtol=1e-12)
        assert np.all(traj.water_fraction == 0.0)

    def test_ingested_passthrough_verbatim(self):
        years = np.arange(2015, 2051)
        ue = np.linspace(1e9, 2e9, len(years))
        wf = np.linspace(0.1, 0.3, len(years))
        traj = ingested_trajectory(years, ue, wf)
        assert np.array_equal(traj.ue_total_kwh, ue)
        assert np.array_equal(traj.water_fraction, wf)

    def test_variant_ordering_every_year(self, dataset):
        for region in dataset.region_ids:
            base = dataset.demand_for(region, DemandVariant.baseline()).ue_total_kwh
            ins = dataset.demand_for(region, DemandVariant.insulation()).ue_total_kwh
            retro = dataset.demand_for(region, DemandVariant.retrofit()).ue_total_kwh
            assert np.all(retro <= ins + 1e-9)
            assert np.all(ins <= base + 1e-9)

    def test_positive_total_and_water_fraction_bounds(self, dataset):
        for region in dataset.region_ids:
            for variant in (DemandVariant.baseline(), DemandVariant.insulation(), DemandVariant.retrofit()):
                traj = dataset.demand_for(region, variant)
                assert np.all(traj.ue_total_kwh > 0)
                assert np.all((traj.water_fraction >= 0) & (traj.water_fraction <= 1))

    def test_synthetic_golden_series(self, dataset):
        """Regression pin, hand-audited at northvale 2015.

        space = 30e6 pop * 40 m2 * 4500 HDD * 120 kJ / 3600 = 1.8e11 kWh;
        water = 30e6 * 1200 * 35000/(35000+10000) = 2.8e10 kWh.
        """
        traj = dataset.demand_for("northvale", DemandVariant.baseline())
        hand_space = 30e6 * 40.0 * 4500.0 * 120.0 / 3600.0
        hand_water = 30e6 * 1200.0 * 35000.0 / 45000.0
        assert traj.ue_at(2015) == pytest.approx(hand_space + hand_water, rel=1e-12)
        # frozen golden samples from the first audited run
        golden = {
            2030: 215_443_661_432.259,
            2050: 223_197_067_939.654,
        }
        for year, value in golden.items():
            assert traj.ue_at(year) == pytest.approx(value, rel=1e-9)

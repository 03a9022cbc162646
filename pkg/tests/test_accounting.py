import numpy as np
import pytest

from heatmix.accounting import (
    capacity_stock,
    compare_runs,
    direct_emissions,
    expenditure_accounts,
    indirect_emissions,
    required_generation_capacity,
    useful_to_final,
)
from heatmix.costs import HOURS_PER_YEAR
from heatmix.errors import ValidationError, YearGridError
from heatmix.series import YearSeries


class TestUsefulToFinal:
    def test_inverse_conversion(self):
        assert useful_to_final(900.0, 0.9) == pytest.approx(1000.0, rel=1e-15)

    def test_identity_efficiency(self):
        assert useful_to_final(1234.5, 1.0) == 1234.5

    def test_heat_pump_below_output(self):
        assert useful_to_final(3500.0, 3.5) == pytest.approx(1000.0, rel=1e-15)

    def test_zero_ce(self):
        with pytest.raises(ValidationError):
            useful_to_final(1.0, 0.0)


class TestDirectEmissions:
    factors = {"gas": 0.202, "oil": 0.26, "electricity": 0.0, "solar": 0.0}

    def test_all_electric_zero(self):
        assert direct_emissions({"electricity": 5e6}, self.factors) == 0.0

    def test_gas_product(self):
        assert direct_emissions({"gas": 1000.0}, self.factors) == pytest.approx(202.0, rel=1e-12)

    def test_mix_linearity(self):
        a = {"gas": 500.0, "oil": 100.0}
        b = {"gas": 700.0, "electricity": 300.0}
        ab = {"gas": 1200.0, "oil": 100.0, "electricity": 300.0}
        assert direct_emissions(ab, self.factors) == pytest.approx(
            direct_emissions(a, self.factors) + direct_emissions(b, self.factors), rel=1e-12)

    def test_unknown_fuel(self):
        with pytest.raises(ValidationError):
            direct_emissions({"plutonium": 1.0}, self.factors)


class TestIndirectEmissions:
    grid = YearSeries(np.arange(2015, 2051),
                      np.concatenate([np.linspace(0.4, 0.0, 26), np.zeros(10)]))

    def test_zero_after_decarbonisation(self):
        assert indirect_emissions(1e9, self.grid, 2045) == 0.0

    def test_zero_use(self):
        assert indirect_emissions(0.0, self.grid, 2020) == 0.0

    def test_unit_scaling(self):
        flat = YearSeries.constant(0.4, 2015, 2050)
        assert indirect_emissions(1e12, flat, 2030) == pytest.approx(0.4e12, rel=1e-12)

    def test_year_out_of_range(self):
        with pytest.raises(YearGridError):
            indirect_emissions(1.0, self.grid, 2060)


class TestCapacity:
    def test_unit_case(self):
        assert capacity_stock(HOURS_PER_YEAR, 1.0) == pytest.approx(1.0, rel=1e-15)

    def test_halving_cf_doubles_capacity(self):
        assert capacity_stock(1e6, 0.2) == pytest.approx(2 * capacity_stock(1e6, 0.4), rel=1e-12)

    def test_invalid_cf(self):
        with pytest.raises(ValidationError):
            capacity_stock(1.0, 0.0)

    def test_generation_capacity_band(self):
        # 9 PWh/y at the default grid capacity factor sits in the 2000-2400 GW band
        kw = required_generation_capacity(9e12, 0.45)
        assert 2.0e9 < kw < 2.4e9


class TestRunAccounts:
    def test_zero_policy_run_has_no_policy_money(self, run_preset):
        run = run_preset("a")
        assert run.tax_revenue_eur.sum() == 0.0
        assert run.subsidy_outlay_eur.sum() == 0.0

    def test_identical_runs_difference_to_zero(self, run_preset):
        run = run_preset("c")
        cmp = compare_runs(run, run)
        assert cmp.invest_delta_eur == 0.0
        assert cmp.energy_delta_eur == 0.0
        assert cmp.direct_delta_kg == 0.0

    def test_tax_revenue_reintegration_oracle(self, run_preset, dataset):
        # independent re-integration: emitted fuel-use series x tax schedule
        run = run_preset("d")
        carbon = dataset.carbon_by_fuel()
        tax_start, expected = 50.0, 0.0
        for yi, year in enumerate(run.flow_years):
            tax = 0.0 if year < 2020 else tax_start * (10 + (min(year, 2050) - 2020)) / 10.0
            for fi, fuel in enumerate(run.fuels):
                expected += run.fuel_use_kwh[:, yi, fi].sum() * carbon[fuel] * tax / 1000.0
        assert run.tax_revenue_eur.sum() == pytest.approx(expected, rel=1e-9)

    def test_account_closure(self, run_preset):
        run = run_preset("h")
        accounts = expenditure_accounts(run)
        for region, acct in accounts.items():
            assert acct.household_policy_burden == pytest.approx(
                acct.tax_revenue_total - acct.subsidy_outlay_total, rel=1e-15)
        total_burden = sum(a.tax_revenue_total for a in accounts.values()) - sum(
            a.subsidy_outlay_total for a in accounts.values())
        assert total_burden == pytest.approx(
            run.tax_revenue_eur.sum() - run.subsidy_outlay_eur.sum(), rel=1e-12)

    def test_both_grid_variants_from_one_run(self, run_preset):
        run = run_preset("e")
        assert not np.allclose(run.indirect_kg["Decarbonisation15C"],
                               run.indirect_kg["PowerBaseline"])
        # direct emissions identical by construction: accounting is downstream
        assert run.direct_kg.shape == run.indirect_kg["PowerBaseline"].shape

    def test_decarb_grid_zero_after_2040(self, run_preset):
        run = run_preset("a")
        years = np.asarray(run.years)
        assert np.all(run.indirect_rate_kg["Decarbonisation15C"][:, years >= 2040] == 0.0)
        assert np.any(run.indirect_rate_kg["PowerBaseline"][:, years >= 2040] > 0.0)

    def test_fossil_replacement_weakly_decreases_direct(self, run_preset):
        # subsidised renewables displace fossil shares at fixed demand
        assert run_preset("g").cumulative_direct_kg() <= run_preset("c").cumulative_direct_kg()

    def test_mismatched_runs_rejected(self, run_preset):
        run = run_preset("a")
        short = run_preset("a", end_year=2040)
        with pytest.raises(ValidationError):
            compare_runs(run, short)

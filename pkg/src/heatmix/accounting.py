"""Energy, emission and monetary accounting downstream of a run.

Pure post-processing: nothing here feeds back into the dynamics. District
heat is accounted with zero upstream emissions by default (heat-plant
emissions occur off site); a configurable upstream factor can be set on the
simulation config for users who disagree.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .costs import HOURS_PER_YEAR
from .errors import ValidationError
from .results import KG_PER_GT, RunResult
from .series import YearSeries


def useful_to_final(ue_kwh: float, ce: float) -> float:
    """Fuel (or electricity) purchased to deliver `ue_kwh` of useful heat."""
    if ce <= 0:
        raise ValidationError(f"conversion efficiency must be > 0, got {ce}")
    return ue_kwh / ce


def direct_emissions(fuel_use_kwh: dict, carbon_by_fuel: dict) -> float:
    """On-site CO2 (kg) from fuel use; zero-carbon fuels contribute nothing."""
    total = 0.0
    for fuel, kwh in fuel_use_kwh.items():
        if fuel not in carbon_by_fuel:
            raise ValidationError(f"unknown fuel '{fuel}'")
        total += kwh * carbon_by_fuel[fuel]
    return total


def indirect_emissions(electricity_kwh: float, grid: YearSeries, year: float) -> float:
    """CO2 (kg) attributed to electricity generation at the year's grid intensity."""
    return electricity_kwh * grid.at(year)


def capacity_stock(ue_kwh_per_year: float, cf: float) -> float:
    """Installed capacity (kW_th) implied by an annual heat output and capacity factor."""
    if not 0 < cf <= 1:
        raise ValidationError(f"capacity factor must be in (0, 1], got {cf}")
    return ue_kwh_per_year / (HOURS_PER_YEAR * cf)


def required_generation_capacity(electricity_kwh_per_year: float, grid_cf: float = 0.45) -> float:
    """Power-sector capacity (kW) needed to serve an annual electricity demand."""
    if not 0 < grid_cf <= 1:
        raise ValidationError("grid capacity factor must be in (0, 1]")
    return electricity_kwh_per_year / (HOURS_PER_YEAR * grid_cf)


@dataclass(frozen=True)
class MoneyAccount:
    """Annual monetary flows for one region, constant-currency, undiscounted."""

    years: np.ndarray
    invest_eur: np.ndarray          # purchases at pre-subsidy prices
    energy_eur: np.ndarray          # fuel bills at pre-tax prices
    tax_revenue_eur: np.ndarray
    subsidy_outlay_eur: np.ndarray

    @property
    def invest_total(self) -> float:
        return float(self.invest_eur.sum())

    @property
    def energy_total(self) -> float:
        return float(self.energy_eur.sum())

    @property
    def tax_revenue_total(self) -> float:
        return float(self.tax_revenue_eur.sum())

    @property
    def subsidy_outlay_total(self) -> float:
        return float(self.subsidy_outlay_eur.sum())

    @property
    def net_policy_revenue(self) -> float:
        return self.tax_revenue_total - self.subsidy_outlay_total

    @property
    def household_policy_burden(self) -> float:
        return self.tax_revenue_total - self.subsidy_outlay_total


def expenditure_accounts(run: RunResult) -> dict:
    """Per-region MoneyAccount assembled from a run's recorded flows."""
    years = np.asarray(run.flow_years)
    return {
        region: MoneyAccount(
            years=years,
            invest_eur=run.invest_eur[ri].copy(),
            energy_eur=run.energy_expense_eur[ri].copy(),
            tax_revenue_eur=run.tax_revenue_eur[ri].copy(),
            subsidy_outlay_eur=run.subsidy_outlay_eur[ri].copy(),
        )
        for ri, region in enumerate(run.regions)
    }


def _require_comparable(run: RunResult, reference: RunResult) -> None:
    if run.regions != reference.regions:
        raise ValidationError("runs cover different region sets")
    if run.flow_years != reference.flow_years:
        raise ValidationError("runs cover different horizons")


@dataclass(frozen=True)
class ScenarioComparison:
    """Cumulative deltas of one run against a named reference run."""

    scenario_id: str
    reference_id: str
    invest_delta_eur: float
    energy_delta_eur: float
    total_delta_eur: float
    policy_revenue_eur: float
    direct_delta_kg: float
    net_delta_kg_decarb: float      # direct + indirect (decarbonised grid)
    net_delta_kg_baseline: float
    invest_eur_per_tco2: float      # heating-system expense change per net tCO2 reduced

    def table3_row(self) -> tuple:
        return (
            self.scenario_id,
            self.reference_id,
            self.invest_delta_eur / 1e9,
            self.invest_eur_per_tco2,
            self.energy_delta_eur / 1e9,
            self.total_delta_eur / 1e9,
            self.policy_revenue_eur / 1e9,
        )


TABLE3_HEADER = ["scenario", "reference", "invest_delta_bn_eur", "eur_per_tco2_net_reduction",
                 "energy_delta_bn_eur", "total_delta_bn_eur", "policy_revenue_bn_eur"]


def compare_runs(run: RunResult, reference: RunResult,
                 start: int = 2020, end: int = 2050) -> ScenarioComparison:
    """Cumulative expenditure and emission differences over [start, end)."""
    _require_comparable(run, reference)
    mask = run.flow_mask(start, end)

    def total(arr):
        return float(arr[:, mask].sum())

    invest_delta = total(run.invest_eur) - total(reference.invest_eur)
    energy_delta = total(run.energy_expense_eur) - total(reference.energy_expense_eur)
    direct_delta = total(run.direct_kg) - total(reference.direct_kg)
    net_d = direct_delta + (
        run.cumulative_indirect_kg("Decarbonisation15C", start, end)
        - reference.cumulative_indirect_kg("Decarbonisation15C", start, end)
    )
    net_b = direct_delta + (
        run.cumulative_indirect_kg("PowerBaseline", start, end)
        - reference.cumulative_indirect_kg("PowerBaseline", start, end)
    )
    reduction_t = -net_d / 1000.0   # kg -> t, reduction positive
    per_t = invest_delta / reduction_t if reduction_t > 0 else float("nan")
    return ScenarioComparison(
        scenario_id=run.metadata.get("scenario", {}).get("id", "?"),
        reference_id=reference.metadata.get("scenario", {}).get("id", "?"),
        invest_delta_eur=invest_delta,
        energy_delta_eur=energy_delta,
        total_delta_eur=invest_delta + energy_delta,
        policy_revenue_eur=total(run.tax_revenue_eur) - total(run.subsidy_outlay_eur),
        direct_delta_kg=direct_delta,
        net_delta_kg_decarb=net_d,
        net_delta_kg_baseline=net_b,
        invest_eur_per_tco2=per_t,
    )


def emissions_summary_gt(run: RunResult, start: int = 2020, end: int = 2050) -> dict:
    return {
        "heating_gt": run.cumulative_direct_kg(start, end) / KG_PER_GT,
        "elec_decarb_gt": run.cumulative_indirect_kg("Decarbonisation15C", start, end) / KG_PER_GT,
        "elec_baseline_gt": run.cumulative_indirect_kg("PowerBaseline", start, end) / KG_PER_GT,
    }

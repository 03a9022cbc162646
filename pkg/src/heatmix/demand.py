"""Total useful-energy demand trajectories for space and water heating.

Space heating demand is the product of population, floor area per person,
heating degree days and heating intensity; water heating demand per person
saturates with income. All energies are kWh of useful heat internally; kJ
inputs are converted once at ingestion.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

from .costs import KJ_PER_KWH
from .errors import ValidationError, YearGridError

INTENSITY_BAND_KJ = (10.0, 300.0)


class VariantKind(Enum):
    BASELINE_90_BY_2100 = "Baseline90by2100"
    INSULATION_19 = "Insulation19"
    RETROFIT_45_BY_2050 = "Retrofit45by2050"


@dataclass(frozen=True)
class DemandVariant:
    """Heating-intensity convergence target plus the new-build adjustment.

    The baseline converges to 90 kJ/m2/HDD by 2100. The insulation variant
    keeps that path but reduces space demand on the newly built stock
    fraction (up to 35%). The retrofit variant additionally converges to
    45 kJ/m2/HDD by 2050.
    """

    kind: VariantKind
    new_build_reduction: float
    target_intensity: float
    target_year: int

    def __post_init__(self):
        if not 0.0 <= self.new_build_reduction <= 1.0:
            raise ValidationError("new_build_reduction must be in [0, 1]")
        if self.kind is VariantKind.BASELINE_90_BY_2100 and (
            self.target_intensity != 90.0 or self.target_year != 2100
        ):
            raise ValidationError("baseline variant is pinned to 90 kJ/m2/HDD by 2100")
        if self.kind is VariantKind.RETROFIT_45_BY_2050 and (
            self.target_intensity != 45.0 or self.target_year != 2050
        ):
            raise ValidationError("retrofit variant is pinned to 45 kJ/m2/HDD by 2050")

    @classmethod
    def baseline(cls) -> "DemandVariant":
        return cls(VariantKind.BASELINE_90_BY_2100, 0.0, 90.0, 2100)

    @classmethod
    def insulation(cls, new_build_reduction: float = 0.35) -> "DemandVariant":
        return cls(VariantKind.INSULATION_19, new_build_reduction, 90.0, 2100)

    @classmethod
    def retrofit(cls, new_build_reduction: float = 0.35) -> "DemandVariant":
        return cls(VariantKind.RETROFIT_45_BY_2050, new_build_reduction, 45.0, 2050)

    @classmethod
    def from_kind(cls, kind: VariantKind | str) -> "DemandVariant":
        kind = VariantKind(kind) if not isinstance(kind, VariantKind) else kind
        return {
            VariantKind.BASELINE_90_BY_2100: cls.baseline,
            VariantKind.INSULATION_19: cls.insulation,
            VariantKind.RETROFIT_45_BY_2050: cls.retrofit,
        }[kind]()


@dataclass(frozen=True)
class WaterDemandParams:
    """Income-saturation parameters for water heating demand per person."""

    saturation_kwh_per_person: float
    half_saturation_income: float

    def __post_init__(self):
        if self.saturation_kwh_per_person < 0:
            raise ValidationError("saturation level must be >= 0")
        if self.half_saturation_income <= 0:
            raise ValidationError("half-saturation income must be > 0")


@dataclass(frozen=True)
class DemandDrivers:
    """Per-region driver series on a shared year grid."""

    years: np.ndarray
    population: np.ndarray
    floor_per_capita: np.ndarray         # m2/person
    hdd: np.ndarray                      # heating degree days per year
    heating_intensity_kj: np.ndarray     # kJ useful per m2 per HDD
    income_per_capita: np.ndarray
    new_build_fraction: np.ndarray       # share of stock built after the policy start

    def __post_init__(self):
        years = np.asarray(self.years, dtype=int)
        object.__setattr__(self, "years", years)
        for name in ("population", "floor_per_capita", "hdd", "heating_intensity_kj",
                     "income_per_capita", "new_build_fraction"):
            arr = np.asarray(getattr(self, name), dtype=float)
            object.__setattr__(self, name, arr)
            if arr.shape != years.shape:
                raise ValidationError(f"driver series {name} not on the shared year grid")
            if name != "new_build_fraction" and np.any(arr <= 0):
                raise ValidationError(f"driver series {name} must be strictly positive")
        if np.any((self.new_build_fraction < 0) | (self.new_build_fraction > 1)):
            raise ValidationError("new_build_fraction must lie in [0, 1]")
        lo, hi = INTENSITY_BAND_KJ
        if np.any((self.heating_intensity_kj < lo) | (self.heating_intensity_kj > hi)):
            raise ValidationError(f"heating intensity outside sanity band [{lo}, {hi}] kJ/m2/HDD")

    def index_of(self, year: int) -> int:
        idx = np.searchsorted(self.years, year)
        if idx >= len(self.years) or self.years[idx] != year:
            raise YearGridError(f"year {year} not on the driver grid")
        return int(idx)


@dataclass(frozen=True)
class DemandTrajectory:
    """Annual total useful-energy demand and its water-heating fraction."""

    years: np.ndarray
    ue_total_kwh: np.ndarray
    water_fraction: np.ndarray

    def ue_at(self, year: float) -> float:
        return float(np.interp(year, self.years, self.ue_total_kwh))

    def water_fraction_at(self, year: float) -> float:
        return float(np.interp(year, self.years, self.water_fraction))


def space_heat_demand(drivers: DemandDrivers, year: int) -> float:
    """Space heating demand for one year, kWh useful."""
    i = drivers.index_of(year)
    kj = (
        drivers.population[i]
        * drivers.floor_per_capita[i]
        * drivers.hdd[i]
        * drivers.heating_intensity_kj[i]
    )
    return kj / KJ_PER_KWH


def water_heat_demand(params: WaterDemandParams, income: float, population: float) -> float:
    """Water heating demand, kWh useful: income-saturating per-person demand."""
    if income < 0:
        raise ValidationError(f"income must be >= 0, got {income}")
    per_person = params.saturation_kwh_per_person * income / (income + params.half_saturation_income)
    return per_person * population


def intensity_path(variant: DemandVariant, start_intensity: float,
                   start_year: int, end_year: int) -> np.ndarray:
    """Heating-intensity series over [start_year, end_year].

    Linear interpolation from the start value to the variant target at its
    target year, held constant afterwards. Intensity never rises: a start
    below the target is held at the start value.
    """
    if start_year >= end_year:
        raise ValidationError("start_year must precede end_year")
    years = np.arange(start_year, end_year + 1)
    if start_intensity <= variant.target_intensity:
        return np.full(len(years), float(start_intensity))
    frac = np.clip((years - start_year) / (variant.target_year - start_year), 0.0, 1.0)
    return start_intensity + (variant.target_intensity - start_intensity) * frac


def demand_trajectory(drivers: DemandDrivers, water: WaterDemandParams,
                      variant: DemandVariant) -> DemandTrajectory:
    """Total demand as the sum of space and water heating.

    The variant's intensity path replaces the raw intensity series beyond
    its first year; the new-build reduction multiplies space demand only
    (water heating is insulation-independent).
    """
    years = drivers.years
    path = intensity_path(variant, float(drivers.heating_intensity_kj[0]),
                          int(years[0]), int(years[-1]))
    space_kj = drivers.population * drivers.floor_per_capita * drivers.hdd * path
    space = space_kj / KJ_PER_KWH
    if variant.new_build_reduction > 0:
        space = space * (1.0 - variant.new_build_reduction * drivers.new_build_fraction)
    water_series = np.array(
        [water_heat_demand(water, float(inc), float(pop))
         for inc, pop in zip(drivers.income_per_capita, drivers.population)]
    )
    total = space + water_series
    return DemandTrajectory(years, total, water_series / total)


def ingested_trajectory(years, ue_total_kwh, water_fraction) -> DemandTrajectory:
    """Pass-through constructor for externally supplied demand trajectories."""
    years = np.asarray(years, dtype=int)
    ue = np.asarray(ue_total_kwh, dtype=float)
    wf = np.asarray(water_fraction, dtype=float)
    if years.shape != ue.shape or years.shape != wf.shape:
        raise ValidationError("trajectory columns must share the year grid")
    if np.any(ue <= 0):
        raise ValidationError("ue_total_kwh must be strictly positive")
    if np.any((wf < 0) | (wf > 1)):
        raise ValidationError("water_fraction must lie in [0, 1]")
    return DemandTrajectory(years, ue, wf)

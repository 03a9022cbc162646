"""Levelised and generalised heating costs with household heterogeneity.

All monetary intensities are EUR per kWh of useful heat (kWh_th). Capacity
figures in EUR/kW_th are converted through the annual full-load hours
implied by the capacity factor (8766 h x CF). Cost components carry a mean
and a standard deviation; the spread describes heterogeneity across
households, not time-series noise: each household draws its cost components
once and keeps them for the appliance lifetime.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from enum import Enum

import numpy as np

from .errors import ValidationError

HOURS_PER_YEAR = 8766.0
KJ_PER_KWH = 3600.0


class TechClass(Enum):
    FOSSIL_COAL = "FossilCoal"
    FOSSIL_OIL = "FossilOil"
    FOSSIL_GAS = "FossilGas"
    TRADITIONAL_BIOMASS = "TraditionalBiomass"
    MODERN_BIOMASS = "ModernBiomass"
    DISTRICT_HEAT = "DistrictHeat"
    DIRECT_ELECTRIC = "DirectElectric"
    HEAT_PUMP = "HeatPump"
    SOLAR_THERMAL = "SolarThermal"


FOSSIL_CLASSES = frozenset({TechClass.FOSSIL_COAL, TechClass.FOSSIL_OIL, TechClass.FOSSIL_GAS})

#: Incumbent classes whose working systems households may scrap early, and
#: the modern classes they may scrap towards.
SCRAP_FROM_CLASSES = FOSSIL_CLASSES | {TechClass.TRADITIONAL_BIOMASS}
SCRAP_TO_CLASSES = frozenset(
    {
        TechClass.MODERN_BIOMASS,
        TechClass.DISTRICT_HEAT,
        TechClass.DIRECT_ELECTRIC,
        TechClass.HEAT_PUMP,
        TechClass.SOLAR_THERMAL,
    }
)

#: Classes drawing electricity at the point of use (scenario-style
#: electrification incentives apply to these).
ELECTRIC_CLASSES = frozenset({TechClass.DIRECT_ELECTRIC, TechClass.HEAT_PUMP})


@dataclass(frozen=True)
class CostDistribution:
    """Mean and standard deviation of one cost component across households."""

    mean: float
    sd: float = 0.0

    def __post_init__(self):
        if self.sd < 0:
            raise ValidationError(f"sd must be >= 0, got {self.sd}")

    def scale(self, k: float) -> "CostDistribution":
        """Multiplicative rescaling; preserves the sd/mean ratio."""
        return CostDistribution(self.mean * k, self.sd * abs(k))

    def shift(self, delta: float) -> "CostDistribution":
        """Additive location shift; the spread is unchanged."""
        return CostDistribution(self.mean + delta, self.sd)


@dataclass(frozen=True)
class Technology:
    """Static descriptor of one heating technology."""

    id: str
    tech_class: TechClass
    ce: float                    # conversion efficiency, useful out / fuel in (>1 for heat pumps)
    lifetime_y: float
    learning_rate: float         # fractional cost drop per capacity doubling
    fuel: str
    carbon_kg_per_kwh: float     # kgCO2 per kWh of fuel burned on site
    subsidy_eligible: bool

    def __post_init__(self):
        if self.ce <= 0:
            raise ValidationError(f"{self.id}: conversion efficiency must be > 0")
        if self.lifetime_y <= 0:
            raise ValidationError(f"{self.id}: lifetime must be > 0")
        if not 0.0 <= self.learning_rate <= 0.5:
            raise ValidationError(f"{self.id}: learning rate must be in [0, 0.5]")
        if self.carbon_kg_per_kwh < 0:
            raise ValidationError(f"{self.id}: carbon content must be >= 0")

    @property
    def is_fossil(self) -> bool:
        return self.tech_class in FOSSIL_CLASSES


@dataclass(frozen=True)
class CostInputs:
    """Per-technology cost components in one region.

    ic: EUR/kW_th upfront (incl. installation); mr: EUR/kW_th/year
    maintenance-repair; fuel_price: EUR/kWh_fuel; cf: capacity factor.
    """

    ic: CostDistribution
    mr: CostDistribution
    fuel_price: CostDistribution
    cf: float

    def __post_init__(self):
        for name in ("ic", "mr", "fuel_price"):
            if getattr(self, name).mean < 0:
                raise ValidationError(f"{name}.mean must be >= 0")
        if not 0.0 < self.cf <= 1.0:
            raise ValidationError(f"capacity factor must be in (0, 1], got {self.cf}")

    @property
    def full_load_hours(self) -> float:
        return HOURS_PER_YEAR * self.cf


@dataclass(frozen=True)
class BehaviourParams:
    """Household decision parameters: discount rate and payback threshold."""

    discount_rate: float = 0.09
    payback_threshold: CostDistribution = CostDistribution(3.0, 1.0)

    def __post_init__(self):
        if self.discount_rate <= 0:
            raise ValidationError("discount rate must be > 0")
        if self.payback_threshold.mean <= 0:
            raise ValidationError("payback threshold mean must be > 0")


def annuity_factor(r: float, lifetime_y: float) -> float:
    """Sum of discount factors over operating years 1..lifetime."""
    n = int(round(lifetime_y))
    if n <= 0:
        raise ValidationError("lifetime must be >= 1 year")
    return (1.0 - (1.0 + r) ** (-n)) / r


def levelised_cost(tech: Technology, costs: CostInputs, r: float) -> float:
    """Levelised cost of heat, EUR/kWh_th.

    Capital is paid once upfront; maintenance and fuel accrue over the
    operating years 1..lifetime, as does the heat output in the
    denominator, so a constant per-kWh fuel cost passes through unchanged
    and the discount rate only penalises the capital share.
    """
    flh = costs.full_load_hours
    a = annuity_factor(r, tech.lifetime_y)
    return costs.ic.mean / (flh * a) + costs.mr.mean / flh + costs.fuel_price.mean / tech.ce


def cost_spread(tech: Technology, costs: CostInputs) -> float:
    """Heterogeneity spread of the levelised cost, EUR/kWh_th.

    Quadrature of the undiscounted component spreads, each converted to the
    per-kWh_th basis (capital annualised evenly over the lifetime).
    """
    flh = costs.full_load_hours
    ic_term = costs.ic.sd / (flh * tech.lifetime_y)
    mr_term = costs.mr.sd / flh
    fc_term = costs.fuel_price.sd / tech.ce
    return math.sqrt(ic_term**2 + mr_term**2 + fc_term**2)


def levelised_cost_distribution(tech: Technology, costs: CostInputs, r: float) -> CostDistribution:
    return CostDistribution(levelised_cost(tech, costs, r), cost_spread(tech, costs))


def generalised_cost(lcoh: CostDistribution, gamma: float) -> CostDistribution:
    """Add the intangible-value term: location shift only, spread unchanged."""
    return lcoh.shift(gamma)


@dataclass(frozen=True)
class PolicyAtT:
    """Policy levels in force during one simulation year."""

    carbon_tax_eur_per_t: float = 0.0
    subsidy_rates: dict | None = None          # TechClass -> fraction of IC
    electricity_subsidy_eur_per_kwh: float = 0.0
    electric_ic_subsidy: float = 0.0           # fraction of IC for electric classes

    def subsidy_rate_for(self, tech: Technology) -> float:
        """Combined relative IC reduction for `tech` (multiplicative stack)."""
        rate = 0.0
        if self.subsidy_rates and tech.subsidy_eligible:
            rate = float(self.subsidy_rates.get(tech.tech_class, 0.0))
        elec = self.electric_ic_subsidy if tech.tech_class in ELECTRIC_CLASSES else 0.0
        for r in (rate, elec):
            if not 0.0 <= r <= 1.0:
                raise ValidationError(f"subsidy rate {r} outside [0, 1]")
        return 1.0 - (1.0 - rate) * (1.0 - elec)


def apply_policies(costs: CostInputs, tech: Technology, policy: PolicyAtT,
                   electricity_fuel: str = "electricity") -> CostInputs:
    """Return cost inputs with the year's policies folded in.

    The carbon tax raises the fuel price by tax x carbon content (additive,
    spread unchanged); capital subsidies scale the upfront cost down
    (sd/mean ratio preserved); an electricity price subsidy lowers the
    electricity price the same additive way, floored at zero.
    """
    fuel = costs.fuel_price
    if policy.carbon_tax_eur_per_t and tech.carbon_kg_per_kwh > 0:
        fuel = fuel.shift(policy.carbon_tax_eur_per_t * tech.carbon_kg_per_kwh / 1000.0)
    if policy.electricity_subsidy_eur_per_kwh and tech.fuel == electricity_fuel:
        fuel = CostDistribution(max(0.0, fuel.mean - policy.electricity_subsidy_eur_per_kwh), fuel.sd)
    ic = costs.ic
    rate = policy.subsidy_rate_for(tech)
    if rate:
        ic = ic.scale(1.0 - rate)
    if ic is costs.ic and fuel is costs.fuel_price:
        return costs
    return replace(costs, ic=ic, fuel_price=fuel)


def marginal_running_cost(tech: Technology, costs: CostInputs) -> float:
    """Operating cost per kWh_th: maintenance plus fuel, no capital, no discounting."""
    return costs.mr.mean / costs.full_load_hours + costs.fuel_price.mean / tech.ce


def running_cost_spread(tech: Technology, costs: CostInputs) -> float:
    """Heterogeneity spread of the marginal running cost."""
    mr_term = costs.mr.sd / costs.full_load_hours
    fc_term = costs.fuel_price.sd / tech.ce
    return math.sqrt(mr_term**2 + fc_term**2)


def running_cost_distribution(tech: Technology, costs: CostInputs) -> CostDistribution:
    return CostDistribution(marginal_running_cost(tech, costs), running_cost_spread(tech, costs))


def payback_cost(tech: Technology, costs: CostInputs, b_years: float) -> float:
    """Running cost plus the upfront cost recovered within `b_years`, EUR/kWh_th.

    The candidate's IC must already include any subsidy.
    """
    if b_years <= 0:
        raise ValidationError(f"payback threshold must be > 0, got {b_years}")
    return marginal_running_cost(tech, costs) + costs.ic.mean / (costs.full_load_hours * b_years)


def payback_cost_distribution(tech: Technology, costs: CostInputs,
                              b: CostDistribution) -> CostDistribution:
    """Distributional payback cost with threshold heterogeneity folded in.

    The spread combines the running-cost components, the IC spread at the
    mean threshold, and a first-order term for the threshold spread
    (d(IC/b)/db = -IC/b^2).
    """
    mean = payback_cost(tech, costs, b.mean)
    ic_annual = costs.ic.mean / costs.full_load_hours
    var = (
        running_cost_spread(tech, costs) ** 2
        + (costs.ic.sd / (costs.full_load_hours * b.mean)) ** 2
        + (ic_annual * b.sd / b.mean**2) ** 2
    )
    return CostDistribution(mean, math.sqrt(var))


GAMMA_PROVENANCES = ("calibrated", "manual", "zero")


class GammaVector:
    """Per-region, per-technology intangible cost terms, EUR/kWh_th (signed).

    Each entry carries a provenance flag: calibrated, manual or zero.
    """

    def __init__(self, tech_ids, values=None, provenance=None):
        self.tech_ids = tuple(tech_ids)
        self.values: dict[str, np.ndarray] = {}
        self.provenance: dict[str, list[str]] = {}
        if values:
            for region, arr in values.items():
                prov = provenance.get(region) if provenance else None
                self.set_region(region, arr, prov)

    def set_region(self, region: str, arr, provenance=None) -> None:
        arr = np.asarray(arr, dtype=float)
        if arr.shape != (len(self.tech_ids),):
            raise ValidationError(f"gamma vector for {region} has wrong length")
        if not np.all(np.isfinite(arr)):
            raise ValidationError(f"gamma vector for {region} contains non-finite values")
        if provenance is None:
            provenance = ["zero" if v == 0 else "manual" for v in arr]
        for p in provenance:
            if p not in GAMMA_PROVENANCES:
                raise ValidationError(f"unknown gamma provenance '{p}'")
        self.values[region] = arr
        self.provenance[region] = list(provenance)

    def get(self, region: str) -> np.ndarray:
        if region not in self.values:
            return np.zeros(len(self.tech_ids))
        return self.values[region]

    def set_value(self, region: str, tech_id: str, value: float,
                  provenance: str = "manual") -> None:
        if region not in self.values:
            self.set_region(region, np.zeros(len(self.tech_ids)),
                            ["zero"] * len(self.tech_ids))
        idx = self.tech_ids.index(tech_id)
        if not math.isfinite(value):
            raise ValidationError("gamma value must be finite")
        self.values[region][idx] = value
        self.provenance[region][idx] = provenance

    def scaled(self, k: float) -> "GammaVector":
        out = GammaVector(self.tech_ids)
        for region, arr in self.values.items():
            out.set_region(region, arr * k, list(self.provenance[region]))
        return out

    def copy(self) -> "GammaVector":
        return self.scaled(1.0)

    def to_rows(self):
        """(region, tech_id, value_eur_per_kwh, provenance) rows, sorted."""
        rows = []
        for region in sorted(self.values):
            for i, tech_id in enumerate(self.tech_ids):
                rows.append((region, tech_id, float(self.values[region][i]),
                             self.provenance[region][i]))
        return rows


def learning_exponent(learning_rate: float) -> float:
    """Experience-curve exponent: cost scales as (W/W0)^(-beta)."""
    if not 0.0 <= learning_rate < 1.0:
        raise ValidationError(f"learning rate {learning_rate} outside [0, 1)")
    return -math.log2(1.0 - learning_rate) if learning_rate > 0 else 0.0


class LearningState:
    """Cumulative global capacity per technology and the implied upfront cost.

    Capacity additions from all regions are pooled; decommissions never
    reduce the stock. The cost is floored at `floor` x the reference cost to
    keep desk-scale extrapolation bounded.
    """

    def __init__(self, techs, w0_kw, ic0_mean, ic0_sd, floor: float = 0.1,
                 min_w0_kw: float = 1000.0):
        self.techs = list(techs)
        self.w0 = np.maximum(np.asarray(w0_kw, dtype=float), min_w0_kw)
        self.w = self.w0.copy()
        self.ic0_mean = np.asarray(ic0_mean, dtype=float)
        self.ic0_sd = np.asarray(ic0_sd, dtype=float)
        self.floor = floor
        self.beta = np.array([learning_exponent(t.learning_rate) for t in self.techs])

    def add_capacity(self, additions_kw) -> None:
        additions = np.asarray(additions_kw, dtype=float)
        if np.any(additions < 0):
            raise ValidationError("capacity additions must be >= 0")
        self.w = self.w + additions

    def ic_mean(self) -> np.ndarray:
        factor = (self.w / self.w0) ** (-self.beta)
        return np.maximum(self.ic0_mean * factor, self.floor * self.ic0_mean)

    def ic_sd(self) -> np.ndarray:
        safe0 = np.where(self.ic0_mean > 0, self.ic0_mean, 1.0)
        return self.ic0_sd * self.ic_mean() / safe0

"""Policy scenarios as data: tax/subsidy schedules, presets a-j, sensitivity harness.

Schedules are step functions of the calendar year (a policy level holds for
the whole year). The escalating carbon tax and the subsidy phase-out use
integer-ratio arithmetic so that the documented anchor years are exact in
floating point.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

from .costs import PolicyAtT, TechClass
from .demand import DemandVariant, VariantKind
from .errors import ValidationError
from .series import YearSeries

RENEWABLE_CLASSES = (TechClass.SOLAR_THERMAL, TechClass.HEAT_PUMP, TechClass.MODERN_BIOMASS)

PRESET_IDS = "abcdefghij"

#: Sentinel region meaning "every dataset region flagged kick-start eligible".
KICK_START_FLAGGED = "__flagged__"


def build_tax_series(start_value: float, start_year: int = 2020,
                     end_year: int = 2050) -> YearSeries:
    """Carbon tax escalating by 10% of its starting value each year."""
    if start_value < 0:
        raise ValidationError("tax start value must be >= 0")
    years = np.arange(start_year, end_year + 1)
    values = start_value * (10 + (years - start_year)) / 10.0
    return YearSeries(years, values)


def build_subsidy_series(rate: float, start_year: int = 2020, hold_until: int = 2030,
                         zero_at: int = 2050) -> YearSeries:
    """Subsidy rate held flat, then phased out linearly to zero."""
    if not 0.0 <= rate <= 1.0:
        raise ValidationError("subsidy rate must be in [0, 1]")
    years = np.arange(start_year, zero_at + 1)
    values = np.where(
        years <= hold_until,
        rate,
        rate * (zero_at - years) / float(zero_at - hold_until),
    )
    return YearSeries(years, values)


@dataclass(frozen=True)
class KickStartDirective:
    """Regulatory seeding: move 1 p.p. per year of the dominant fossil share."""

    region: str
    start_year: int
    duration_years: int
    eligible_classes: tuple[TechClass, ...] = RENEWABLE_CLASSES
    rate_per_year: float = 0.01

    def __post_init__(self):
        if not 5 <= self.duration_years <= 10:
            raise ValidationError("kick-start duration must be within [5, 10] years")
        if self.rate_per_year < 0:
            raise ValidationError("kick-start rate must be >= 0")

    def active(self, year: float) -> bool:
        return self.start_year <= year < self.start_year + self.duration_years


@dataclass(frozen=True)
class PolicySchedule:
    """Time-resolved policy levels; regions without overrides use the defaults."""

    carbon_tax: YearSeries | None = None
    carbon_tax_by_region: dict = field(default_factory=dict)
    subsidies: dict = field(default_factory=dict)        # TechClass -> YearSeries
    electricity_subsidy: YearSeries | None = None        # EUR/kWh on electricity
    electric_ic_subsidy: YearSeries | None = None        # fraction of IC, electric classes
    kick_starts: tuple[KickStartDirective, ...] = ()

    @staticmethod
    def _level(series: YearSeries | None, year: float) -> float:
        if series is None or year < series.start:
            return 0.0
        return series.at(min(year, series.end))

    def policy_at(self, region: str, year: float) -> PolicyAtT:
        tax_series = self.carbon_tax_by_region.get(region, self.carbon_tax)
        rates = {cls: self._level(s, year) for cls, s in self.subsidies.items()}
        return PolicyAtT(
            carbon_tax_eur_per_t=self._level(tax_series, year),
            subsidy_rates=rates or None,
            electricity_subsidy_eur_per_kwh=self._level(self.electricity_subsidy, year),
            electric_ic_subsidy=self._level(self.electric_ic_subsidy, year),
        )

    def kick_start_for(self, region: str, year: float, flagged_regions=()) -> KickStartDirective | None:
        for d in self.kick_starts:
            if not d.active(year):
                continue
            if d.region == region:
                return d
            if d.region == KICK_START_FLAGGED and region in flagged_regions:
                return d
        return None

    @property
    def is_empty(self) -> bool:
        return (
            self.carbon_tax is None
            and not self.carbon_tax_by_region
            and not self.subsidies
            and self.electricity_subsidy is None
            and self.electric_ic_subsidy is None
            and not self.kick_starts
        )

    def to_dict(self) -> dict:
        return {
            "carbon_tax": self.carbon_tax.to_dict() if self.carbon_tax else None,
            "carbon_tax_by_region": {r: s.to_dict() for r, s in sorted(self.carbon_tax_by_region.items())},
            "subsidies": {cls.value: s.to_dict() for cls, s in sorted(self.subsidies.items(), key=lambda kv: kv[0].value)},
            "electricity_subsidy": self.electricity_subsidy.to_dict() if self.electricity_subsidy else None,
            "electric_ic_subsidy": self.electric_ic_subsidy.to_dict() if self.electric_ic_subsidy else None,
            "kick_starts": [
                {
                    "region": d.region,
                    "start_year": d.start_year,
                    "duration_years": d.duration_years,
                    "eligible_classes": [c.value for c in d.eligible_classes],
                    "rate_per_year": d.rate_per_year,
                }
                for d in self.kick_starts
            ],
        }

    @classmethod
    def from_dict(cls, d: dict) -> "PolicySchedule":
        def series(x):
            return YearSeries.from_dict(x) if x else None

        return cls(
            carbon_tax=series(d.get("carbon_tax")),
            carbon_tax_by_region={r: YearSeries.from_dict(s) for r, s in d.get("carbon_tax_by_region", {}).items()},
            subsidies={TechClass(c): YearSeries.from_dict(s) for c, s in d.get("subsidies", {}).items()},
            electricity_subsidy=series(d.get("electricity_subsidy")),
            electric_ic_subsidy=series(d.get("electric_ic_subsidy")),
            kick_starts=tuple(
                KickStartDirective(
                    region=k["region"],
                    start_year=int(k["start_year"]),
                    duration_years=int(k["duration_years"]),
                    eligible_classes=tuple(TechClass(c) for c in k["eligible_classes"]),
                    rate_per_year=float(k.get("rate_per_year", 0.01)),
                )
                for k in d.get("kick_starts", [])
            ),
        )


@dataclass(frozen=True)
class ScenarioSpec:
    """A named scenario: demand variant plus policy schedule."""

    id: str
    demand_variant: DemandVariant
    schedule: PolicySchedule
    power_variant: str = "Decarbonisation15C"
    notes: str = ""

    def to_dict(self) -> dict:
        return {
            "id": self.id,
            "demand_variant": {
                "kind": self.demand_variant.kind.value,
                "new_build_reduction": self.demand_variant.new_build_reduction,
                "target_intensity": self.demand_variant.target_intensity,
                "target_year": self.demand_variant.target_year,
            },
            "schedule": self.schedule.to_dict(),
            "power_variant": self.power_variant,
            "notes": self.notes,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "ScenarioSpec":
        dv = d["demand_variant"]
        return cls(
            id=str(d["id"]),
            demand_variant=DemandVariant(
                kind=VariantKind(dv["kind"]),
                new_build_reduction=float(dv["new_build_reduction"]),
                target_intensity=float(dv["target_intensity"]),
                target_year=int(dv["target_year"]),
            ),
            schedule=PolicySchedule.from_dict(d["schedule"]),
            power_variant=str(d.get("power_variant", "Decarbonisation15C")),
            notes=str(d.get("notes", "")),
        )


def _subsidy_schedule(rate: float) -> dict:
    return {cls: build_subsidy_series(rate) for cls in RENEWABLE_CLASSES}


def preset_scenario(preset_id: str, kick_start_regions=None) -> ScenarioSpec:
    """Return one of the built-in scenarios a-j.

    a: baseline demand, no new policy. b: improved new-build insulation.
    c: insulation plus retrofitting. d/e: c plus a 50 or 100 EUR/tCO2
    escalating carbon tax. f/g: c plus a 25% or 50% renewables subsidy.
    h: tax 50 plus 50% subsidy. i: h plus kick-start seeding in flagged
    regions. j: tax 100 plus electricity price and purchase subsidies
    (full electrification push).

    `kick_start_regions` materialises preset i's directives for a concrete
    dataset; by default they bind to the dataset's flagged regions at run
    time.
    """
    pid = preset_id.lower()
    if pid not in PRESET_IDS:
        raise ValidationError(f"unknown preset '{preset_id}' (expected one of a-j)")
    baseline, insulation, retrofit = (
        DemandVariant.baseline(), DemandVariant.insulation(), DemandVariant.retrofit(),
    )
    if pid == "a":
        return ScenarioSpec("a", baseline, PolicySchedule(), notes="baseline, current trends")
    if pid == "b":
        return ScenarioSpec("b", insulation, PolicySchedule(), notes="improved new-build insulation")
    if pid == "c":
        return ScenarioSpec("c", retrofit, PolicySchedule(), notes="insulation + retrofitting")
    if pid == "d":
        return ScenarioSpec("d", retrofit, PolicySchedule(carbon_tax=build_tax_series(50.0)),
                            notes="carbon tax 50-200 EUR/tCO2")
    if pid == "e":
        return ScenarioSpec("e", retrofit, PolicySchedule(carbon_tax=build_tax_series(100.0)),
                            notes="carbon tax 100-400 EUR/tCO2")
    if pid == "f":
        return ScenarioSpec("f", retrofit, PolicySchedule(subsidies=_subsidy_schedule(0.25)),
                            notes="25% renewables subsidy")
    if pid == "g":
        return ScenarioSpec("g", retrofit, PolicySchedule(subsidies=_subsidy_schedule(0.50)),
                            notes="50% renewables subsidy")
    if pid == "h":
        return ScenarioSpec(
            "h", retrofit,
            PolicySchedule(carbon_tax=build_tax_series(50.0), subsidies=_subsidy_schedule(0.50)),
            notes="tax 50 + 50% subsidy",
        )
    if pid == "i":
        regions = tuple(kick_start_regions) if kick_start_regions else (KICK_START_FLAGGED,)
        kicks = tuple(
            KickStartDirective(region=r, start_year=2020, duration_years=10) for r in regions
        )
        return ScenarioSpec(
            "i", retrofit,
            PolicySchedule(carbon_tax=build_tax_series(50.0), subsidies=_subsidy_schedule(0.50),
                           kick_starts=kicks),
            notes="tax 50 + 50% subsidy + kick-start in flagged regions",
        )
    # j: full electrification push
    return ScenarioSpec(
        "j", retrofit,
        PolicySchedule(
            carbon_tax=build_tax_series(100.0),
            electricity_subsidy=YearSeries.constant(0.05, 2020, 2050),
            electric_ic_subsidy=YearSeries.constant(0.30, 2020, 2050),
        ),
        notes="electrification: tax 100 + 0.05 EUR/kWh electricity subsidy + 30% IC subsidy",
    )


@dataclass(frozen=True)
class SensitivityRow:
    label: str
    cumulative_direct_kg: float
    deviation_pct: float


def sensitivity_suite(base: ScenarioSpec, dataset, config, gammas=None) -> list[SensitivityRow]:
    """Re-run `base` under the five standard parameter perturbations.

    Rows report the percent deviation of cumulative direct CO2 over the
    simulation horizon relative to the unperturbed run: fuel prices
    drifting +/-1% of their 2018 level per year, learning rates halved,
    discount rate raised by half, and intangible cost terms halved. The
    calibrated gamma values from the default run are reused everywhere so
    that only the named parameter moves.
    """
    from .dynamics import resolve_gammas, simulate_run

    gammas = resolve_gammas(dataset, config, gammas)
    base_run = simulate_run(dataset, base, config, gammas=gammas)
    base_total = base_run.cumulative_direct_kg()

    perturbations = [
        ("fuel prices +1%/y", replace(config, fuel_price_drift_per_year=0.01), gammas),
        ("fuel prices -1%/y", replace(config, fuel_price_drift_per_year=-0.01), gammas),
        ("learning rates x0.5", replace(config, learning_rate_scale=0.5), gammas),
        ("discount rate x1.5", replace(config, discount_rate_scale=1.5), gammas),
        ("intangibles x0.5", replace(config, gamma_scale=0.5), gammas),
    ]
    rows = [SensitivityRow("default", base_total, 0.0)]
    for label, cfg, g in perturbations:
        total = simulate_run(dataset, base, cfg, gammas=g).cumulative_direct_kg()
        dev = 0.0 if base_total == 0 else 100.0 * (total - base_total) / base_total
        rows.append(SensitivityRow(label, total, dev))
    return rows

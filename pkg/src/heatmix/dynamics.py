"""Market-share dynamics and the simulation engine.

Shares evolve by pairwise substitution flows: households whose system
reaches end of life (hazard 1/lifetime, homogeneous age structure) compare
costs and may switch, with uptake constrained by the candidate's own market
share, so flows scale with both shares and diffusion is inertial and
S-shaped. Premature scrapping adds a second, payback-gated flow channel.

The engine advances all regions on a shared quarterly clock; the learning
state is a global reduction applied between timesteps, so regions within a
step are independent and may be evaluated in parallel without changing
results.
"""

from __future__ import annotations

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace

import numpy as np

from . import __version__
from .choice import PreferenceMatrix, ScrapMatrix, preference_matrix, scrap_matrix
from .costs import (
    FOSSIL_CLASSES,
    HOURS_PER_YEAR,
    BehaviourParams,
    CostDistribution,
    CostInputs,
    GammaVector,
    LearningState,
    TechClass,
    apply_policies,
    generalised_cost,
    levelised_cost_distribution,
    payback_cost_distribution,
    running_cost_distribution,
)
from .errors import SimulationError, ValidationError
from .results import RunResult
from .scenario import KickStartDirective, ScenarioSpec

logger = logging.getLogger(__name__)

SHARE_FLOOR = -1e-9     # below this a candidate step triggers internal dt halving


@dataclass(frozen=True)
class RegionState:
    """Market shares on the simplex plus the demand context at one instant."""

    shares: np.ndarray
    ue_total: float
    water_fraction: float
    year: float

    def __post_init__(self):
        shares = np.asarray(self.shares, dtype=float)
        object.__setattr__(self, "shares", shares)
        if np.any(shares < SHARE_FLOOR):
            raise ValidationError("shares must be >= 0")
        if abs(shares.sum() - 1.0) > 1e-6:
            raise ValidationError(f"shares sum to {shares.sum():.9f}, expected 1")
        if not 0.0 <= self.water_fraction <= 1.0:
            raise ValidationError("water fraction must lie in [0, 1]")


@dataclass(frozen=True)
class SimConfig:
    """Clock, behavioural parameters and perturbation knobs for one run."""

    start_year: int = 2015
    end_year: int = 2050
    dt: float = 0.25
    scrapping_enabled: bool = True
    behaviour: BehaviourParams = BehaviourParams()
    learning_floor: float = 0.1
    scrap_tau_factor: float = 1.0
    grid_cf: float = 0.45
    district_heat_upstream_kg_per_kwh: float = 0.0
    seed: int = 0
    # sensitivity knobs; identity by default
    fuel_price_drift_per_year: float = 0.0
    fuel_price_drift_start: int = 2018
    learning_rate_scale: float = 1.0
    discount_rate_scale: float = 1.0
    gamma_scale: float = 1.0
    calibration_window_y: int = 5
    calibration_tolerance: float = 1e-4

    def __post_init__(self):
        if self.dt <= 0:
            raise ValidationError("dt must be > 0")
        steps = 1.0 / self.dt
        if abs(steps - round(steps)) > 1e-9:
            raise ValidationError("dt must divide the one-year reporting interval")
        if self.start_year >= self.end_year:
            raise ValidationError("start_year must precede end_year")

    @property
    def steps_per_year(self) -> int:
        return int(round(1.0 / self.dt))

    def to_dict(self) -> dict:
        return {
            "start_year": self.start_year,
            "end_year": self.end_year,
            "dt": self.dt,
            "scrapping_enabled": self.scrapping_enabled,
            "discount_rate": self.behaviour.discount_rate,
            "payback_mean_y": self.behaviour.payback_threshold.mean,
            "payback_sd_y": self.behaviour.payback_threshold.sd,
            "learning_floor": self.learning_floor,
            "scrap_tau_factor": self.scrap_tau_factor,
            "grid_cf": self.grid_cf,
            "district_heat_upstream_kg_per_kwh": self.district_heat_upstream_kg_per_kwh,
            "seed": self.seed,
            "fuel_price_drift_per_year": self.fuel_price_drift_per_year,
            "fuel_price_drift_start": self.fuel_price_drift_start,
            "learning_rate_scale": self.learning_rate_scale,
            "discount_rate_scale": self.discount_rate_scale,
            "gamma_scale": self.gamma_scale,
            "calibration_window_y": self.calibration_window_y,
            "calibration_tolerance": self.calibration_tolerance,
        }


@dataclass
class FlowReport:
    """Gross share movements of one step; capacity fields filled by the engine."""

    regular_gross: np.ndarray       # [to, from]
    scrap_gross: np.ndarray         # [to, from]
    kick_in: np.ndarray
    kick_out: np.ndarray
    dt_halvings: int = 0
    capacity_built_kw: np.ndarray | None = None
    capacity_scrapped_kw: np.ndarray | None = None

    def scrap_outflow(self) -> np.ndarray:
        """Share leaving each incumbent through premature scrapping."""
        return self.scrap_gross.sum(axis=0)


def share_flow(s_i: float, s_j: float, f_ij: float, tau_j: float, dt: float) -> float:
    """Gross share substitution from j to i in one step."""
    return s_j * f_ij * (1.0 / tau_j) * s_i * dt


def kick_start(shares: np.ndarray, directive: KickStartDirective,
               classes: list[TechClass], dt: float) -> tuple[np.ndarray, np.ndarray]:
    """Share moved out of the dominant fossil technology and into renewables.

    The injected slice is split across eligible technologies in proportion
    to their current shares; if none has been adopted yet the slice is split
    uniformly across eligible classes, then uniformly within each class.
    Returns (out, in) vectors, both non-negative.
    """
    n = len(shares)
    out = np.zeros(n)
    inj = np.zeros(n)
    fossil = [i for i, c in enumerate(classes) if c in FOSSIL_CLASSES and shares[i] > 0]
    if not fossil:
        logger.info("kick-start no-op: no fossil share remaining")
        return out, inj
    dominant = max(fossil, key=lambda i: (shares[i], -i))
    eligible = [i for i, c in enumerate(classes) if c in directive.eligible_classes]
    if not eligible:
        return out, inj
    amount = min(directive.rate_per_year * dt, shares[dominant])
    if amount <= 0:
        return out, inj
    out[dominant] = amount
    total = sum(shares[i] for i in eligible)
    if total > 0:
        for i in eligible:
            inj[i] = amount * shares[i] / total
    else:
        present = [c for c in directive.eligible_classes if any(cl is c for cl in classes)]
        for c in present:
            members = [i for i in eligible if classes[i] is c]
            for i in members:
                inj[i] = amount / (len(present) * len(members))
    return out, inj


def enforce_constraints(shares: np.ndarray, water_fraction: float,
                        solar_mask: np.ndarray) -> np.ndarray:
    """Cap solar-thermal at the water-heating fraction of demand.

    Overflow is redistributed proportionally across the unconstrained
    technologies. Other regional availability rules (district heat absent)
    act upstream through the availability mask, so a zero share stays zero.
    """
    shares = shares.copy()
    solar_total = float(shares[solar_mask].sum())
    if solar_total <= water_fraction or solar_total <= 0:
        return shares
    excess = solar_total - water_fraction
    shares[solar_mask] *= water_fraction / solar_total
    others = ~solar_mask
    positive = others & (shares > 0)
    base = float(shares[positive].sum())
    if base > 0:
        shares[positive] += excess * shares[positive] / base
    else:
        k = int(others.sum())
        if k:
            shares[others] += excess / k
    return shares


def _renormalise(shares: np.ndarray, context: str) -> np.ndarray:
    if np.any(shares < SHARE_FLOOR):
        raise SimulationError(f"{context}: share {shares.min():.3e} below tolerance after projection")
    shares = np.maximum(shares, 0.0)
    total = shares.sum()
    if total <= 0:
        raise SimulationError(f"{context}: all shares vanished")
    return shares / total


def step_shares(state: RegionState, f: PreferenceMatrix, g: ScrapMatrix | None,
                tau_y: np.ndarray, dt: float, *, classes: list[TechClass],
                kick: KickStartDirective | None = None,
                scrap_tau_y: np.ndarray | None = None,
                max_halvings: int = 16,
                context: str = "") -> tuple[RegionState, FlowReport]:
    """Advance one region by dt: substitution flows, scrapping, kick-start,
    solar cap, renormalisation.

    A candidate move that would push any share below -1e-9 before the
    constraint projection is retried at half the step size (recursively,
    logged) rather than being clipped.
    """
    n = len(state.shares)
    tau_y = np.asarray(tau_y, dtype=float)
    if scrap_tau_y is None:
        scrap_tau_y = tau_y
    solar_mask = np.array([c is TechClass.SOLAR_THERMAL for c in classes])
    report = FlowReport(np.zeros((n, n)), np.zeros((n, n)), np.zeros(n), np.zeros(n))

    def substep(s: np.ndarray, wf: float, h: float, depth: int) -> np.ndarray:
        outer = s[:, None] * s[None, :]
        m = outer * f.f / tau_y[None, :] * h
        np.fill_diagonal(m, 0.0)
        delta = m.sum(axis=1) - m.sum(axis=0)
        sc = np.zeros((n, n))
        if g is not None:
            sc = outer * g.g.T / scrap_tau_y[None, :] * h
            np.fill_diagonal(sc, 0.0)
            delta = delta + sc.sum(axis=1) - sc.sum(axis=0)
        s_flow = s + delta
        kick_out = kick_in = None
        if kick is not None:
            kick_out, kick_in = kick_start(s_flow, kick, classes, h)
            s_flow = s_flow - kick_out + kick_in
        if np.min(s_flow) < SHARE_FLOOR:
            if depth >= max_halvings:
                raise SimulationError(f"{context}: step underflow persists after {depth} halvings")
            logger.warning("%s: halving dt to %.4g to keep shares non-negative", context, h / 2)
            report.dt_halvings += 1
            s_half = substep(s, wf, h / 2.0, depth + 1)
            return substep(s_half, wf, h / 2.0, depth + 1)
        report.regular_gross += m
        report.scrap_gross += sc
        if kick_out is not None:
            report.kick_out += kick_out
            report.kick_in += kick_in
        capped = enforce_constraints(s_flow, wf, solar_mask)
        return _renormalise(capped, context)

    new_shares = substep(state.shares, state.water_fraction, dt, 0)
    new_state = RegionState(new_shares, state.ue_total, state.water_fraction, state.year + dt)
    return new_state, report


# ---------------------------------------------------------------------------
# Per-region cost/choice model
# ---------------------------------------------------------------------------


class RegionModel:
    """Precomputed arrays and cost machinery for one region."""

    def __init__(self, dataset, region: str, config: SimConfig, gamma: np.ndarray):
        self.region = region
        self.techs = dataset.techs
        self.n = len(self.techs)
        self.classes = [t.tech_class for t in self.techs]
        self.tau = np.array([t.lifetime_y for t in self.techs])
        self.scrap_tau = self.tau * config.scrap_tau_factor
        self.ce = dataset.region_ce(region)
        self.cf = dataset.region_cf(region)
        self.flh = HOURS_PER_YEAR * self.cf
        self.carbon = np.array([t.carbon_kg_per_kwh for t in self.techs])
        self.fuels = [t.fuel for t in self.techs]
        self.mr = [dataset.mr[t.id] for t in self.techs]
        self.switch_allowed = dataset.switch_allowed()
        self.scrap_allowed = dataset.scrap_allowed()
        self.district_ok = dataset.regions[region].district_present
        self.gamma = gamma
        self.config = config
        self.r = config.behaviour.discount_rate * config.discount_rate_scale
        self.b = config.behaviour.payback_threshold
        self._dataset = dataset
        # region-adjusted technologies (traditional biomass CE override)
        self.eff_techs = [replace(t, ce=float(self.ce[i])) for i, t in enumerate(self.techs)]

    def _drift_factor(self, year: float) -> float:
        d = self.config.fuel_price_drift_per_year
        if d == 0.0:
            return 1.0
        years_on = max(0.0, math.floor(year) - self.config.fuel_price_drift_start)
        return 1.0 + d * years_on

    def base_fuel_price(self, i: int, year: float) -> CostDistribution:
        dist = self._dataset.fuel_price_at(self.region, self.fuels[i], year)
        k = self._drift_factor(year)
        return dist.scale(k) if k != 1.0 else dist

    def cost_inputs(self, year: float, ic_mean: np.ndarray, ic_sd: np.ndarray,
                    policy) -> list[CostInputs]:
        out = []
        for i, tech in enumerate(self.eff_techs):
            base = CostInputs(
                ic=CostDistribution(float(ic_mean[i]), float(ic_sd[i])),
                mr=self.mr[i],
                fuel_price=self.base_fuel_price(i, year),
                cf=float(self.cf[i]),
            )
            out.append(apply_policies(base, tech, policy))
        return out

    def availability(self, shares: np.ndarray) -> np.ndarray:
        available = shares > 0.0
        if not self.district_ok:
            for i, c in enumerate(self.classes):
                if c is TechClass.DISTRICT_HEAT:
                    available[i] = False
        return available

    def matrices(self, shares: np.ndarray, year: float, ic_mean, ic_sd,
                 policy) -> tuple[PreferenceMatrix, ScrapMatrix | None]:
        costs = self.cost_inputs(year, ic_mean, ic_sd, policy)
        gcoh = [
            generalised_cost(levelised_cost_distribution(self.eff_techs[i], costs[i], self.r),
                             float(self.gamma[i]))
            for i in range(self.n)
        ]
        available = self.availability(shares)
        f = preference_matrix(gcoh, self.switch_allowed, available)
        g = None
        if self.config.scrapping_enabled:
            mc = [running_cost_distribution(self.eff_techs[i], costs[i]) for i in range(self.n)]
            payback = [payback_cost_distribution(self.eff_techs[i], costs[i], self.b)
                       for i in range(self.n)]
            g = scrap_matrix(mc, payback, self.scrap_allowed, available)
        return f, g

    def instantaneous_rate(self, shares: np.ndarray, year: float, ic_mean, ic_sd,
                           policy, include_scrap: bool | None = None) -> np.ndarray:
        """dS/dt of the substitution dynamics at the given state (per year)."""
        f, g = self.matrices(shares, year, ic_mean, ic_sd, policy)
        outer = shares[:, None] * shares[None, :]
        m = outer * f.f / self.tau[None, :]
        np.fill_diagonal(m, 0.0)
        rate = m.sum(axis=1) - m.sum(axis=0)
        use_scrap = self.config.scrapping_enabled if include_scrap is None else include_scrap
        if use_scrap and g is not None:
            sc = outer * g.g.T / self.scrap_tau[None, :]
            np.fill_diagonal(sc, 0.0)
            rate = rate + sc.sum(axis=1) - sc.sum(axis=0)
        return rate


# ---------------------------------------------------------------------------
# Engine
# ---------------------------------------------------------------------------


def resolve_gammas(dataset, config: SimConfig, gammas: GammaVector | None = None) -> GammaVector:
    """Use explicit gammas, else the dataset's, else auto-calibrate (deterministic)."""
    if gammas is not None:
        return gammas
    if dataset.gammas is not None:
        return dataset.gammas
    from .calibration import calibrate_dataset

    logger.info("no gamma values supplied; auto-calibrating")
    return calibrate_dataset(dataset, config).gammas


@dataclass
class _RegionAccumulators:
    fuel_use: np.ndarray            # [flow_year, fuel]
    direct: np.ndarray              # [flow_year]
    indirect: dict                  # variant -> [flow_year]
    built: np.ndarray               # [flow_year, tech]
    scrapped: np.ndarray            # [flow_year, tech]
    invest: np.ndarray
    energy: np.ndarray
    tax: np.ndarray
    subsidy: np.ndarray


def simulate_run(dataset, scenario: ScenarioSpec, config: SimConfig,
                 gammas: GammaVector | None = None, workers: int = 1,
                 progress=None) -> RunResult:
    """Quarterly simulation loop over all regions.

    Per step and region: demand update, policy-adjusted costs, generalised
    cost distributions, preference/scrap matrices, share flows, constraint
    projection; then a global learning reduction. Emits annual-resolution
    results. `workers` only sets the thread count; results are independent
    of it. `progress`, if given, is called with (region, year) as regions
    complete years.
    """
    gammas = resolve_gammas(dataset, config, gammas)
    eff_gammas = gammas.scaled(config.gamma_scale) if config.gamma_scale != 1.0 else gammas
    regions = list(dataset.region_ids)
    techs = dataset.techs
    n = len(techs)
    fuels = list(dataset.fuels)
    fuel_idx = {f: i for i, f in enumerate(fuels)}
    tech_fuel = np.array([fuel_idx[t.fuel] for t in techs])
    carbon_fuel = np.array([dataset.carbon_by_fuel()[f] for f in fuels])
    upstream = np.array([
        config.district_heat_upstream_kg_per_kwh
        if any(t.fuel == f and t.tech_class is TechClass.DISTRICT_HEAT for t in techs) else 0.0
        for f in fuels
    ])
    electricity_mask = np.array([f == "electricity" for f in fuels])
    fossil_fuel_mask = carbon_fuel > 0

    years = list(range(config.start_year, config.end_year + 1))
    flow_years = years[:-1]
    n_years, n_flow = len(years), len(flow_years)

    demands = {}
    for r in regions:
        traj = dataset.demand_for(r, scenario.demand_variant)
        if traj.years[0] > config.start_year or traj.years[-1] < config.end_year:
            raise SimulationError(
                f"region {r}: demand trajectory covers {traj.years[0]}-{traj.years[-1]}, "
                f"run needs {config.start_year}-{config.end_year}"
            )
        demands[r] = traj
        for variant in ("Decarbonisation15C", "PowerBaseline"):
            grid = dataset.grid[(r, variant)]
            if grid.start > config.start_year or grid.end < config.end_year:
                raise SimulationError(
                    f"region {r}: grid series {variant} covers {grid.start}-{grid.end}, "
                    f"run needs {config.start_year}-{config.end_year}"
                )

    models = {r: RegionModel(dataset, r, config, eff_gammas.get(r)) for r in regions}
    scaled_lr = [replace(t, learning_rate=t.learning_rate * config.learning_rate_scale)
                 for t in techs]

    states = {}
    for r in regions:
        shares = dataset.initial_shares(r)
        shares = shares / shares.sum()
        states[r] = RegionState(
            shares=shares,
            ue_total=demands[r].ue_at(config.start_year),
            water_fraction=demands[r].water_fraction_at(config.start_year),
            year=float(config.start_year),
        )

    w0 = np.zeros(n)
    for r in regions:
        m = models[r]
        w0 += states[r].shares * states[r].ue_total / m.flh
    learning = LearningState(
        scaled_lr, w0,
        ic0_mean=np.array([dataset.ic[t.id].mean for t in techs]),
        ic0_sd=np.array([dataset.ic[t.id].sd for t in techs]),
        floor=config.learning_floor,
    )

    # result arrays
    shares_out = np.zeros((len(regions), n_years, n))
    ue_rate = np.zeros((len(regions), n_years, n))
    final_rate = np.zeros((len(regions), n_years, len(fuels)))
    capacity = np.zeros((len(regions), n_years, n))
    direct_rate = np.zeros((len(regions), n_years))
    indirect_rate = {v: np.zeros((len(regions), n_years)) for v in ("Decarbonisation15C", "PowerBaseline")}
    ic_track = np.zeros((n_years, n))
    acc = {
        r: _RegionAccumulators(
            fuel_use=np.zeros((n_flow, len(fuels))),
            direct=np.zeros(n_flow),
            indirect={v: np.zeros(n_flow) for v in ("Decarbonisation15C", "PowerBaseline")},
            built=np.zeros((n_flow, n)),
            scrapped=np.zeros((n_flow, n)),
            invest=np.zeros(n_flow),
            energy=np.zeros(n_flow),
            tax=np.zeros(n_flow),
            subsidy=np.zeros(n_flow),
        )
        for r in regions
    }
    diagnostics = {"dt_halvings": 0, "max_simplex_deviation": 0.0, "min_share": 1.0,
                   "kick_start_share_moved": 0.0}
    flagged = dataset.flagged_regions()

    def snapshot(year: int) -> None:
        yi = years.index(year)
        ic_track[yi] = learning.ic_mean()
        for ri, r in enumerate(regions):
            st, m = states[r], models[r]
            ue_i = st.shares * demands[r].ue_at(year)
            e_i = ue_i / m.ce
            shares_out[ri, yi] = st.shares
            ue_rate[ri, yi] = ue_i
            np.add.at(final_rate[ri, yi], tech_fuel, e_i)
            capacity[ri, yi] = ue_i / m.flh
            direct_rate[ri, yi] = float(final_rate[ri, yi] @ (carbon_fuel + upstream))
            elec = float(final_rate[ri, yi][electricity_mask].sum())
            for variant in indirect_rate:
                indirect_rate[variant][ri, yi] = elec * dataset.grid[(r, variant)].at(year)

    def step_region(r: str, t: float, year_int: int, ic_mean, ic_sd):
        m, st = models[r], states[r]
        policy = scenario.schedule.policy_at(r, year_int)
        kick = scenario.schedule.kick_start_for(r, t, flagged)
        try:
            f, g = m.matrices(st.shares, year_int, ic_mean, ic_sd, policy)
            new_state, rep = step_shares(
                st, f, g, m.tau, config.dt, classes=m.classes, kick=kick,
                scrap_tau_y=m.scrap_tau, context=f"{r}@{t:.2f}",
            )
        except Exception as e:
            raise SimulationError(f"region {r}, year {t:.2f}: {e}") from e

        fy = year_int - config.start_year
        a = acc[r]
        ue_t = demands[r].ue_at(t)
        ue_next = demands[r].ue_at(t + config.dt)
        cap_t = st.shares * ue_t / m.flh
        cap_next = new_state.shares * ue_next / m.flh
        built = np.maximum(0.0, cap_next - cap_t) + cap_t * config.dt / m.tau
        scrapped = rep.scrap_outflow() * ue_t / m.flh
        rep.capacity_built_kw = built
        rep.capacity_scrapped_kw = scrapped

        e_step = st.shares * ue_t * config.dt / m.ce
        fuel_step = np.zeros(len(fuels))
        np.add.at(fuel_step, tech_fuel, e_step)
        base_price = np.array([m.base_fuel_price(i, year_int).mean for i in range(n)])
        ic_subsidy_rate = np.array([policy.subsidy_rate_for(m.eff_techs[i]) for i in range(n)])

        a.fuel_use[fy] += fuel_step
        a.direct[fy] += float(fuel_step @ (carbon_fuel + upstream))
        for variant in a.indirect:
            a.indirect[variant][fy] += float(
                fuel_step[electricity_mask].sum() * dataset.grid[(r, variant)].at(year_int)
            )
        a.built[fy] += built
        a.scrapped[fy] += scrapped
        a.invest[fy] += float(built @ ic_mean)
        a.energy[fy] += float(e_step @ base_price)
        a.tax[fy] += float(
            (fuel_step * carbon_fuel)[fossil_fuel_mask].sum() * policy.carbon_tax_eur_per_t / 1000.0
        )
        a.subsidy[fy] += float((built * ic_mean) @ ic_subsidy_rate)
        a.subsidy[fy] += float(fuel_step[electricity_mask].sum() * policy.electricity_subsidy_eur_per_kwh)

        new_state = replace(
            new_state,
            ue_total=ue_next,
            water_fraction=demands[r].water_fraction_at(t + config.dt),
        )
        return r, new_state, rep

    total_steps = (config.end_year - config.start_year) * config.steps_per_year
    pool = ThreadPoolExecutor(max_workers=workers) if workers > 1 else None
    try:
        for k in range(total_steps):
            t = config.start_year + k * config.dt
            year_int = int(math.floor(t + 1e-9))
            if k % config.steps_per_year == 0:
                snapshot(year_int)
            ic_mean, ic_sd = learning.ic_mean(), learning.ic_sd()
            if pool is not None:
                outcomes = list(pool.map(lambda r: step_region(r, t, year_int, ic_mean, ic_sd), regions))
            else:
                outcomes = [step_region(r, t, year_int, ic_mean, ic_sd) for r in regions]
            additions = np.zeros(n)
            for r, new_state, rep in outcomes:   # fixed region order for the reduction
                states[r] = new_state
                additions += rep.capacity_built_kw
                diagnostics["dt_halvings"] += rep.dt_halvings
                dev = abs(float(new_state.shares.sum()) - 1.0)
                diagnostics["max_simplex_deviation"] = max(diagnostics["max_simplex_deviation"], dev)
                diagnostics["min_share"] = min(diagnostics["min_share"], float(new_state.shares.min()))
                diagnostics["kick_start_share_moved"] += float(rep.kick_in.sum())
                if progress is not None and (k + 1) % config.steps_per_year == 0:
                    progress(r, year_int + 1)
            learning.add_capacity(additions)
        snapshot(config.end_year)
    finally:
        if pool is not None:
            pool.shutdown()

    metadata = {
        "scenario": scenario.to_dict(),
        "dataset_hash": dataset.content_hash,
        "config": config.to_dict(),
        "code_version": __version__,
        "gammas": [list(row) for row in eff_gammas.to_rows()],
    }
    return RunResult(
        metadata=metadata,
        regions=regions,
        techs=[t.id for t in techs],
        fuels=fuels,
        years=years,
        flow_years=flow_years,
        shares=shares_out,
        ue_rate_kwh=ue_rate,
        final_rate_kwh=final_rate,
        capacity_kw=capacity,
        direct_rate_kg=direct_rate,
        indirect_rate_kg=indirect_rate,
        fuel_use_kwh=np.stack([acc[r].fuel_use for r in regions]),
        direct_kg=np.stack([acc[r].direct for r in regions]),
        indirect_kg={v: np.stack([acc[r].indirect[v] for r in regions])
                     for v in ("Decarbonisation15C", "PowerBaseline")},
        built_kw=np.stack([acc[r].built for r in regions]),
        scrapped_kw=np.stack([acc[r].scrapped for r in regions]),
        invest_eur=np.stack([acc[r].invest for r in regions]),
        energy_expense_eur=np.stack([acc[r].energy for r in regions]),
        tax_revenue_eur=np.stack([acc[r].tax for r in regions]),
        subsidy_outlay_eur=np.stack([acc[r].subsidy for r in regions]),
        ic_mean_eur_per_kw=ic_track,
        diagnostics=diagnostics,
    )

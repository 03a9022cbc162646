"""Intangible-cost calibration against historical diffusion trends.

The intangible term of each technology's generalised cost is chosen so that
the simulated diffusion rate at the handover year matches the trend in the
trailing historical window, region by region. Only cost differences matter,
so one gauge technology (the largest incumbent) is pinned to zero. A
deterministic derivative-free search replaces eyeballing; interactive
overrides re-project an eight-year zero-policy horizon for inspection.
"""

from __future__ import annotations

import logging
import uuid
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import minimize, root
from scipy.special import ndtr

from .choice import preference_matrix
from .costs import (
    CostDistribution,
    GammaVector,
    PolicyAtT,
    levelised_cost_distribution,
)
from .demand import DemandVariant
from .dynamics import RegionModel, RegionState, SimConfig, step_shares
from .errors import SessionError, ValidationError

logger = logging.getLogger(__name__)

NO_POLICY = PolicyAtT()


def historical_slope(years, shares, window: int = 5) -> float:
    """Ordinary least-squares slope of one share series over the trailing window."""
    years = np.asarray(years, dtype=float)
    shares = np.asarray(shares, dtype=float)
    if years.shape != shares.shape:
        raise ValidationError("years and shares must align")
    if window < 3:
        raise ValidationError("slope window must span at least 3 points")
    ys, ss = years[-window:], shares[-window:]
    if len(ys) < 3:
        raise ValidationError(f"need >= 3 data points in window, have {len(ys)}")
    return float(np.polyfit(ys, ss, 1)[0])


class _RateModel:
    """Fast diffusion-rate evaluator with costs frozen at the handover year.

    Only the intangible terms vary during the search; levelised-cost
    distributions and the scrap matrix are precomputed once.
    """

    def __init__(self, dataset, region: str, config: SimConfig):
        self.model = RegionModel(dataset, region, config,
                                 np.zeros(len(dataset.techs)))
        m = self.model
        handover = dataset.handover_year(region)
        self.handover = handover
        ic_mean = np.array([dataset.ic[t.id].mean for t in dataset.techs])
        ic_sd = np.array([dataset.ic[t.id].sd for t in dataset.techs])
        costs = m.cost_inputs(handover, ic_mean, ic_sd, NO_POLICY)
        lcoh = [levelised_cost_distribution(m.eff_techs[i], costs[i], m.r)
                for i in range(m.n)]
        self.lcoh_mean = np.array([d.mean for d in lcoh])
        self.lcoh_sd = np.array([d.sd for d in lcoh])
        with np.errstate(divide="ignore", invalid="ignore"):
            denom = np.sqrt(self.lcoh_sd[:, None] ** 2 + self.lcoh_sd[None, :] ** 2)
        self.denom = denom
        self.shares0 = dataset.initial_shares(region)
        self.shares0 = self.shares0 / self.shares0.sum()
        self.available = m.availability(self.shares0.copy())
        self.switch = m.switch_allowed & np.outer(self.available, self.available)
        np.fill_diagonal(self.switch, False)
        self.tau = m.tau
        self.scrap_rate = np.zeros(m.n)
        if config.scrapping_enabled:
            _, g = m.matrices(self.shares0, handover, ic_mean, ic_sd, NO_POLICY)
            outer = self.shares0[:, None] * self.shares0[None, :]
            sc = outer * g.g.T / m.scrap_tau[None, :]
            np.fill_diagonal(sc, 0.0)
            self.scrap_rate = sc.sum(axis=1) - sc.sum(axis=0)
        self._ic = (ic_mean, ic_sd)

    def preference(self, gamma: np.ndarray) -> np.ndarray:
        mu = self.lcoh_mean + gamma
        diff = mu[None, :] - mu[:, None]
        pos = self.denom > 0
        z = np.zeros_like(diff)
        np.divide(diff, self.denom, out=z, where=pos)
        f = ndtr(z)
        if not pos.all():
            degenerate = np.where(diff > 0, 1.0, np.where(diff < 0, 0.0, 0.5))
            f = np.where(pos, f, degenerate)
        return np.where(self.switch, f, 0.0)

    def rate(self, gamma: np.ndarray) -> np.ndarray:
        """dS/dt at the handover state (per year)."""
        f = self.preference(gamma)
        outer = self.shares0[:, None] * self.shares0[None, :]
        m = outer * f / self.tau[None, :]
        return m.sum(axis=1) - m.sum(axis=0) + self.scrap_rate


@dataclass
class CalibrationResult:
    region: str
    gamma: np.ndarray               # EUR/kWh_th
    provenance: list
    residuals: np.ndarray           # simulated rate minus historical slope, /year
    target_slopes: np.ndarray
    converged: bool
    gauge_tech: str | None
    evaluations: int


def auto_calibrate(dataset, region: str, config: SimConfig,
                   seed: int | None = None) -> CalibrationResult:
    """Fit one intangible term per active technology in `region`.

    Derivative-free local search (Powell) from zero, bounded at twice the
    levelised cost; deterministic for given inputs (`seed` is accepted for
    interface stability, the search draws no random numbers). Never raises
    on non-convergence: the best found values are returned flagged.
    """
    techs = dataset.techs
    tech_ids = [t.id for t in techs]
    rm = _RateModel(dataset, region, config)
    hist_years = dataset.historical_years[region]
    hist = dataset.historical_shares[region]
    window = min(config.calibration_window_y, len(hist_years))
    targets = np.array([
        historical_slope(hist_years, hist[:, i], window) for i in range(len(techs))
    ])

    active = np.flatnonzero(rm.available)
    gamma = np.zeros(len(techs))
    provenance = ["zero"] * len(techs)
    if len(active) <= 1:
        residuals = rm.rate(gamma) - targets
        return CalibrationResult(region, gamma, provenance, residuals, targets,
                                 True, None, 0)

    gauge = int(active[np.argmax(rm.shares0[active])])
    free = [i for i in active if i != gauge]
    bound = 2.0 * np.abs(rm.lcoh_mean)
    evaluations = 0

    def residuals_free(x: np.ndarray) -> np.ndarray:
        nonlocal evaluations
        evaluations += 1
        g = gamma.copy()
        g[free] = x
        return rm.rate(g)[free] - targets[free]

    def objective(x: np.ndarray) -> float:
        r = residuals_free(x)
        return float(r @ r)

    # The free subsystem is square (one residual per free term), so a
    # derivative-free root solve from zero converges before the preference
    # kernel saturates; bounded Powell is the fallback on hard instances.
    x0 = np.zeros(len(free))
    best_x, best_val = x0, objective(x0)
    sol = root(residuals_free, x0, method="hybr", options={"xtol": 1e-12, "maxfev": 20000})
    if objective(sol.x) < best_val:
        best_x, best_val = sol.x, objective(sol.x)
    if best_val > (config.calibration_tolerance / 10.0) ** 2:
        bounds = [(-bound[i], bound[i]) for i in free]
        fallback = minimize(objective, x0, method="Powell", bounds=bounds,
                            options={"xtol": 1e-10, "ftol": 1e-16, "maxfev": 40000})
        if fallback.fun < best_val:
            best_x, best_val = fallback.x, float(fallback.fun)
    gamma[free] = best_x
    for i in active:
        provenance[i] = "calibrated"
    residuals = rm.rate(gamma) - targets
    converged = bool(np.max(np.abs(residuals[active])) <= config.calibration_tolerance)
    if not converged:
        logger.warning("calibration for %s did not converge: max residual %.3g/year",
                       region, float(np.max(np.abs(residuals[active]))))
    if np.any(np.abs(gamma[active]) >= bound[active] - 1e-12):
        logger.warning("calibration for %s hit its gamma bound; fit is suspect", region)
    return CalibrationResult(region, gamma, provenance, residuals, targets,
                             converged, tech_ids[gauge], evaluations)


@dataclass
class DatasetCalibration:
    gammas: GammaVector
    results: dict
    converged: bool


def calibrate_dataset(dataset, config: SimConfig) -> DatasetCalibration:
    """Calibrate every region independently (fixed order, deterministic)."""
    gammas = GammaVector(tuple(t.id for t in dataset.techs))
    results = {}
    for region in dataset.region_ids:
        res = auto_calibrate(dataset, region, config, seed=config.seed)
        gammas.set_region(region, res.gamma, res.provenance)
        results[region] = res
    return DatasetCalibration(gammas, results, all(r.converged for r in results.values()))


# ---------------------------------------------------------------------------
# Interactive sessions
# ---------------------------------------------------------------------------


@dataclass
class Projection:
    region: str
    handover_year: int
    years: np.ndarray
    shares: np.ndarray              # [year, tech]
    residuals: np.ndarray           # /year, vs historical trailing slopes
    gamma: np.ndarray

    def to_payload(self, tech_ids) -> dict:
        return {
            "region": self.region,
            "handover_year": int(self.handover_year),
            "years": [int(y) for y in self.years],
            "shares": {t: self.shares[:, i].tolist() for i, t in enumerate(tech_ids)},
            "residuals": {t: float(self.residuals[i]) for i, t in enumerate(tech_ids)},
            "gamma_eur_per_kwh": {t: float(self.gamma[i]) for i, t in enumerate(tech_ids)},
        }


@dataclass
class CalibrationSession:
    """Single-writer working state for one region's interactive calibration."""

    region: str
    dataset: object
    config: SimConfig
    gamma: np.ndarray
    provenance: list
    id: str = field(default_factory=lambda: uuid.uuid4().hex)
    horizon_y: int = 8
    closed: bool = False
    last_projection: Projection | None = None
    _rate_model: _RateModel | None = None

    def _model(self) -> _RateModel:
        if self._rate_model is None:
            self._rate_model = _RateModel(self.dataset, self.region, self.config)
        return self._rate_model

    def close(self) -> None:
        self.closed = True


def open_session(dataset, region: str, config: SimConfig,
                 gammas: GammaVector | None = None) -> CalibrationSession:
    if region not in dataset.regions:
        raise ValidationError(f"unknown region '{region}'")
    gamma = (gammas or dataset.gammas or GammaVector(tuple(t.id for t in dataset.techs))).get(region).copy()
    session = CalibrationSession(region=region, dataset=dataset, config=config,
                                 gamma=gamma, provenance=["manual"] * len(dataset.techs))
    session.last_projection = project_session(session)
    return session


def project_session(session: CalibrationSession) -> Projection:
    """Zero-policy short-horizon projection with costs frozen at handover.

    Demand enters only through the solar cap, so the baseline demand
    variant's water fraction at handover is held fixed.
    """
    if session.closed:
        raise SessionError("session is closed")
    ds, config = session.dataset, session.config
    region = session.region
    rm = session._model()
    model = rm.model
    gcoh = [CostDistribution(rm.lcoh_mean[i] + session.gamma[i], rm.lcoh_sd[i])
            for i in range(model.n)]
    f = preference_matrix(gcoh, model.switch_allowed, rm.available)
    g = None
    if config.scrapping_enabled:
        ic_mean, ic_sd = rm._ic
        _, g = model.matrices(rm.shares0, rm.handover, ic_mean, ic_sd, NO_POLICY)

    try:
        traj = ds.demand_for(region, DemandVariant.baseline())
        wf = traj.water_fraction_at(min(max(rm.handover, traj.years[0]), traj.years[-1]))
    except Exception:
        wf = 1.0
    state = RegionState(rm.shares0.copy(), 1.0, wf, float(rm.handover))
    steps = int(round(session.horizon_y / config.dt))
    years = [rm.handover]
    shares = [state.shares.copy()]
    for k in range(steps):
        state, _ = step_shares(state, f, g, model.tau, config.dt,
                               classes=model.classes, scrap_tau_y=model.scrap_tau,
                               context=f"{region}:projection")
        if (k + 1) % config.steps_per_year == 0:
            years.append(rm.handover + (k + 1) // config.steps_per_year)
            shares.append(state.shares.copy())
    hist_years = ds.historical_years[region]
    hist = ds.historical_shares[region]
    window = min(config.calibration_window_y, len(hist_years))
    targets = np.array([historical_slope(hist_years, hist[:, i], window)
                        for i in range(model.n)])
    residuals = rm.rate(session.gamma) - targets
    proj = Projection(region, rm.handover, np.array(years), np.array(shares),
                      residuals, session.gamma.copy())
    session.last_projection = proj
    return proj


def apply_gamma_override(session: CalibrationSession, tech_id: str,
                         value_eur_per_kwh: float) -> Projection:
    """Replace one technology's intangible term and re-project."""
    if session.closed:
        raise SessionError("session is closed")
    tech_ids = [t.id for t in session.dataset.techs]
    if tech_id not in tech_ids:
        raise ValidationError(f"unknown tech '{tech_id}'")
    idx = tech_ids.index(tech_id)
    session.gamma[idx] = float(value_eur_per_kwh)
    session.provenance[idx] = "manual"
    return project_session(session)


def session_auto_calibrate(session: CalibrationSession) -> Projection:
    """Run the automatic search and load its result into the session."""
    if session.closed:
        raise SessionError("session is closed")
    res = auto_calibrate(session.dataset, session.region, session.config)
    session.gamma = res.gamma.copy()
    session.provenance = list(res.provenance)
    return project_session(session)

"""HTTP facade for the calibration/scenario studio.

The service owns no model logic: every run goes through the same engine as
the CLI and serializes through the same canonical encoder, so results are
byte-identical for identical inputs. Sessions are in-memory and expire;
completed runs are immutable (and optionally persisted to disk).
"""

from __future__ import annotations

import json
import math
import threading
import time
import uuid
from pathlib import Path

from fastapi import FastAPI, HTTPException, Query, Response
from fastapi.responses import StreamingResponse
from pydantic import BaseModel

from .calibration import (
    CalibrationSession,
    apply_gamma_override,
    auto_calibrate,
    project_session,
)
from .costs import GammaVector, TechClass
from .dataset import load_dataset
from .demand import DemandVariant, VariantKind
from .dynamics import SimConfig, simulate_run
from .errors import HeatmixError, ValidationError
from .results import RunResult
from .scenario import (
    PRESET_IDS,
    KickStartDirective,
    PolicySchedule,
    ScenarioSpec,
    build_subsidy_series,
    build_tax_series,
    preset_scenario,
)
from .series import YearSeries

SESSION_TTL_S = 3600.0


class CreateSessionBody(BaseModel):
    dataset: str
    gamma_init: str = "dataset"     # dataset | zero | auto


class GammaUpdateBody(BaseModel):
    region: str
    tech_id: str
    value_eur_per_kwh: float


class RunBody(BaseModel):
    preset: str | None = None
    scenario: dict | None = None
    config: dict = {}


class ScenarioBuildBody(BaseModel):
    """Compact policy form the studio submits; the server builds the series."""

    id: str = "custom"
    demand_variant: str = "Retrofit45by2050"
    carbon_tax_start: float = 0.0
    subsidy_rates: dict = {}                 # class name -> fraction
    electricity_subsidy_eur_per_kwh: float = 0.0
    electric_ic_subsidy: float = 0.0
    kick_start_regions: list = []
    power_variant: str = "Decarbonisation15C"
    notes: str = ""


class _Session:
    def __init__(self, dataset_id: str, dataset, gammas: GammaVector, config: SimConfig):
        self.id = uuid.uuid4().hex
        self.dataset_id = dataset_id
        self.dataset = dataset
        self.gammas = gammas
        self.config = config
        self.expires_at = time.monotonic() + SESSION_TTL_S
        self.lock = threading.Lock()
        self.run_in_flight = False
        self._calibration_sessions: dict[str, CalibrationSession] = {}

    def touch(self) -> None:
        self.expires_at = time.monotonic() + SESSION_TTL_S

    @property
    def expired(self) -> bool:
        return time.monotonic() > self.expires_at

    def calibration_session(self, region: str) -> CalibrationSession:
        if region not in self._calibration_sessions:
            cs = CalibrationSession(
                region=region, dataset=self.dataset, config=self.config,
                gamma=self.gammas.get(region).copy(),
                provenance=list(self.gammas.provenance.get(region, ["zero"] * len(self.dataset.techs))),
            )
            self._calibration_sessions[region] = cs
        return self._calibration_sessions[region]


class _Run:
    def __init__(self, run_id: str, session_id: str):
        self.id = run_id
        self.session_id = session_id
        self.state = "queued"
        self.progress = {"region": None, "year": None}
        self.events: list[dict] = []
        self.error: str | None = None
        self.result_bytes: bytes | None = None
        self.result: RunResult | None = None
        self.lock = threading.Lock()


def _series_payload(years, values) -> dict:
    return {"years": [int(y) for y in years], "values": [float(v) for v in values]}


def create_app(data_dir, runs_dir=None, config: SimConfig | None = None) -> FastAPI:
    """Build the application serving the dataset at `data_dir`."""
    data_dir = Path(data_dir)
    dataset = load_dataset(data_dir)
    dataset_id = data_dir.name
    base_config = config or SimConfig()
    app = FastAPI(title="heatmix studio service", version="1")
    sessions: dict[str, _Session] = {}
    runs: dict[str, _Run] = {}
    runs_path = Path(runs_dir) if runs_dir else None
    if runs_path:
        runs_path.mkdir(parents=True, exist_ok=True)
        for f in sorted(runs_path.glob("run_*.json")):
            run = _Run(f.stem.replace("run_", ""), session_id="")
            run.state = "done"
            run.result_bytes = f.read_bytes()
            run.result = RunResult.from_payload(json.loads(run.result_bytes))
            runs[run.id] = run

    def get_session(sid: str) -> _Session:
        s = sessions.get(sid)
        if s is None:
            raise HTTPException(status_code=404, detail="unknown session")
        if s.expired:
            raise HTTPException(status_code=410, detail="session expired")
        s.touch()
        return s

    def get_run(rid: str) -> _Run:
        r = runs.get(rid)
        if r is None:
            raise HTTPException(status_code=404, detail="unknown run")
        return r

    @app.get("/datasets")
    def list_datasets():
        return [{
            "id": dataset_id,
            "regions": list(dataset.region_ids),
            "techs": list(dataset.tech_ids),
            "fuels": list(dataset.fuels),
            "hash": dataset.content_hash,
            "has_gammas": dataset.gammas is not None,
        }]

    @app.post("/sessions")
    def create_session(body: CreateSessionBody):
        if body.dataset != dataset_id:
            raise HTTPException(status_code=404, detail=f"unknown dataset '{body.dataset}'")
        if body.gamma_init not in ("dataset", "zero", "auto"):
            raise HTTPException(status_code=422, detail=[{"loc": ["body", "gamma_init"],
                                                          "msg": "expected dataset|zero|auto"}])
        gammas = GammaVector(dataset.tech_ids)
        if body.gamma_init == "dataset" and dataset.gammas is not None:
            gammas = dataset.gammas.copy()
        elif body.gamma_init == "auto":
            from .calibration import calibrate_dataset

            gammas = calibrate_dataset(dataset, base_config).gammas
        s = _Session(dataset_id, dataset, gammas, base_config)
        sessions[s.id] = s
        return {"session_id": s.id, "dataset": dataset_id,
                "regions": list(dataset.region_ids), "techs": list(dataset.tech_ids),
                "gamma_init": body.gamma_init}

    @app.get("/sessions/{sid}/regions")
    def session_regions(sid: str):
        s = get_session(sid)
        out = []
        for region in s.dataset.region_ids:
            years = s.dataset.historical_years[region]
            shares = s.dataset.historical_shares[region]
            rm = s.calibration_session(region)._model()
            out.append({
                "region": region,
                "handover_year": s.dataset.handover_year(region),
                "historical": {
                    "years": [int(y) for y in years],
                    "shares": {t: shares[:, i].tolist()
                               for i, t in enumerate(s.dataset.tech_ids)},
                },
                "gamma_eur_per_kwh": {t: float(v) for t, v in
                                      zip(s.dataset.tech_ids, s.gammas.get(region))},
                # slider bounds: twice the handover levelised cost
                "gamma_bound_eur_per_kwh": {t: float(2.0 * abs(rm.lcoh_mean[i]))
                                            for i, t in enumerate(s.dataset.tech_ids)},
                "residual_tolerance_per_year": s.config.calibration_tolerance,
                "kick_start_eligible": s.dataset.regions[region].kick_start_eligible,
            })
        return out

    @app.get("/sessions/{sid}/projection")
    def session_projection(sid: str, region: str = Query(...)):
        s = get_session(sid)
        if region not in s.dataset.regions:
            raise HTTPException(status_code=404, detail=f"unknown region '{region}'")
        with s.lock:
            cs = s.calibration_session(region)
            proj = cs.last_projection or project_session(cs)
        return proj.to_payload(s.dataset.tech_ids)

    @app.post("/sessions/{sid}/calibrate/auto")
    def session_calibrate(sid: str, body: dict | None = None):
        s = get_session(sid)
        regions = [body["region"]] if body and body.get("region") else list(s.dataset.region_ids)
        out = {}
        with s.lock:
            for region in regions:
                if region not in s.dataset.regions:
                    raise HTTPException(status_code=404, detail=f"unknown region '{region}'")
                res = auto_calibrate(s.dataset, region, s.config)
                s.gammas.set_region(region, res.gamma, res.provenance)
                cs = s.calibration_session(region)
                cs.gamma = res.gamma.copy()
                cs.provenance = list(res.provenance)
                proj = project_session(cs)
                out[region] = {
                    "converged": res.converged,
                    "gauge_tech": res.gauge_tech,
                    "residuals": {t: float(r) for t, r in zip(s.dataset.tech_ids, res.residuals)},
                    "projection": proj.to_payload(s.dataset.tech_ids),
                }
        return out

    @app.put("/sessions/{sid}/gamma")
    def session_gamma(sid: str, body: GammaUpdateBody):
        s = get_session(sid)
        if body.region not in s.dataset.regions:
            raise HTTPException(status_code=404, detail=f"unknown region '{body.region}'")
        if body.tech_id not in s.dataset.tech_ids:
            raise HTTPException(status_code=422, detail=[{"loc": ["body", "tech_id"],
                                                          "msg": "unknown technology"}])
        with s.lock:   # gamma updates serialized per session (single writer)
            cs = s.calibration_session(body.region)
            proj = apply_gamma_override(cs, body.tech_id, body.value_eur_per_kwh)
            s.gammas.set_value(body.region, body.tech_id, body.value_eur_per_kwh, "manual")
        return proj.to_payload(s.dataset.tech_ids)

    @app.get("/scenarios/presets")
    def list_presets():
        out = []
        for pid in PRESET_IDS:
            spec = preset_scenario(pid, kick_start_regions=dataset.flagged_regions())
            out.append(spec.to_dict())
        return out

    @app.post("/scenarios/build")
    def build_scenario(body: ScenarioBuildBody):
        try:
            variant = DemandVariant.from_kind(VariantKind(body.demand_variant))
        except ValueError:
            raise HTTPException(status_code=422, detail=[{
                "loc": ["body", "demand_variant"],
                "msg": f"expected one of {[v.value for v in VariantKind]}"}])
        subsidies = {}
        for cls_name, rate in body.subsidy_rates.items():
            try:
                cls = TechClass(cls_name)
            except ValueError:
                raise HTTPException(status_code=422, detail=[{
                    "loc": ["body", "subsidy_rates", cls_name], "msg": "unknown technology class"}])
            try:
                if rate:
                    subsidies[cls] = build_subsidy_series(float(rate))
            except ValidationError as e:
                raise HTTPException(status_code=422, detail=[{
                    "loc": ["body", "subsidy_rates", cls_name], "msg": str(e)}])
        unknown = [r for r in body.kick_start_regions if r not in dataset.regions]
        if unknown:
            raise HTTPException(status_code=422, detail=[{
                "loc": ["body", "kick_start_regions", r], "msg": "unknown region"} for r in unknown])
        if body.power_variant not in ("Decarbonisation15C", "PowerBaseline"):
            raise HTTPException(status_code=422, detail=[{
                "loc": ["body", "power_variant"], "msg": "unknown power variant"}])
        try:
            schedule = PolicySchedule(
                carbon_tax=build_tax_series(body.carbon_tax_start) if body.carbon_tax_start else None,
                subsidies=subsidies,
                electricity_subsidy=(YearSeries.constant(body.electricity_subsidy_eur_per_kwh, 2020, 2050)
                                     if body.electricity_subsidy_eur_per_kwh else None),
                electric_ic_subsidy=(YearSeries.constant(body.electric_ic_subsidy, 2020, 2050)
                                     if body.electric_ic_subsidy else None),
                kick_starts=tuple(KickStartDirective(region=r, start_year=2020, duration_years=10)
                                  for r in body.kick_start_regions),
            )
            spec = ScenarioSpec(id=body.id, demand_variant=variant, schedule=schedule,
                                power_variant=body.power_variant, notes=body.notes)
        except ValidationError as e:
            raise HTTPException(status_code=422, detail=[{"loc": ["body"], "msg": str(e)}])
        return spec.to_dict()

    @app.get("/compare")
    def compare(run: str = Query(...), reference: str = Query(...)):
        """Server-side run differencing so the studio displays no client math.

        Mismatched horizons are truncated to the common year range and
        flagged rather than rejected.
        """
        from .accounting import compare_runs

        a, b = get_run(run), get_run(reference)
        ra, rb = _require_done(a), _require_done(b)
        if ra.regions != rb.regions:
            raise HTTPException(status_code=422, detail=[{
                "loc": ["query"], "msg": "runs cover different region sets"}])
        truncated = ra.flow_years != rb.flow_years
        common = sorted(set(ra.flow_years) & set(rb.flow_years))
        if not common:
            raise HTTPException(status_code=422, detail=[{
                "loc": ["query"], "msg": "runs share no overlapping years"}])
        start, end = common[0], common[-1] + 1

        def totals(r: RunResult):
            mask = r.flow_mask(start, end)
            return {
                "invest_eur": float(r.invest_eur[:, mask].sum()),
                "energy_eur": float(r.energy_expense_eur[:, mask].sum()),
                "tax_revenue_eur": float(r.tax_revenue_eur[:, mask].sum()),
                "subsidy_outlay_eur": float(r.subsidy_outlay_eur[:, mask].sum()),
                "direct_kg": float(r.direct_kg[:, mask].sum()),
                "indirect_decarb_kg": r.cumulative_indirect_kg("Decarbonisation15C", start, end),
                "indirect_baseline_kg": r.cumulative_indirect_kg("PowerBaseline", start, end),
            }

        ta, tb = totals(ra), totals(rb)
        deltas = {k: ta[k] - tb[k] for k in ta}
        payload = {
            "run": ra.metadata.get("scenario", {}).get("id", "?"),
            "reference": rb.metadata.get("scenario", {}).get("id", "?"),
            "run_id": run,
            "reference_id": reference,
            "years": [start, end - 1],
            "truncated": truncated,
            "run_totals": ta,
            "reference_totals": tb,
            "deltas": deltas,
        }
        if not truncated:
            cmp = compare_runs(ra, rb, start=start, end=end)
            if math.isfinite(cmp.invest_eur_per_tco2):
                payload["eur_per_tco2_net_reduction"] = cmp.invest_eur_per_tco2
        return payload

    def _parse_run_body(body: RunBody, s: _Session):
        if (body.preset is None) == (body.scenario is None):
            raise HTTPException(status_code=422, detail=[{
                "loc": ["body"], "msg": "provide exactly one of 'preset' or 'scenario'"}])
        try:
            if body.preset is not None:
                if body.preset.lower() not in PRESET_IDS or len(body.preset) != 1:
                    raise ValidationError(f"unknown preset '{body.preset}'")
                scenario = preset_scenario(body.preset.lower(),
                                           kick_start_regions=s.dataset.flagged_regions())
            else:
                scenario = ScenarioSpec.from_dict(body.scenario)
        except (ValidationError, KeyError, ValueError, TypeError) as e:
            field = "preset" if body.preset is not None else "scenario"
            raise HTTPException(status_code=422, detail=[{"loc": ["body", field], "msg": str(e)}])
        allowed = {"start_year", "end_year", "dt", "scrapping_enabled"}
        unknown = set(body.config) - allowed
        if unknown:
            raise HTTPException(status_code=422, detail=[
                {"loc": ["body", "config", k], "msg": "unknown config field"} for k in sorted(unknown)])
        try:
            config = SimConfig(**{**{k: getattr(s.config, k) for k in allowed}, **body.config},
                               behaviour=s.config.behaviour)
        except (ValidationError, TypeError) as e:
            raise HTTPException(status_code=422, detail=[{"loc": ["body", "config"], "msg": str(e)}])
        return scenario, config

    @app.post("/sessions/{sid}/runs")
    def start_run(sid: str, body: RunBody):
        s = get_session(sid)
        scenario, config = _parse_run_body(body, s)
        with s.lock:
            if s.run_in_flight:
                raise HTTPException(status_code=409, detail="a run is already in flight for this session")
            s.run_in_flight = True
        run = _Run(uuid.uuid4().hex, s.id)
        runs[run.id] = run
        gammas = s.gammas.copy()

        def execute():
            run.state = "running"
            try:
                def on_progress(region, year):
                    with run.lock:
                        run.progress = {"region": region, "year": int(year)}
                        run.events.append({"region": region, "year": int(year)})

                result = simulate_run(s.dataset, scenario, config, gammas=gammas,
                                      progress=on_progress)
                run.result = result
                run.result_bytes = result.to_canonical_bytes()
                if runs_path:
                    (runs_path / f"run_{run.id}.json").write_bytes(run.result_bytes)
                run.state = "done"
            except Exception as e:
                run.error = str(e)
                run.state = "error"
            finally:
                with s.lock:
                    s.run_in_flight = False

        threading.Thread(target=execute, daemon=True).start()
        return {"run_id": run.id}

    @app.get("/runs/{rid}/status")
    def run_status(rid: str):
        r = get_run(rid)
        with r.lock:
            return {"run_id": r.id, "state": r.state, "progress": r.progress, "error": r.error}

    @app.get("/runs/{rid}/events")
    def run_events(rid: str):
        r = get_run(rid)

        def stream():
            cursor = 0
            while True:
                with r.lock:
                    chunk = r.events[cursor:]
                    cursor += len(chunk)
                    state = r.state
                for ev in chunk:
                    yield f"data: {json.dumps(ev, sort_keys=True)}\n\n"
                if state in ("done", "error"):
                    yield f"data: {json.dumps({'state': state}, sort_keys=True)}\n\n"
                    return
                time.sleep(0.05)

        return StreamingResponse(stream(), media_type="text/event-stream")

    def _require_done(r: _Run) -> RunResult:
        if r.state == "error":
            raise HTTPException(status_code=500, detail=r.error)
        if r.state != "done" or r.result is None:
            raise HTTPException(status_code=409, detail=f"run is {r.state}")
        return r.result

    @app.get("/runs/{rid}/results")
    def run_results(rid: str, report: str | None = Query(default=None)):
        r = get_run(rid)
        result = _require_done(r)
        if report is None:
            return Response(content=r.result_bytes, media_type="application/json")
        if report == "shares":
            return {
                "years": result.years,
                "regions": [{
                    "region": region,
                    "stacks": [{"tech_id": t, "values": result.shares[ri, :, ti].tolist()}
                               for ti, t in enumerate(result.techs)],
                } for ri, region in enumerate(result.regions)],
            }
        if report == "emissions":
            def block(direct, ind_d, ind_b):
                return {
                    "direct": direct.tolist(),
                    "indirect_decarb": ind_d.tolist(),
                    "indirect_baseline": ind_b.tolist(),
                    "total_decarb": (direct + ind_d).tolist(),
                    "total_baseline": (direct + ind_b).tolist(),
                }

            return {
                "years": result.years,
                "regions": [{
                    "region": region,
                    **block(result.direct_rate_kg[ri],
                            result.indirect_rate_kg["Decarbonisation15C"][ri],
                            result.indirect_rate_kg["PowerBaseline"][ri]),
                } for ri, region in enumerate(result.regions)],
                "global": block(result.direct_rate_kg.sum(axis=0),
                                result.indirect_rate_kg["Decarbonisation15C"].sum(axis=0),
                                result.indirect_rate_kg["PowerBaseline"].sum(axis=0)),
            }
        if report == "money":
            def money_block(ri=None):
                def pick(arr):
                    return (arr.sum(axis=0) if ri is None else arr[ri]).tolist()

                return {
                    "invest_eur": pick(result.invest_eur),
                    "energy_eur": pick(result.energy_expense_eur),
                    "tax_revenue_eur": pick(result.tax_revenue_eur),
                    "subsidy_outlay_eur": pick(result.subsidy_outlay_eur),
                }

            return {
                "years": result.flow_years,
                "regions": [{"region": region, **money_block(ri)}
                            for ri, region in enumerate(result.regions)],
                "global": money_block(None),
            }
        raise HTTPException(status_code=422, detail=[{"loc": ["query", "report"],
                                                      "msg": "expected shares|emissions|money"}])

    @app.exception_handler(HeatmixError)
    def heatmix_error_handler(request, exc: HeatmixError):
        from fastapi.responses import JSONResponse

        status = 422 if isinstance(exc, ValidationError) else 500
        return JSONResponse(status_code=status, content={"detail": str(exc)})

    return app

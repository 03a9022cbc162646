"""Dataset ingestion and validation.

A dataset is a directory of CSV files. Validation collects the complete
list of violations (never just the first) with file and row context; a
dataset that validates cleanly is guaranteed not to raise data errors
during simulation.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass
from pathlib import Path

import numpy as np
import pandas as pd

from .costs import (
    SCRAP_FROM_CLASSES,
    SCRAP_TO_CLASSES,
    CostDistribution,
    GammaVector,
    GAMMA_PROVENANCES,
    TechClass,
    Technology,
)
from .demand import DemandDrivers, DemandTrajectory, DemandVariant, WaterDemandParams, demand_trajectory, ingested_trajectory
from .errors import DatasetError, ValidationError
from .series import YearSeries

POWER_VARIANTS = ("Decarbonisation15C", "PowerBaseline")
GRID_ZERO_YEAR = 2040   # the decarbonisation trajectory must reach zero by here

REQUIRED_FILES = {
    "regions.csv": ["region", "cf", "solar_cf", "kick_start_eligible", "district_present", "trad_biomass_ce"],
    "technologies.csv": ["tech_id", "class", "ce", "lifetime_y", "learning_rate", "fuel",
                         "carbon_kg_per_kwh", "ic_eur_per_kw", "ic_sd", "mr_eur_per_kw_a",
                         "mr_sd", "subsidy_eligible"],
    "fuel_prices.csv": ["region", "fuel", "year", "price_eur_per_kwh", "sd"],
    "historical_shares.csv": ["region", "tech_id", "year", "share"],
    "grid_intensity.csv": ["region", "year", "variant", "kg_per_kwh"],
    "comfort_mask.csv": ["from_class", "to_class", "allowed"],
}
DRIVER_COLUMNS = ["region", "year", "population", "m2_per_cap", "hdd", "intensity_kj",
                  "income", "new_build_frac", "water_sat_kwh", "water_half_sat_income"]
TRAJECTORY_COLUMNS = ["region", "year", "ue_total_kwh", "water_fraction"]
GAMMA_COLUMNS = ["region", "tech_id", "gamma_cent_per_kwh", "provenance"]


@dataclass(frozen=True)
class RegionMeta:
    id: str
    cf: float
    solar_cf: float
    kick_start_eligible: bool
    district_present: bool
    trad_biomass_ce: float


@dataclass
class Dataset:
    path: str
    content_hash: str
    regions: dict
    techs: list
    ic: dict                    # tech_id -> CostDistribution (EUR/kW)
    mr: dict                    # tech_id -> CostDistribution (EUR/kW/a)
    fuel_prices: dict           # (region, fuel) -> (mean YearSeries, sd YearSeries)
    historical_years: dict      # region -> int array
    historical_shares: dict     # region -> array [year, tech]
    drivers: dict               # region -> DemandDrivers (may be empty)
    water_params: dict          # region -> WaterDemandParams
    trajectories: dict          # region -> DemandTrajectory (may be empty)
    grid: dict                  # (region, variant) -> YearSeries
    class_mask: dict            # (from_class, to_class) -> bool
    gammas: GammaVector | None

    @property
    def tech_ids(self) -> tuple:
        return tuple(t.id for t in self.techs)

    @property
    def region_ids(self) -> tuple:
        return tuple(sorted(self.regions))

    @property
    def fuels(self) -> tuple:
        return tuple(sorted({t.fuel for t in self.techs}))

    def tech_index(self, tech_id: str) -> int:
        return self.tech_ids.index(tech_id)

    def flagged_regions(self) -> tuple:
        return tuple(r for r in self.region_ids if self.regions[r].kick_start_eligible)

    def handover_year(self, region: str) -> int:
        return int(self.historical_years[region][-1])

    def initial_shares(self, region: str) -> np.ndarray:
        return self.historical_shares[region][-1].copy()

    def region_ce(self, region: str) -> np.ndarray:
        """Conversion efficiencies with the per-region traditional-biomass override."""
        ce = np.array([t.ce for t in self.techs])
        override = self.regions[region].trad_biomass_ce
        for i, t in enumerate(self.techs):
            if t.tech_class is TechClass.TRADITIONAL_BIOMASS and override > 0:
                ce[i] = override
        return ce

    def region_cf(self, region: str) -> np.ndarray:
        meta = self.regions[region]
        return np.array(
            [meta.solar_cf if t.tech_class is TechClass.SOLAR_THERMAL else meta.cf
             for t in self.techs]
        )

    def fuel_price_at(self, region: str, fuel: str, year: float) -> CostDistribution:
        mean_s, sd_s = self.fuel_prices[(region, fuel)]
        y = min(max(year, mean_s.start), mean_s.end)
        return CostDistribution(mean_s.at(y), sd_s.at(y))

    def switch_allowed(self) -> np.ndarray:
        """allowed[i, j]: a household may switch from technology j to i."""
        n = len(self.techs)
        allowed = np.ones((n, n), dtype=bool)
        for i, ti in enumerate(self.techs):
            for j, tj in enumerate(self.techs):
                allowed[i, j] = self.class_mask.get((tj.tech_class, ti.tech_class), True)
        return allowed

    def scrap_allowed(self) -> np.ndarray:
        """allowed[i, j]: holders of i may scrap early in favour of j."""
        n = len(self.techs)
        switch = self.switch_allowed()
        allowed = np.zeros((n, n), dtype=bool)
        for i, ti in enumerate(self.techs):
            for j, tj in enumerate(self.techs):
                allowed[i, j] = (
                    ti.tech_class in SCRAP_FROM_CLASSES
                    and tj.tech_class in SCRAP_TO_CLASSES
                    and switch[j, i]
                )
        return allowed

    def demand_for(self, region: str, variant: DemandVariant) -> DemandTrajectory:
        if region in self.trajectories:
            return self.trajectories[region]
        return demand_trajectory(self.drivers[region], self.water_params[region], variant)

    def carbon_by_fuel(self) -> dict:
        return {t.fuel: t.carbon_kg_per_kwh for t in self.techs}


def dataset_hash(path: Path) -> str:
    digest = hashlib.sha256()
    for f in sorted(Path(path).glob("*.csv")):
        digest.update(f.name.encode())
        digest.update(f.read_bytes())
    return digest.hexdigest()


def _parse_bool(value, issues, ctx) -> bool:
    s = str(value).strip().lower()
    if s in ("true", "1", "yes"):
        return True
    if s in ("false", "0", "no"):
        return False
    issues.append(f"{ctx}: cannot parse boolean '{value}'")
    return False


def _check_columns(df: pd.DataFrame, name: str, required, issues) -> bool:
    missing = [c for c in required if c not in df.columns]
    if missing:
        issues.append(f"{name}: missing columns {missing}")
        return False
    return True


def _contiguous(years: np.ndarray) -> bool:
    return len(years) > 0 and np.array_equal(years, np.arange(years[0], years[-1] + 1))


def validate_dataset(path) -> list[str]:
    """Return the complete list of violations for the dataset directory."""
    _, issues = _load(Path(path))
    return issues


def load_dataset(path) -> Dataset:
    """Load and validate; raises DatasetError carrying every violation."""
    ds, issues = _load(Path(path))
    if issues:
        raise DatasetError(issues)
    return ds


def _load(path: Path):
    issues: list[str] = []
    if not path.is_dir():
        return None, [f"{path}: not a directory"]
    frames = {}
    for name, cols in REQUIRED_FILES.items():
        f = path / name
        if not f.exists():
            issues.append(f"{name}: file missing")
            continue
        df = pd.read_csv(f)
        if _check_columns(df, name, cols, issues):
            frames[name] = df
    has_drivers = (path / "demand_drivers.csv").exists()
    has_traj = (path / "demand_trajectory.csv").exists()
    if not has_drivers and not has_traj:
        issues.append("demand_drivers.csv or demand_trajectory.csv: file missing")
    if has_drivers:
        df = pd.read_csv(path / "demand_drivers.csv")
        if _check_columns(df, "demand_drivers.csv", DRIVER_COLUMNS, issues):
            frames["demand_drivers.csv"] = df
    if has_traj:
        df = pd.read_csv(path / "demand_trajectory.csv")
        if _check_columns(df, "demand_trajectory.csv", TRAJECTORY_COLUMNS, issues):
            frames["demand_trajectory.csv"] = df
    if (path / "gamma.csv").exists():
        df = pd.read_csv(path / "gamma.csv")
        if _check_columns(df, "gamma.csv", GAMMA_COLUMNS, issues):
            frames["gamma.csv"] = df
    if issues:
        return None, issues

    # --- regions ---
    regions = {}
    for idx, row in frames["regions.csv"].iterrows():
        rid = str(row["region"])
        ctx = f"regions.csv row {idx} ({rid})"
        cf, solar_cf = float(row["cf"]), float(row["solar_cf"])
        if not 0 < cf <= 1:
            issues.append(f"{ctx}: cf {cf} outside (0, 1]")
        if not 0 < solar_cf <= 1:
            issues.append(f"{ctx}: solar_cf {solar_cf} outside (0, 1]")
        regions[rid] = RegionMeta(
            id=rid, cf=cf, solar_cf=solar_cf,
            kick_start_eligible=_parse_bool(row["kick_start_eligible"], issues, ctx),
            district_present=_parse_bool(row["district_present"], issues, ctx),
            trad_biomass_ce=float(row["trad_biomass_ce"]),
        )

    # --- technologies ---
    techs, ic, mr = [], {}, {}
    for idx, row in frames["technologies.csv"].iterrows():
        tid = str(row["tech_id"])
        ctx = f"technologies.csv row {idx} ({tid})"
        try:
            tech = Technology(
                id=tid,
                tech_class=TechClass(str(row["class"])),
                ce=float(row["ce"]),
                lifetime_y=float(row["lifetime_y"]),
                learning_rate=float(row["learning_rate"]),
                fuel=str(row["fuel"]),
                carbon_kg_per_kwh=float(row["carbon_kg_per_kwh"]),
                subsidy_eligible=_parse_bool(row["subsidy_eligible"], issues, ctx),
            )
        except (ValidationError, ValueError) as e:
            issues.append(f"{ctx}: {e}")
            continue
        techs.append(tech)
        try:
            ic[tid] = CostDistribution(float(row["ic_eur_per_kw"]), float(row["ic_sd"]))
            mr[tid] = CostDistribution(float(row["mr_eur_per_kw_a"]), float(row["mr_sd"]))
        except ValidationError as e:
            issues.append(f"{ctx}: {e}")
    tech_ids = [t.id for t in techs]
    if len(set(tech_ids)) != len(tech_ids):
        issues.append("technologies.csv: duplicate tech_id")
    carbon_by_fuel = {}
    for t in techs:
        if t.fuel in carbon_by_fuel and carbon_by_fuel[t.fuel] != t.carbon_kg_per_kwh:
            issues.append(
                f"technologies.csv: fuel '{t.fuel}' has inconsistent carbon content across technologies"
            )
        carbon_by_fuel[t.fuel] = t.carbon_kg_per_kwh
    fuels = sorted(set(t.fuel for t in techs))

    # --- fuel prices ---
    fuel_prices = {}
    fp = frames["fuel_prices.csv"]
    for (region, fuel), grp in fp.groupby(["region", "fuel"], sort=True):
        region, fuel = str(region), str(fuel)
        ctx = f"fuel_prices.csv ({region}, {fuel})"
        if region not in regions:
            issues.append(f"{ctx}: unknown region")
            continue
        if fuel not in fuels:
            issues.append(f"{ctx}: unknown fuel")
            continue
        grp = grp.sort_values("year")
        years = grp["year"].to_numpy(dtype=int)
        means = grp["price_eur_per_kwh"].to_numpy(dtype=float)
        sds = grp["sd"].to_numpy(dtype=float)
        if np.any(means < 0) or np.any(sds < 0):
            issues.append(f"{ctx}: negative price or sd")
            continue
        if len(years) > 1 and not _contiguous(years):
            issues.append(f"{ctx}: year grid has gaps")
            continue
        fuel_prices[(region, fuel)] = (YearSeries(years, means), YearSeries(years, sds))
    for region in regions:
        for fuel in fuels:
            if (region, fuel) not in fuel_prices:
                issues.append(f"fuel_prices.csv: no price for fuel '{fuel}' in region '{region}'")

    # --- historical shares ---
    hist_years, hist_shares = {}, {}
    hs = frames["historical_shares.csv"]
    for idx, row in hs.iterrows():
        if str(row["region"]) not in regions:
            issues.append(f"historical_shares.csv row {idx}: unknown region '{row['region']}'")
        if str(row["tech_id"]) not in tech_ids:
            issues.append(f"historical_shares.csv row {idx}: unknown tech_id '{row['tech_id']}'")
        if float(row["share"]) < 0:
            issues.append(f"historical_shares.csv row {idx}: negative share")
    for region, grp in hs.groupby("region", sort=True):
        region = str(region)
        if region not in regions:
            continue
        years = np.array(sorted(grp["year"].unique()), dtype=int)
        if not _contiguous(years):
            issues.append(f"historical_shares.csv ({region}): year grid has gaps")
            continue
        if len(years) < 3:
            issues.append(f"historical_shares.csv ({region}): fewer than 3 years of history")
        mat = np.zeros((len(years), len(tech_ids)))
        pivot = grp.pivot_table(index="year", columns="tech_id", values="share", aggfunc="sum")
        for yi, y in enumerate(years):
            for ti, tid in enumerate(tech_ids):
                if tid in pivot.columns and y in pivot.index:
                    v = pivot.loc[y, tid]
                    mat[yi, ti] = 0.0 if pd.isna(v) else float(v)
            total = mat[yi].sum()
            if abs(total - 1.0) > 1e-6:
                issues.append(
                    f"historical_shares.csv ({region}, {y}): shares sum to {total:.6f}, expected 1"
                )
        hist_years[region] = years
        hist_shares[region] = mat
    for region in regions:
        if region not in hist_years:
            issues.append(f"historical_shares.csv: no rows for region '{region}'")
    for region, meta in regions.items():
        if region in hist_shares:
            district_idx = [i for i, t in enumerate(techs) if t.tech_class is TechClass.DISTRICT_HEAT]
            has_district = any(hist_shares[region][:, i].sum() > 0 for i in district_idx)
            if meta.district_present != has_district:
                issues.append(
                    f"regions.csv ({region}): district_present={meta.district_present} "
                    f"inconsistent with historical district share"
                )

    # --- demand ---
    drivers, water_params, trajectories = {}, {}, {}
    if "demand_drivers.csv" in frames:
        for region, grp in frames["demand_drivers.csv"].groupby("region", sort=True):
            region = str(region)
            ctx = f"demand_drivers.csv ({region})"
            if region not in regions:
                issues.append(f"{ctx}: unknown region")
                continue
            grp = grp.sort_values("year")
            years = grp["year"].to_numpy(dtype=int)
            if not _contiguous(years):
                issues.append(f"{ctx}: year grid has gaps")
                continue
            try:
                drivers[region] = DemandDrivers(
                    years=years,
                    population=grp["population"].to_numpy(float),
                    floor_per_capita=grp["m2_per_cap"].to_numpy(float),
                    hdd=grp["hdd"].to_numpy(float),
                    heating_intensity_kj=grp["intensity_kj"].to_numpy(float),
                    income_per_capita=grp["income"].to_numpy(float),
                    new_build_fraction=grp["new_build_frac"].to_numpy(float),
                )
                water_params[region] = WaterDemandParams(
                    saturation_kwh_per_person=float(grp["water_sat_kwh"].iloc[0]),
                    half_saturation_income=float(grp["water_half_sat_income"].iloc[0]),
                )
            except ValidationError as e:
                issues.append(f"{ctx}: {e}")
    if "demand_trajectory.csv" in frames:
        for region, grp in frames["demand_trajectory.csv"].groupby("region", sort=True):
            region = str(region)
            ctx = f"demand_trajectory.csv ({region})"
            if region not in regions:
                issues.append(f"{ctx}: unknown region")
                continue
            grp = grp.sort_values("year")
            try:
                trajectories[region] = ingested_trajectory(
                    grp["year"].to_numpy(int),
                    grp["ue_total_kwh"].to_numpy(float),
                    grp["water_fraction"].to_numpy(float),
                )
            except ValidationError as e:
                issues.append(f"{ctx}: {e}")
    for region in regions:
        if region not in drivers and region not in trajectories:
            issues.append(f"demand: region '{region}' has neither drivers nor a trajectory")

    # --- grid intensity ---
    grid = {}
    for (region, variant), grp in frames["grid_intensity.csv"].groupby(["region", "variant"], sort=True):
        region, variant = str(region), str(variant)
        ctx = f"grid_intensity.csv ({region}, {variant})"
        if region not in regions:
            issues.append(f"{ctx}: unknown region")
            continue
        if variant not in POWER_VARIANTS:
            issues.append(f"{ctx}: unknown power variant")
            continue
        grp = grp.sort_values("year")
        years = grp["year"].to_numpy(dtype=int)
        values = grp["kg_per_kwh"].to_numpy(dtype=float)
        if np.any(values < 0):
            issues.append(f"{ctx}: negative intensity")
            continue
        if not _contiguous(years):
            issues.append(f"{ctx}: year grid has gaps")
            continue
        if variant == "Decarbonisation15C" and np.any(values[years >= GRID_ZERO_YEAR] != 0.0):
            issues.append(f"{ctx}: decarbonisation trajectory must reach 0 by {GRID_ZERO_YEAR} and stay there")
        grid[(region, variant)] = YearSeries(years, values)
    for region in regions:
        for variant in POWER_VARIANTS:
            if (region, variant) not in grid:
                issues.append(f"grid_intensity.csv: missing variant '{variant}' for region '{region}'")

    # --- comfort mask ---
    class_mask = {}
    for idx, row in frames["comfort_mask.csv"].iterrows():
        ctx = f"comfort_mask.csv row {idx}"
        try:
            frm, to = TechClass(str(row["from_class"])), TechClass(str(row["to_class"]))
        except ValueError as e:
            issues.append(f"{ctx}: {e}")
            continue
        class_mask[(frm, to)] = _parse_bool(row["allowed"], issues, ctx)

    # --- gammas ---
    gammas = None
    if "gamma.csv" in frames:
        gammas = GammaVector(tuple(tech_ids))
        per_region: dict[str, dict] = {}
        for idx, row in frames["gamma.csv"].iterrows():
            ctx = f"gamma.csv row {idx}"
            region, tid = str(row["region"]), str(row["tech_id"])
            if region not in regions:
                issues.append(f"{ctx}: unknown region '{region}'")
                continue
            if tid not in tech_ids:
                issues.append(f"{ctx}: unknown tech_id '{tid}'")
                continue
            prov = str(row["provenance"])
            if prov not in GAMMA_PROVENANCES:
                issues.append(f"{ctx}: unknown provenance '{prov}'")
                continue
            per_region.setdefault(region, {})[tid] = (float(row["gamma_cent_per_kwh"]) / 100.0, prov)
        for region, entries in per_region.items():
            arr = np.zeros(len(tech_ids))
            provs = ["zero"] * len(tech_ids)
            for tid, (val, prov) in entries.items():
                i = tech_ids.index(tid)
                arr[i], provs[i] = val, prov
            try:
                gammas.set_region(region, arr, provs)
            except ValidationError as e:
                issues.append(f"gamma.csv ({region}): {e}")

    if issues:
        return None, issues

    ds = Dataset(
        path=str(path),
        content_hash=dataset_hash(path),
        regions=regions,
        techs=techs,
        ic=ic,
        mr=mr,
        fuel_prices=fuel_prices,
        historical_years=hist_years,
        historical_shares=hist_shares,
        drivers=drivers,
        water_params=water_params,
        trajectories=trajectories,
        grid=grid,
        class_mask=class_mask,
        gammas=gammas,
    )
    return ds, issues

"""Deterministic desk-scale synthetic dataset: 3 regions x 13 technologies.

The regions span the mechanisms of interest: `northvale` is a cold,
gas-dominated region with district heat and a modest renewable base;
`midland` is temperate with coal and traditional biomass still in the mix
and no district network; `petrovia` has cheap fossil fuels, a large
district-heat share and no modern renewables at all, making it the
kick-start target. Historical share trends stay well inside the endogenous
diffusion speed limit (|dS/dt| <= S(1-S)/lifetime) so the calibration has a
reachable target.
"""

from __future__ import annotations

from pathlib import Path

TECHNOLOGIES = [
    # id, class, ce, lifetime, lr, fuel, carbon, ic, mr, subsidy_eligible
    ("oil", "FossilOil", 0.75, 20, 0.0, "oil", 0.26, 471.0, 19.0, False),
    ("oil_condensing", "FossilOil", 0.86, 20, 0.10, "oil", 0.26, 512.0, 20.0, False),
    ("gas", "FossilGas", 0.75, 20, 0.0, "gas", 0.202, 391.0, 8.0, False),
    ("gas_condensing", "FossilGas", 0.90, 20, 0.10, "gas", 0.202, 434.0, 9.0, False),
    ("biomass_stove", "TraditionalBiomass", 0.45, 20, 0.0, "biomass_trad", 0.0, 440.0, 0.1, False),
    ("biomass_boiler", "ModernBiomass", 0.85, 20, 0.10, "biomass_modern", 0.0, 523.0, 2.0, True),
    ("coal", "FossilCoal", 0.75, 20, 0.0, "coal", 0.36, 247.0, 5.0, False),
    ("district", "DistrictHeat", 0.98, 20, 0.0, "heat", 0.0, 265.0, 16.0, False),
    ("electric", "DirectElectric", 1.00, 20, 0.0, "electricity", 0.0, 538.0, 0.5, False),
    ("hp_ground", "HeatPump", 3.50, 20, 0.30, "electricity", 0.0, 1400.0, 14.0, True),
    ("hp_air_water", "HeatPump", 2.60, 20, 0.30, "electricity", 0.0, 750.0, 15.0, True),
    ("hp_air_air", "HeatPump", 2.60, 20, 0.30, "electricity", 0.0, 510.0, 51.0, True),
    ("solar", "SolarThermal", 1.00, 20, 0.10, "solar", 0.0, 773.0, 8.0, True),
]

TECH_IDS = [t[0] for t in TECHNOLOGIES]

REGIONS = {
    # region: (cf, solar_cf, kick_start_eligible, district_present, trad_biomass_ce)
    "northvale": (0.38, 0.10, False, True, 0.50),
    "midland": (0.30, 0.12, False, False, 0.45),
    "petrovia": (0.35, 0.09, True, True, 0.40),
}

FUEL_PRICES = {
    # (region, fuel): mean EUR/kWh; sd is 15% (30% for biomass, 0 for solar)
    ("northvale", "oil"): 0.070, ("northvale", "gas"): 0.055, ("northvale", "coal"): 0.035,
    ("northvale", "biomass_trad"): 0.020, ("northvale", "biomass_modern"): 0.045,
    ("northvale", "heat"): 0.065, ("northvale", "electricity"): 0.160, ("northvale", "solar"): 0.0,
    ("midland", "oil"): 0.065, ("midland", "gas"): 0.050, ("midland", "coal"): 0.028,
    ("midland", "biomass_trad"): 0.015, ("midland", "biomass_modern"): 0.040,
    ("midland", "heat"): 0.060, ("midland", "electricity"): 0.130, ("midland", "solar"): 0.0,
    ("petrovia", "oil"): 0.040, ("petrovia", "gas"): 0.028, ("petrovia", "coal"): 0.020,
    ("petrovia", "biomass_trad"): 0.012, ("petrovia", "biomass_modern"): 0.035,
    ("petrovia", "heat"): 0.045, ("petrovia", "electricity"): 0.090, ("petrovia", "solar"): 0.0,
}

# 2014 shares and linear trends per year (trends sum to zero per region)
SHARES_2014 = {
    "northvale": [0.14, 0.05, 0.30, 0.12, 0.04, 0.04, 0.02, 0.14, 0.09, 0.02, 0.015, 0.01, 0.015],
    "midland": [0.10, 0.02, 0.33, 0.08, 0.125, 0.05, 0.10, 0.0, 0.14, 0.01, 0.01, 0.015, 0.02],
    "petrovia": [0.18, 0.01, 0.30, 0.03, 0.06, 0.0, 0.07, 0.28, 0.07, 0.0, 0.0, 0.0, 0.0],
}
TRENDS = {
    "northvale": [-0.002, 0.0008, -0.0024, 0.002, -0.0006, 0.0006, -0.0004, 0.0,
                  0.0004, 0.0005, 0.0004, 0.0003, 0.0004],
    "midland": [-0.0015, 0.0003, -0.0013, 0.0015, -0.002, 0.0008, -0.0015, 0.0,
                0.0022, 0.0003, 0.0003, 0.0004, 0.0005],
    "petrovia": [-0.0008, 0.0001, 0.0008, 0.0004, -0.0008, 0.0, -0.0005, -0.0002,
                 0.001, 0.0, 0.0, 0.0, 0.0],
}

DRIVERS = {
    # region: (pop0, pop_growth, m2_0, m2_per_year, hdd0, hdd_per_year,
    #          intensity_kj, income0, income_growth, water_sat, water_half_income)
    "northvale": (30e6, 0.002, 40.0, 0.17, 4500.0, -5.0, 120.0, 35000.0, 0.015, 1200.0, 10000.0),
    "midland": (20e6, 0.001, 30.0, 0.15, 2800.0, -4.0, 150.0, 20000.0, 0.025, 900.0, 8000.0),
    "petrovia": (25e6, -0.001, 25.0, 0.10, 3800.0, -4.0, 170.0, 15000.0, 0.020, 800.0, 9000.0),
}

GRID_START = {"northvale": 0.30, "midland": 0.45, "petrovia": 0.40}

HIST_YEARS = list(range(2007, 2015))
SIM_YEARS = list(range(2015, 2051))
GRID_ZERO_YEAR = 2040

LOW_COMFORT = ("FossilCoal", "TraditionalBiomass")
MODERN = ("FossilOil", "FossilGas", "ModernBiomass", "DistrictHeat",
          "DirectElectric", "HeatPump", "SolarThermal")


def _fmt(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return repr(v)
    return str(v)


def _write(path: Path, header: list, rows) -> None:
    lines = [",".join(header)]
    lines += [",".join(_fmt(v) for v in row) for row in rows]
    path.write_text("\n".join(lines) + "\n")


def make_synthetic_dataset(out_dir) -> Path:
    """Write the dataset CSVs into `out_dir` (created if needed)."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)

    _write(out / "regions.csv",
           ["region", "cf", "solar_cf", "kick_start_eligible", "district_present", "trad_biomass_ce"],
           [(r, *REGIONS[r]) for r in sorted(REGIONS)])

    _write(out / "technologies.csv",
           ["tech_id", "class", "ce", "lifetime_y", "learning_rate", "fuel", "carbon_kg_per_kwh",
            "ic_eur_per_kw", "ic_sd", "mr_eur_per_kw_a", "mr_sd", "subsidy_eligible"],
           [(tid, cls, ce, lt, lr, fuel, carbon, ic, ic / 3.0, mr, mr / 3.0, elig)
            for tid, cls, ce, lt, lr, fuel, carbon, ic, mr, elig in TECHNOLOGIES])

    fuel_rows = []
    for (region, fuel), mean in sorted(FUEL_PRICES.items()):
        rel = 0.0 if fuel == "solar" else (0.30 if fuel.startswith("biomass") else 0.15)
        fuel_rows.append((region, fuel, 2015, mean, mean * rel))
    _write(out / "fuel_prices.csv",
           ["region", "fuel", "year", "price_eur_per_kwh", "sd"], fuel_rows)

    share_rows = []
    for region in sorted(REGIONS):
        base, trend = SHARES_2014[region], TRENDS[region]
        for year in HIST_YEARS:
            for ti, tid in enumerate(TECH_IDS):
                share_rows.append((region, tid, year, base[ti] + trend[ti] * (year - 2014)))
    _write(out / "historical_shares.csv", ["region", "tech_id", "year", "share"], share_rows)

    driver_rows = []
    for region in sorted(REGIONS):
        p0, pg, m0, mg, h0, hg, ikj, inc0, incg, wsat, whalf = DRIVERS[region]
        for year in SIM_YEARS:
            dy = year - 2015
            nbf = min(0.35, max(0.0, 0.01 * (year - 2020)))
            driver_rows.append((
                region, year,
                p0 * (1.0 + pg * dy),
                m0 + mg * dy,
                h0 + hg * dy,
                ikj,
                inc0 * (1.0 + incg * dy),
                nbf,
                wsat, whalf,
            ))
    _write(out / "demand_drivers.csv",
           ["region", "year", "population", "m2_per_cap", "hdd", "intensity_kj", "income",
            "new_build_frac", "water_sat_kwh", "water_half_sat_income"], driver_rows)

    grid_rows = []
    for region in sorted(REGIONS):
        start = GRID_START[region]
        for year in SIM_YEARS:
            decarb = start * max(0, GRID_ZERO_YEAR - year) / (GRID_ZERO_YEAR - 2015)
            baseline = start * (1.0 - 0.4 * (year - 2015) / 35.0)
            grid_rows.append((region, year, "Decarbonisation15C", decarb))
            grid_rows.append((region, year, "PowerBaseline", baseline))
    _write(out / "grid_intensity.csv", ["region", "year", "variant", "kg_per_kwh"], grid_rows)

    mask_rows = [(frm, to, False) for frm in MODERN for to in LOW_COMFORT]
    _write(out / "comfort_mask.csv", ["from_class", "to_class", "allowed"], mask_rows)

    return out

"""Run results: self-describing time series plus canonical serialization.

The structured file is canonical JSON (sorted keys, compact separators,
shortest round-trip float repr), so identical inputs produce byte-identical
files and re-import reproduces a run bit-exactly.

State arrays (shares, rates, capacities) are snapshots at integer years;
flow arrays (fuel use, builds, money) accumulate over the calendar year
starting at their label, so the last labelled flow year is end_year - 1.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import ValidationError

SCHEMA_VERSION = 1
KG_PER_GT = 1e12


@dataclass
class RunResult:
    metadata: dict
    regions: list
    techs: list
    fuels: list
    years: list                  # snapshot years
    flow_years: list             # accumulation-year labels (years[:-1])
    shares: np.ndarray           # [region, year, tech]
    ue_rate_kwh: np.ndarray      # [region, year, tech], kWh useful per year
    final_rate_kwh: np.ndarray   # [region, year, fuel]
    capacity_kw: np.ndarray      # [region, year, tech]
    direct_rate_kg: np.ndarray   # [region, year]
    indirect_rate_kg: dict       # variant -> [region, year]
    fuel_use_kwh: np.ndarray     # [region, flow_year, fuel]
    direct_kg: np.ndarray        # [region, flow_year]
    indirect_kg: dict            # variant -> [region, flow_year]
    built_kw: np.ndarray         # [region, flow_year, tech]
    scrapped_kw: np.ndarray      # [region, flow_year, tech]
    invest_eur: np.ndarray       # [region, flow_year]
    energy_expense_eur: np.ndarray
    tax_revenue_eur: np.ndarray
    subsidy_outlay_eur: np.ndarray
    ic_mean_eur_per_kw: np.ndarray  # [year, tech], learning trajectory
    diagnostics: dict = field(default_factory=dict)

    # ----- derived quantities -----

    def year_index(self, year: int) -> int:
        return self.years.index(year)

    def cumulative_direct_kg(self, start: int | None = None, end: int | None = None) -> float:
        """Direct emissions accumulated over flow years in [start, end)."""
        mask = self.flow_mask(start, end)
        return float(self.direct_kg[:, mask].sum())

    def cumulative_indirect_kg(self, variant: str, start=None, end=None) -> float:
        mask = self.flow_mask(start, end)
        return float(self.indirect_kg[variant][:, mask].sum())

    def flow_mask(self, start, end):
        fy = np.asarray(self.flow_years)
        lo = fy[0] if start is None else start
        hi = fy[-1] + 1 if end is None else end
        return (fy >= lo) & (fy < hi)

    def fossil_share(self, fossil_idx) -> np.ndarray:
        """Aggregate fossil market share per year, demand-weighted across regions."""
        ue_total = self.ue_rate_kwh.sum(axis=2)
        fossil_ue = self.ue_rate_kwh[:, :, fossil_idx].sum(axis=2)
        return fossil_ue.sum(axis=0) / ue_total.sum(axis=0)

    def money_totals(self) -> dict:
        return {
            "invest_eur": float(self.invest_eur.sum()),
            "energy_eur": float(self.energy_expense_eur.sum()),
            "tax_revenue_eur": float(self.tax_revenue_eur.sum()),
            "subsidy_outlay_eur": float(self.subsidy_outlay_eur.sum()),
        }

    # ----- serialization -----

    def to_payload(self) -> dict:
        return {
            "schema_version": SCHEMA_VERSION,
            "metadata": self.metadata,
            "regions": self.regions,
            "techs": self.techs,
            "fuels": self.fuels,
            "years": self.years,
            "flow_years": self.flow_years,
            "shares": self.shares.tolist(),
            "ue_rate_kwh": self.ue_rate_kwh.tolist(),
            "final_rate_kwh": self.final_rate_kwh.tolist(),
            "capacity_kw": self.capacity_kw.tolist(),
            "direct_rate_kg": self.direct_rate_kg.tolist(),
            "indirect_rate_kg": {k: v.tolist() for k, v in sorted(self.indirect_rate_kg.items())},
            "fuel_use_kwh": self.fuel_use_kwh.tolist(),
            "direct_kg": self.direct_kg.tolist(),
            "indirect_kg": {k: v.tolist() for k, v in sorted(self.indirect_kg.items())},
            "built_kw": self.built_kw.tolist(),
            "scrapped_kw": self.scrapped_kw.tolist(),
            "invest_eur": self.invest_eur.tolist(),
            "energy_expense_eur": self.energy_expense_eur.tolist(),
            "tax_revenue_eur": self.tax_revenue_eur.tolist(),
            "subsidy_outlay_eur": self.subsidy_outlay_eur.tolist(),
            "ic_mean_eur_per_kw": self.ic_mean_eur_per_kw.tolist(),
            "diagnostics": self.diagnostics,
        }

    def to_canonical_bytes(self) -> bytes:
        return canonical_json_bytes(self.to_payload())

    @classmethod
    def from_payload(cls, p: dict) -> "RunResult":
        if p.get("schema_version") != SCHEMA_VERSION:
            raise ValidationError(f"unsupported run schema version {p.get('schema_version')}")
        arr = lambda k: np.asarray(p[k], dtype=float)
        return cls(
            metadata=p["metadata"],
            regions=list(p["regions"]),
            techs=list(p["techs"]),
            fuels=list(p["fuels"]),
            years=[int(y) for y in p["years"]],
            flow_years=[int(y) for y in p["flow_years"]],
            shares=arr("shares"),
            ue_rate_kwh=arr("ue_rate_kwh"),
            final_rate_kwh=arr("final_rate_kwh"),
            capacity_kw=arr("capacity_kw"),
            direct_rate_kg=arr("direct_rate_kg"),
            indirect_rate_kg={k: np.asarray(v, dtype=float) for k, v in p["indirect_rate_kg"].items()},
            fuel_use_kwh=arr("fuel_use_kwh"),
            direct_kg=arr("direct_kg"),
            indirect_kg={k: np.asarray(v, dtype=float) for k, v in p["indirect_kg"].items()},
            built_kw=arr("built_kw"),
            scrapped_kw=arr("scrapped_kw"),
            invest_eur=arr("invest_eur"),
            energy_expense_eur=arr("energy_expense_eur"),
            tax_revenue_eur=arr("tax_revenue_eur"),
            subsidy_outlay_eur=arr("subsidy_outlay_eur"),
            ic_mean_eur_per_kw=arr("ic_mean_eur_per_kw"),
            diagnostics=p.get("diagnostics", {}),
        )

    def save(self, path) -> Path:
        path = Path(path)
        path.write_bytes(self.to_canonical_bytes())
        return path

    @classmethod
    def load(cls, path) -> "RunResult":
        return cls.from_payload(json.loads(Path(path).read_text()))


def canonical_json_bytes(payload) -> bytes:
    return json.dumps(payload, sort_keys=True, separators=(",", ":"), allow_nan=False).encode()


# ----- CSV report bundle -----

def _write_csv(path: Path, header: list, rows) -> None:
    with open(path, "w", newline="") as f:
        f.write(",".join(header) + "\n")
        for row in rows:
            f.write(",".join(repr(v) if isinstance(v, float) else str(v) for v in row) + "\n")


def export_csv_bundle(run: RunResult, out_dir) -> list[Path]:
    """One CSV per report; row order fixed (region, year, tech/fuel)."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    written = []

    def emit(name, header, rows):
        p = out / name
        _write_csv(p, header, rows)
        written.append(p)

    emit("shares.csv", ["region", "year", "tech_id", "share"],
         ((r, y, t, float(run.shares[ri, yi, ti]))
          for ri, r in enumerate(run.regions)
          for yi, y in enumerate(run.years)
          for ti, t in enumerate(run.techs)))
    emit("useful_energy.csv", ["region", "year", "tech_id", "ue_kwh_per_year"],
         ((r, y, t, float(run.ue_rate_kwh[ri, yi, ti]))
          for ri, r in enumerate(run.regions)
          for yi, y in enumerate(run.years)
          for ti, t in enumerate(run.techs)))
    emit("final_energy.csv", ["region", "year", "fuel", "kwh_per_year"],
         ((r, y, fu, float(run.final_rate_kwh[ri, yi, fi]))
          for ri, r in enumerate(run.regions)
          for yi, y in enumerate(run.years)
          for fi, fu in enumerate(run.fuels)))
    emit("capacity.csv", ["region", "year", "tech_id", "kw"],
         ((r, y, t, float(run.capacity_kw[ri, yi, ti]))
          for ri, r in enumerate(run.regions)
          for yi, y in enumerate(run.years)
          for ti, t in enumerate(run.techs)))
    emit("flows.csv", ["region", "year", "tech_id", "built_kw", "scrapped_kw"],
         ((r, y, t, float(run.built_kw[ri, yi, ti]), float(run.scrapped_kw[ri, yi, ti]))
          for ri, r in enumerate(run.regions)
          for yi, y in enumerate(run.flow_years)
          for ti, t in enumerate(run.techs)))
    emit("emissions.csv",
         ["region", "year", "direct_rate_kg", "indirect_decarb_rate_kg", "indirect_baseline_rate_kg"],
         ((r, y, float(run.direct_rate_kg[ri, yi]),
           float(run.indirect_rate_kg["Decarbonisation15C"][ri, yi]),
           float(run.indirect_rate_kg["PowerBaseline"][ri, yi]))
          for ri, r in enumerate(run.regions)
          for yi, y in enumerate(run.years)))
    emit("emissions_cumulative.csv",
         ["region", "year", "direct_kg", "indirect_decarb_kg", "indirect_baseline_kg"],
         ((r, y, float(run.direct_kg[ri, yi]),
           float(run.indirect_kg["Decarbonisation15C"][ri, yi]),
           float(run.indirect_kg["PowerBaseline"][ri, yi]))
          for ri, r in enumerate(run.regions)
          for yi, y in enumerate(run.flow_years)))
    emit("money.csv",
         ["region", "year", "invest_eur", "energy_eur", "tax_revenue_eur", "subsidy_outlay_eur"],
         ((r, y, float(run.invest_eur[ri, yi]), float(run.energy_expense_eur[ri, yi]),
           float(run.tax_revenue_eur[ri, yi]), float(run.subsidy_outlay_eur[ri, yi]))
          for ri, r in enumerate(run.regions)
          for yi, y in enumerate(run.flow_years)))
    emit("table1.csv",
         ["scenario", "heating_gt", "elec_decarb_gt", "elec_baseline_gt",
          "total_decarb_gt", "total_baseline_gt"],
         [table1_row(run)])
    return written


def table1_row(run: RunResult, start: int = 2020, end: int = 2050) -> tuple:
    """Cumulative emissions over [start, end) in GtCO2, by account."""
    heating = run.cumulative_direct_kg(start, end) / KG_PER_GT
    elec_d = run.cumulative_indirect_kg("Decarbonisation15C", start, end) / KG_PER_GT
    elec_b = run.cumulative_indirect_kg("PowerBaseline", start, end) / KG_PER_GT
    sid = run.metadata.get("scenario", {}).get("id", "?")
    return (sid, heating, elec_d, elec_b, heating + elec_d, heating + elec_b)


def export_structured(run: RunResult, out_dir, name: str = "run.json") -> Path:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    return run.save(out / name)


def export_results(run: RunResult, out_dir, fmt: str = "csv") -> list[Path]:
    """Export a run as a CSV bundle, a structured file, or both ("all")."""
    if fmt not in ("csv", "structured", "all"):
        raise ValidationError(f"unknown export format '{fmt}'")
    written = []
    if fmt in ("structured", "all"):
        written.append(export_structured(run, out_dir))
    if fmt in ("csv", "all"):
        written.extend(export_csv_bundle(run, out_dir))
    return written

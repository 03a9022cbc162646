/** Payload shapes of the heatmix studio service. */

export interface SeriesPayload {
  years: number[];
  values: number[];
}

export interface DatasetInfo {
  id: string;
  regions: string[];
  techs: string[];
  fuels: string[];
  hash: string;
  has_gammas: boolean;
}

export interface SessionInfo {
  session_id: string;
  dataset: string;
  regions: string[];
  techs: string[];
  gamma_init: string;
}

export interface RegionInfo {
  region: string;
  handover_year: number;
  historical: { years: number[]; shares: Record<string, number[]> };
  gamma_eur_per_kwh: Record<string, number>;
  gamma_bound_eur_per_kwh: Record<string, number>;
  residual_tolerance_per_year: number;
  kick_start_eligible: boolean;
}

export interface ProjectionPayload {
  region: string;
  handover_year: number;
  years: number[];
  shares: Record<string, number[]>;
  residuals: Record<string, number>;
  gamma_eur_per_kwh: Record<string, number>;
}

export interface CalibrateResult {
  converged: boolean;
  gauge_tech: string | null;
  residuals: Record<string, number>;
  projection: ProjectionPayload;
}

export interface RunStatus {
  run_id: string;
  state: "queued" | "running" | "done" | "error";
  progress: { region: string | null; year: number | null };
  error: string | null;
}

export interface SharesReport {
  years: number[];
  regions: { region: string; stacks: { tech_id: string; values: number[] }[] }[];
}

export interface EmissionsBlock {
  direct: number[];
  indirect_decarb: number[];
  indirect_baseline: number[];
  total_decarb: number[];
  total_baseline: number[];
}

export interface EmissionsReport {
  years: number[];
  regions: ({ region: string } & EmissionsBlock)[];
  global: EmissionsBlock;
}

export interface MoneyBlock {
  invest_eur: number[];
  energy_eur: number[];
  tax_revenue_eur: number[];
  subsidy_outlay_eur: number[];
}

export interface MoneyReport {
  years: number[];
  regions: ({ region: string } & MoneyBlock)[];
  global: MoneyBlock;
}

export interface CompareTotals {
  invest_eur: number;
  energy_eur: number;
  tax_revenue_eur: number;
  subsidy_outlay_eur: number;
  direct_kg: number;
  indirect_decarb_kg: number;
  indirect_baseline_kg: number;
}

export interface ComparePayload {
  run: string;
  reference: string;
  run_id: string;
  reference_id: string;
  years: [number, number];
  truncated: boolean;
  run_totals: CompareTotals;
  reference_totals: CompareTotals;
  deltas: CompareTotals;
  eur_per_tco2_net_reduction?: number;
}

export interface ScenarioSpecPayload {
  id: string;
  demand_variant: {
    kind: string;
    new_build_reduction: number;
    target_intensity: number;
    target_year: number;
  };
  schedule: Record<string, unknown>;
  power_variant: string;
  notes: string;
}

export interface ScenarioFormState {
  id: string;
  demand_variant: string;
  carbon_tax_start: number;
  subsidy_rates: Record<string, number>;
  electricity_subsidy_eur_per_kwh: number;
  electric_ic_subsidy: number;
  kick_start_regions: string[];
  power_variant: string;
  notes: string;
}

export interface FieldError {
  loc: (string | number)[];
  msg: string;
}

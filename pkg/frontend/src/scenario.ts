/** Scenario form: compose tax/subsidy/kick-start settings, or pick a
 * read-only preset, then launch a run.
 *
 * The form never constructs policy schedules itself; it submits the compact
 * field set to the server's scenario builder, which returns the full spec
 * or a field-path error list used to highlight offending inputs.
 */

import { ApiError, StudioApi } from "./api.js";
import type { ScenarioFormState, ScenarioSpecPayload } from "./types.js";

const SUBSIDY_CLASSES = ["SolarThermal", "HeatPump", "ModernBiomass"];
const DEMAND_VARIANTS = ["Baseline90by2100", "Insulation19", "Retrofit45by2050"];
const POWER_VARIANTS = ["Decarbonisation15C", "PowerBaseline"];

export class ScenarioForm {
  readonly root: HTMLElement;
  private api: StudioApi;
  private sessionId: string;
  private regions: string[];
  private presets: ScenarioSpecPayload[] = [];
  onLaunched: ((runId: string, spec: ScenarioSpecPayload | { preset: string }) => void) | null = null;

  constructor(root: HTMLElement, api: StudioApi, sessionId: string, regions: string[]) {
    this.root = root;
    this.api = api;
    this.sessionId = sessionId;
    this.regions = regions;
  }

  async load(): Promise<void> {
    this.presets = await this.api.presets();
    this.render();
  }

  readForm(): ScenarioFormState {
    const val = (name: string) =>
      (this.root.querySelector(`[name="${name}"]`) as HTMLInputElement | HTMLSelectElement).value;
    const subsidies: Record<string, number> = {};
    for (const cls of SUBSIDY_CLASSES) {
      const v = Number(val(`subsidy_${cls}`));
      if (v) subsidies[cls] = v;
    }
    const kicks = this.regions.filter(
      (r) => (this.root.querySelector(`[name="kick_${r}"]`) as HTMLInputElement).checked,
    );
    return {
      id: val("scenario_id") || "custom",
      demand_variant: val("demand_variant"),
      carbon_tax_start: Number(val("carbon_tax_start")),
      subsidy_rates: subsidies,
      electricity_subsidy_eur_per_kwh: Number(val("electricity_subsidy")),
      electric_ic_subsidy: Number(val("electric_ic_subsidy")),
      kick_start_regions: kicks,
      power_variant: val("power_variant"),
      notes: "",
    };
  }

  /** Build the spec server-side; highlights offending fields on a 422. */
  async buildSpec(): Promise<ScenarioSpecPayload | null> {
    this.clearFieldErrors();
    try {
      return await this.api.buildScenario(this.readForm());
    } catch (err) {
      if (err instanceof ApiError && err.fields.length) {
        for (const field of err.fields) {
          this.markFieldError(field.loc.map(String), field.msg);
        }
        return null;
      }
      throw err;
    }
  }

  async launch(): Promise<string | null> {
    const presetPicker = this.root.querySelector('[name="preset"]') as HTMLSelectElement;
    let body: { preset?: string; scenario?: ScenarioSpecPayload };
    if (presetPicker.value) {
      body = { preset: presetPicker.value };
    } else {
      const spec = await this.buildSpec();
      if (!spec) return null;
      body = { scenario: spec };
    }
    const { run_id } = await this.api.startRun(this.sessionId, body);
    this.onLaunched?.(run_id, body.scenario ?? { preset: body.preset as string });
    return run_id;
  }

  private clearFieldErrors(): void {
    for (const el of this.root.querySelectorAll(".field-error")) el.classList.remove("field-error");
    for (const el of this.root.querySelectorAll(".field-error-msg")) el.remove();
  }

  private markFieldError(loc: string[], msg: string): void {
    // server paths look like body.carbon_tax_start or body.subsidy_rates.HeatPump
    const tail = loc[loc.length - 1];
    const name = loc.includes("subsidy_rates") && tail !== "subsidy_rates"
      ? `subsidy_${tail}`
      : loc.includes("kick_start_regions") && tail !== "kick_start_regions"
        ? `kick_${tail}`
        : tail;
    const el = this.root.querySelector(`[name="${name}"]`);
    if (el) {
      el.classList.add("field-error");
      const note = document.createElement("span");
      note.className = "field-error-msg";
      note.textContent = msg;
      el.insertAdjacentElement("afterend", note);
    }
  }

  private field(labelText: string, input: HTMLElement): HTMLElement {
    const wrap = document.createElement("label");
    wrap.className = "form-field";
    const span = document.createElement("span");
    span.textContent = labelText;
    wrap.appendChild(span);
    wrap.appendChild(input);
    return wrap;
  }

  private render(): void {
    this.root.textContent = "";
    const form = document.createElement("form");
    form.className = "scenario-form";
    form.addEventListener("submit", (e) => e.preventDefault());

    const presetPicker = document.createElement("select");
    presetPicker.name = "preset";
    const custom = document.createElement("option");
    custom.value = "";
    custom.textContent = "custom scenario";
    presetPicker.appendChild(custom);
    for (const p of this.presets) {
      const opt = document.createElement("option");
      opt.value = p.id;
      opt.textContent = `preset ${p.id}: ${p.notes || "(no notes)"}`;
      presetPicker.appendChild(opt);
    }
    presetPicker.addEventListener("change", () => {
      const fieldset = form.querySelector("fieldset") as HTMLFieldSetElement;
      fieldset.disabled = presetPicker.value !== "";   // presets are read-only
    });
    form.appendChild(this.field("scenario", presetPicker));

    const fieldset = document.createElement("fieldset");
    fieldset.className = "custom-fields";

    const idInput = document.createElement("input");
    idInput.name = "scenario_id";
    idInput.value = "custom";
    fieldset.appendChild(this.field("id", idInput));

    const demand = document.createElement("select");
    demand.name = "demand_variant";
    for (const v of DEMAND_VARIANTS) {
      const opt = document.createElement("option");
      opt.value = v;
      opt.textContent = v;
      opt.selected = v === "Retrofit45by2050";
      demand.appendChild(opt);
    }
    fieldset.appendChild(this.field("demand variant", demand));

    const tax = document.createElement("input");
    tax.type = "number";
    tax.name = "carbon_tax_start";
    tax.value = "0";
    tax.min = "0";
    fieldset.appendChild(this.field("carbon tax start (EUR/tCO2, escalating)", tax));

    for (const cls of SUBSIDY_CLASSES) {
      const input = document.createElement("input");
      input.type = "number";
      input.name = `subsidy_${cls}`;
      input.value = "0";
      input.min = "0";
      input.max = "1";
      input.step = "0.05";
      fieldset.appendChild(this.field(`${cls} subsidy rate`, input));
    }

    const elecSub = document.createElement("input");
    elecSub.type = "number";
    elecSub.name = "electricity_subsidy";
    elecSub.value = "0";
    elecSub.step = "0.01";
    fieldset.appendChild(this.field("electricity subsidy (EUR/kWh)", elecSub));

    const elecIc = document.createElement("input");
    elecIc.type = "number";
    elecIc.name = "electric_ic_subsidy";
    elecIc.value = "0";
    elecIc.step = "0.05";
    fieldset.appendChild(this.field("electric-system purchase subsidy", elecIc));

    for (const r of this.regions) {
      const box = document.createElement("input");
      box.type = "checkbox";
      box.name = `kick_${r}`;
      fieldset.appendChild(this.field(`kick-start ${r}`, box));
    }

    const power = document.createElement("select");
    power.name = "power_variant";
    for (const v of POWER_VARIANTS) {
      const opt = document.createElement("option");
      opt.value = v;
      opt.textContent = v;
      power.appendChild(opt);
    }
    fieldset.appendChild(this.field("power-sector variant", power));

    form.appendChild(fieldset);

    const launch = document.createElement("button");
    launch.className = "launch";
    launch.textContent = "launch run";
    launch.addEventListener("click", () => void this.launch());
    form.appendChild(launch);

    this.root.appendChild(form);
  }
}

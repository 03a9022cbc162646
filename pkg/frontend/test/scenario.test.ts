/** Scenario form: server-built specs and field-error highlighting. */

import { beforeEach, describe, expect, it } from "vitest";

import { StudioApi } from "../src/api.js";
import { ScenarioForm } from "../src/scenario.js";
import type { ScenarioSpecPayload } from "../src/types.js";
import { errorBody, fakeFetch, fixture } from "./helpers.js";

const presets = fixture<ScenarioSpecPayload[]>("presets.json");

function makeForm(extraRoute?: (url: string, init?: RequestInit) => unknown) {
  const api = new StudioApi("", fakeFetch(
    (url, init) => extraRoute?.(url, init),
    (url) => (url.endsWith("/scenarios/presets") ? presets : undefined),
    (url, init) => {
      if (url.endsWith("/scenarios/build")) {
        const body = JSON.parse(String(init?.body));
        if (body.carbon_tax_start < 0) {
          return errorBody(422, [{ loc: ["body", "carbon_tax_start"], msg: "must be >= 0" }]);
        }
        if ((body.subsidy_rates?.HeatPump ?? 0) > 1) {
          return errorBody(422, [{ loc: ["body", "subsidy_rates", "HeatPump"],
                                   msg: "subsidy rate must be in [0, 1]" }]);
        }
        return { ...presets[3], id: body.id, notes: body.notes };
      }
      if (url.endsWith("/runs") && init?.method === "POST") return { run_id: "r123" };
      return undefined;
    },
  ));
  const root = document.createElement("div");
  document.body.appendChild(root);
  return new ScenarioForm(root, api, "sess", ["midland", "northvale", "petrovia"]);
}

beforeEach(() => {
  document.body.innerHTML = "";
});

describe("scenario form", () => {
  it("lists the presets a-j read-only", async () => {
    const form = makeForm();
    await form.load();
    const picker = form.root.querySelector('[name="preset"]') as HTMLSelectElement;
    const values = [...picker.options].map((o) => o.value);
    expect(values).toEqual(["", ..."abcdefghij".split("")]);
    picker.value = "h";
    picker.dispatchEvent(new Event("change"));
    expect((form.root.querySelector("fieldset") as HTMLFieldSetElement).disabled).toBe(true);
  });

  it("serializes the custom fields into a compact build request", async () => {
    const form = makeForm();
    await form.load();
    (form.root.querySelector('[name="carbon_tax_start"]') as HTMLInputElement).value = "50";
    (form.root.querySelector('[name="subsidy_HeatPump"]') as HTMLInputElement).value = "0.5";
    (form.root.querySelector('[name="kick_petrovia"]') as HTMLInputElement).checked = true;
    const state = form.readForm();
    expect(state.carbon_tax_start).toBe(50);
    expect(state.subsidy_rates).toEqual({ HeatPump: 0.5 });
    expect(state.kick_start_regions).toEqual(["petrovia"]);
    const spec = await form.buildSpec();
    expect(spec?.schedule).toBeDefined();
  });

  it("highlights offending fields from the server's error paths", async () => {
    const form = makeForm();
    await form.load();
    (form.root.querySelector('[name="subsidy_HeatPump"]') as HTMLInputElement).value = "1.4";
    const spec = await form.buildSpec();
    expect(spec).toBeNull();
    const marked = form.root.querySelector(".field-error") as HTMLInputElement;
    expect(marked.name).toBe("subsidy_HeatPump");
    expect(form.root.querySelector(".field-error-msg")?.textContent).toContain("[0, 1]");
    // errors clear on the next valid build
    marked.value = "0.5";
    await form.buildSpec();
    expect(form.root.querySelector(".field-error")).toBeFalsy();
  });

  it("launching a preset posts the preset id and reports the run", async () => {
    const form = makeForm();
    await form.load();
    const launched: string[] = [];
    form.onLaunched = (runId) => launched.push(runId);
    const picker = form.root.querySelector('[name="preset"]') as HTMLSelectElement;
    picker.value = "e";
    const runId = await form.launch();
    expect(runId).toBe("r123");
    expect(launched).toEqual(["r123"]);
  });
});

/** Calibration view against fixture payloads and a scripted fake service. */

import { beforeEach, describe, expect, it } from "vitest";

import { StudioApi } from "../src/api.js";
import { auditView } from "../src/audit.js";
import { CalibrationView } from "../src/calibration.js";
import type { ProjectionPayload, RegionInfo } from "../src/types.js";
import { errorBody, fakeFetch, fixture } from "./helpers.js";

const regionsFixture = fixture<RegionInfo[]>("regions.json");
const projectionFixture = fixture<ProjectionPayload>("projection_northvale.json");

/** Scripted service: gamma updates mutate the projection deterministically
 * so the view's re-render can be checked against the returned payload. */
function scriptedService() {
  const projections = new Map<string, ProjectionPayload>();
  for (const info of regionsFixture) {
    const proj = structuredClone(projectionFixture);
    proj.region = info.region;
    projections.set(info.region, proj);
  }

  const routes = (url: string, init?: RequestInit) => {
    if (url.endsWith("/regions")) return regionsFixture;
    if (url.includes("/projection")) {
      const region = new URL(url, "http://x").searchParams.get("region") as string;
      return projections.get(region) ?? errorBody(404, "unknown region");
    }
    if (url.endsWith("/gamma") && init?.method === "PUT") {
      const body = JSON.parse(String(init.body)) as {
        region: string; tech_id: string; value_eur_per_kwh: number };
      const current = projections.get(body.region) as ProjectionPayload;
      const gamma = { ...current.gamma_eur_per_kwh, [body.tech_id]: body.value_eur_per_kwh };
      // like the real engine, the scripted projection is a pure function of
      // the gamma vector: shares bend in proportion to the gamma offset from
      // the pristine fixture, so identical gammas give identical payloads
      const proj = structuredClone(projectionFixture);
      proj.region = body.region;
      proj.gamma_eur_per_kwh = gamma;
      for (const [tech, value] of Object.entries(gamma)) {
        const offset = value - projectionFixture.gamma_eur_per_kwh[tech];
        if (offset === 0) continue;
        const series = proj.shares[tech];
        const delta = -offset * 0.1;
        proj.shares[tech] = series.map((v, i) => Math.max(0, v + (delta * i) / series.length));
        proj.residuals[tech] = projectionFixture.residuals[tech] - delta;
      }
      projections.set(body.region, proj);
      return proj;
    }
    return undefined;
  };
  return { routes, projections };
}

async function makeView() {
  const { routes } = scriptedService();
  const api = new StudioApi("", fakeFetch(routes));
  const root = document.createElement("div");
  document.body.appendChild(root);
  const view = new CalibrationView(root, api, "sess");
  await view.load();
  await view.selectRegion("northvale");
  return view;
}

beforeEach(() => {
  document.body.innerHTML = "";
});

describe("calibration view", () => {
  it("renders sliders, chart and residual badges from the payload", async () => {
    const view = await makeView();
    const techs = Object.keys(projectionFixture.gamma_eur_per_kwh);
    expect(view.root.querySelectorAll(".slider-row").length).toBe(techs.length);
    expect(view.root.querySelectorAll(".calibration-chart").length).toBe(1);
    expect(view.root.querySelector("line.year-rule")).toBeTruthy();
    const badges = view.root.querySelectorAll(".residual-badge");
    expect(badges.length).toBe(techs.length);
  });

  it("audits clean: every numeric traces to the region or projection payload", async () => {
    const view = await makeView();
    const northvale = regionsFixture.find((r) => r.region === "northvale") as RegionInfo;
    const violations = auditView(view.root, {
      region: northvale,
      projection: view.currentProjection,
    });
    expect(violations).toEqual([]);
  });

  it("slider change issues one update and re-renders the returned payload exactly", async () => {
    const view = await makeView();
    const payload = await view.setGamma("hp_ground", 0.02);
    const row = view.root.querySelector('[data-tech="hp_ground"]') as HTMLElement;
    const slider = row.querySelector(".gamma-slider") as HTMLInputElement;
    expect(Number(slider.value)).toBe(0.02);   // round-trips exactly through the API
    const readout = row.querySelector(".gamma-readout") as HTMLElement;
    expect(Number(readout.getAttribute("data-value"))).toBe(payload.gamma_eur_per_kwh.hp_ground);
    const endShare = row.querySelector(".end-share") as HTMLElement;
    const series = payload.shares.hp_ground;
    expect(Number(endShare.getAttribute("data-value"))).toBe(series[series.length - 1]);
  });

  it("a large positive gamma bends the projected curve down", async () => {
    const view = await makeView();
    const before = (view.currentProjection as ProjectionPayload).shares.hp_ground;
    const after = (await view.setGamma("hp_ground", 0.05)).shares.hp_ground;
    const slope = (s: number[]) => s[s.length - 1] - s[0];
    expect(slope(after)).toBeLessThan(slope(before));
  });

  it("revert restores the loaded projection bit for bit", async () => {
    const view = await makeView();
    const before = JSON.stringify(view.currentProjection);
    await view.setGamma("gas", 0.03);
    const row = view.root.querySelector('[data-tech="gas"]') as HTMLElement;
    (row.querySelector(".revert") as HTMLButtonElement).click();
    await new Promise((r) => setTimeout(r, 0));
    expect(JSON.stringify(view.currentProjection)).toBe(before);
  });

  it("residual badges recolor when the tolerance is crossed", async () => {
    const view = await makeView();
    const northvale = regionsFixture.find((r) => r.region === "northvale") as RegionInfo;
    const tol = northvale.residual_tolerance_per_year;
    for (const row of view.root.querySelectorAll(".slider-row")) {
      const badge = row.querySelector(".residual-badge") as HTMLElement;
      const residual = Math.abs(Number(badge.getAttribute("data-value")));
      expect(badge.classList.contains(residual <= tol ? "ok" : "off")).toBe(true);
    }
    // push one residual far out and check the badge flips
    await view.setGamma("coal", 0.08);
    const coalBadge = view.root.querySelector(
      '[data-tech="coal"] .residual-badge') as HTMLElement;
    expect(coalBadge.classList.contains("off")).toBe(true);
  });

  it("API failure surfaces as a non-blocking banner with retry", async () => {
    let fail = true;
    const { routes } = scriptedService();
    const api = new StudioApi("", fakeFetch((url, init) => {
      if (url.endsWith("/gamma") && fail) return errorBody(500, "boom");
      return routes(url, init);
    }));
    const root = document.createElement("div");
    document.body.appendChild(root);
    const view = new CalibrationView(root, api, "sess");
    await view.load();
    await view.selectRegion("northvale");
    await expect(view.setGamma("gas", 0.01)).rejects.toThrow();
    const banner = root.querySelector(".banner.error");
    expect(banner).toBeTruthy();
    expect(root.querySelectorAll(".slider-row").length).toBeGreaterThan(0); // view still usable
    fail = false;
    (banner?.querySelector("button") as HTMLButtonElement).click();
    await new Promise((r) => setTimeout(r, 0));
    expect(root.querySelector(".banner.error")).toBeFalsy();
  });
});

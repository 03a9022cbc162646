/** Calibration view: per-technology gamma sliders with an overlaid
 * historical/projected share chart and residual badges.
 *
 * Slider moves issue one gamma update each and re-render from the response
 * payload; the view itself computes nothing beyond pixel geometry. Slider
 * values round-trip exactly: the projection payload's gamma comes back into
 * the slider and its numeric readout.
 */

import { StudioApi } from "./api.js";
import { bindNumber, fmtGammaCents, fmtResidual, fmtShare, fmtYear } from "./format.js";
import { chartFrame, drawSeries, drawYearRule, techColor } from "./svg.js";
import type { ProjectionPayload, RegionInfo } from "./types.js";

const SLIDER_STEPS = 400;

export class CalibrationView {
  readonly root: HTMLElement;
  private api: StudioApi;
  private sessionId: string;
  private regions: RegionInfo[] = [];
  private current: RegionInfo | null = null;
  private projection: ProjectionPayload | null = null;
  private loadedGamma: Record<string, number> = {};
  private busy = false;
  onUpdate: ((p: ProjectionPayload) => void) | null = null;

  constructor(root: HTMLElement, api: StudioApi, sessionId: string) {
    this.root = root;
    this.api = api;
    this.sessionId = sessionId;
  }

  async load(): Promise<void> {
    this.regions = await this.api.regions(this.sessionId);
    await this.selectRegion(this.regions[0].region);
  }

  async selectRegion(region: string): Promise<void> {
    this.current = this.regions.find((r) => r.region === region) ?? null;
    if (!this.current) throw new Error(`unknown region ${region}`);
    this.projection = await this.api.projection(this.sessionId, region);
    this.loadedGamma = { ...this.projection.gamma_eur_per_kwh };
    this.render();
  }

  async setGamma(techId: string, value: number): Promise<ProjectionPayload> {
    if (!this.current) throw new Error("no region selected");
    this.busy = true;
    try {
      this.projection = await this.api.setGamma(this.sessionId, this.current.region, techId, value);
      this.render();
      this.onUpdate?.(this.projection);
      return this.projection;
    } catch (err) {
      this.showBanner(`update failed: ${(err as Error).message}`, () => this.setGamma(techId, value));
      throw err;
    } finally {
      this.busy = false;
    }
  }

  async autoCalibrate(): Promise<void> {
    if (!this.current) return;
    const region = this.current.region;
    try {
      const result = await this.api.autoCalibrate(this.sessionId, region);
      this.projection = result[region].projection;
      this.loadedGamma = { ...this.projection.gamma_eur_per_kwh };
      this.render();
      this.onUpdate?.(this.projection);
    } catch (err) {
      this.showBanner(`calibration failed: ${(err as Error).message}`, () => this.autoCalibrate());
    }
  }

  private showBanner(message: string, retry: () => void): void {
    const banner = document.createElement("div");
    banner.className = "banner error";
    banner.textContent = message + " ";
    const button = document.createElement("button");
    button.textContent = "retry";
    button.addEventListener("click", () => {
      banner.remove();
      retry();
    });
    banner.appendChild(button);
    this.root.prepend(banner);
  }

  private render(): void {
    const region = this.current;
    const proj = this.projection;
    if (!region || !proj) return;
    this.root.textContent = "";

    const picker = document.createElement("select");
    picker.className = "region-picker";
    for (const r of this.regions) {
      const opt = document.createElement("option");
      opt.value = r.region;
      opt.textContent = r.region;
      opt.selected = r.region === region.region;
      picker.appendChild(opt);
    }
    picker.addEventListener("change", () => void this.selectRegion(picker.value));
    this.root.appendChild(picker);

    const autoButton = document.createElement("button");
    autoButton.className = "auto-calibrate";
    autoButton.textContent = "auto-calibrate";
    autoButton.addEventListener("click", () => void this.autoCalibrate());
    this.root.appendChild(autoButton);

    this.root.appendChild(this.renderChart(region, proj));
    this.root.appendChild(this.renderSliders(region, proj));
  }

  private renderChart(region: RegionInfo, proj: ProjectionPayload): SVGSVGElement {
    const techs = Object.keys(region.historical.shares);
    const histYears = region.historical.years;
    const projYears = proj.years;
    const allYears = [...histYears, ...projYears];
    let top = 0;
    for (const t of techs) {
      top = Math.max(top, ...region.historical.shares[t], ...proj.shares[t]);
    }
    const frame = chartFrame(560, 260, [allYears[0], projYears[projYears.length - 1]], [0, top * 1.05]);
    frame.svg.classList.add("calibration-chart");
    techs.forEach((t, i) => {
      drawSeries(frame, histYears, region.historical.shares[t],
                 `region:historical.shares.${t}`, { stroke: techColor(i), width: 1.2 });
      drawSeries(frame, projYears, proj.shares[t],
                 `projection:shares.${t}`, { stroke: techColor(i), dashed: true, width: 1.8 });
    });
    drawYearRule(frame, proj.handover_year, fmtYear(proj.handover_year), "projection:handover_year");
    const x0 = document.createElementNS("http://www.w3.org/2000/svg", "text");
    x0.setAttribute("x", "4");
    x0.setAttribute("y", String(frame.height - 4));
    x0.setAttribute("font-size", "9");
    bindNumber(x0, "region:historical.years[0]", histYears[0], fmtYear(histYears[0]));
    frame.plot.appendChild(x0);
    const x1 = document.createElementNS("http://www.w3.org/2000/svg", "text");
    x1.setAttribute("x", String(frame.width - 34));
    x1.setAttribute("y", String(frame.height - 4));
    x1.setAttribute("font-size", "9");
    const lastIdx = projYears.length - 1;
    bindNumber(x1, `projection:years[${lastIdx}]`, projYears[lastIdx], fmtYear(projYears[lastIdx]));
    frame.plot.appendChild(x1);
    return frame.svg;
  }

  private renderSliders(region: RegionInfo, proj: ProjectionPayload): HTMLElement {
    const wrap = document.createElement("div");
    wrap.className = "sliders";
    const tol = region.residual_tolerance_per_year;
    const techs = Object.keys(proj.gamma_eur_per_kwh);
    techs.forEach((tech, i) => {
      const row = document.createElement("div");
      row.className = "slider-row";
      row.dataset.tech = tech;

      const label = document.createElement("span");
      label.className = "tech-label";
      label.style.color = techColor(i);
      label.textContent = tech;
      row.appendChild(label);

      const bound = region.gamma_bound_eur_per_kwh[tech];
      const value = proj.gamma_eur_per_kwh[tech];
      const slider = document.createElement("input");
      slider.type = "range";
      slider.min = String(-bound);
      slider.max = String(bound);
      slider.step = String((2 * bound) / SLIDER_STEPS || 1);
      slider.value = String(value);
      slider.className = "gamma-slider";
      slider.addEventListener("change", () => void this.setGamma(tech, Number(slider.value)));
      row.appendChild(slider);

      const readout = document.createElement("span");
      readout.className = "gamma-readout";
      bindNumber(readout, `projection:gamma_eur_per_kwh.${tech}`, value, fmtGammaCents(value));
      row.appendChild(readout);

      const residual = proj.residuals[tech];
      const badge = document.createElement("span");
      badge.className = `residual-badge ${Math.abs(residual) <= tol ? "ok" : "off"}`;
      bindNumber(badge, `projection:residuals.${tech}`, residual, fmtResidual(residual));
      row.appendChild(badge);

      const final = proj.shares[tech][proj.shares[tech].length - 1];
      const endShare = document.createElement("span");
      endShare.className = "end-share";
      bindNumber(endShare, `projection:shares.${tech}[${proj.shares[tech].length - 1}]`,
                 final, fmtShare(final));
      row.appendChild(endShare);

      const revert = document.createElement("button");
      revert.className = "revert";
      revert.textContent = "revert";
      revert.addEventListener("click", () => void this.setGamma(tech, this.loadedGamma[tech]));
      row.appendChild(revert);

      wrap.appendChild(row);
    });
    return wrap;
  }

  get isBusy(): boolean {
    return this.busy;
  }

  get currentProjection(): ProjectionPayload | null {
    return this.projection;
  }
}

/** Scenario comparison view: stacked share areas per run, emission lines
 * with the dashed baseline-grid variant, and money-account deltas.
 *
 * Every displayed number is a payload field (deltas come from the server's
 * compare endpoint); both charts carry the reference-year dashed rule and
 * the emissions chart a dashed start-level rule. Mismatched horizons show
 * a warning and a truncated overlay.
 */

import { StudioApi } from "./api.js";
import { bindNumber, fmtBn, fmtEurPerT, fmtMt, fmtYear } from "./format.js";
import {
  chartFrame,
  drawLevelRule,
  drawSeries,
  drawStackedAreas,
  drawYearRule,
  techColor,
} from "./svg.js";
import type { ComparePayload, EmissionsReport, SharesReport } from "./types.js";

export interface ComparisonData {
  compare: ComparePayload;
  sharesA: SharesReport;
  emissionsA: EmissionsReport;
  emissionsB: EmissionsReport;
}

export async function fetchComparison(api: StudioApi, runId: string,
                                      referenceId: string): Promise<ComparisonData> {
  const [compare, sharesA, emissionsA, emissionsB] = await Promise.all([
    api.compare(runId, referenceId),
    api.sharesReport(runId),
    api.emissionsReport(runId),
    api.emissionsReport(referenceId),
  ]);
  return { compare, sharesA, emissionsA, emissionsB };
}

export class ComparisonView {
  readonly root: HTMLElement;

  constructor(root: HTMLElement) {
    this.root = root;
  }

  render(data: ComparisonData): void {
    this.root.textContent = "";
    const { compare } = data;

    if (compare.truncated) {
      const warn = document.createElement("div");
      warn.className = "banner warn";
      warn.textContent = "runs cover different horizons; overlay truncated to the common years";
      this.root.appendChild(warn);
    }

    const title = document.createElement("h3");
    title.className = "no-audit";
    title.textContent = `scenario ${compare.run} vs reference ${compare.reference}`;
    this.root.appendChild(title);

    this.root.appendChild(this.renderShares(data));
    this.root.appendChild(this.renderEmissions(data));
    this.root.appendChild(this.renderMoney(compare));
  }

  private renderShares(data: ComparisonData): HTMLElement {
    const box = document.createElement("section");
    box.className = "shares-panel";
    const { sharesA, compare } = data;
    const heading = document.createElement("h4");
    heading.textContent = `technology shares, scenario ${compare.run}`;
    box.appendChild(heading);

    for (const region of sharesA.regions) {
      const frame = chartFrame(420, 180, [sharesA.years[0], sharesA.years[sharesA.years.length - 1]], [0, 1]);
      frame.svg.classList.add("shares-chart");
      frame.svg.setAttribute("data-region", region.region);
      const regionIdx = sharesA.regions.indexOf(region);
      drawStackedAreas(
        frame,
        sharesA.years,
        region.stacks.map((s, si) => ({
          id: s.tech_id,
          values: s.values,
          source: `sharesA:regions[${regionIdx}].stacks[${si}].values`,
        })),
        techColor,
      );
      drawYearRule(frame, sharesA.years[0], fmtYear(sharesA.years[0]), "sharesA:years[0]");
      const caption = document.createElement("div");
      caption.className = "caption";
      caption.textContent = region.region;
      box.appendChild(caption);
      box.appendChild(frame.svg);
    }
    return box;
  }

  private renderEmissions(data: ComparisonData): HTMLElement {
    const box = document.createElement("section");
    box.className = "emissions-panel";
    const heading = document.createElement("h4");
    heading.textContent = "global emissions (solid: decarbonised grid, dashed: baseline grid)";
    box.appendChild(heading);

    const { emissionsA, emissionsB, compare } = data;
    // truncated overlay: intersect the year grids
    const common = emissionsA.years.filter((y) => emissionsB.years.includes(y));
    const idxA = common.map((y) => emissionsA.years.indexOf(y));
    const idxB = common.map((y) => emissionsB.years.indexOf(y));
    const pick = (vs: number[], idx: number[]) => idx.map((i) => vs[i]);

    const seriesList = [
      { vals: pick(emissionsA.global.total_decarb, idxA), src: "emissionsA:global.total_decarb",
        style: { stroke: "#d62728", dashed: false } },
      { vals: pick(emissionsA.global.total_baseline, idxA), src: "emissionsA:global.total_baseline",
        style: { stroke: "#d62728", dashed: true } },
      { vals: pick(emissionsB.global.total_decarb, idxB), src: "emissionsB:global.total_decarb",
        style: { stroke: "#7f7f7f", dashed: false } },
      { vals: pick(emissionsB.global.total_baseline, idxB), src: "emissionsB:global.total_baseline",
        style: { stroke: "#7f7f7f", dashed: true } },
    ];
    const topValue = Math.max(...seriesList.flatMap((s) => s.vals));
    const frame = chartFrame(560, 240, [common[0], common[common.length - 1]], [0, topValue * 1.05]);
    frame.svg.classList.add("emissions-chart");
    for (const s of seriesList) {
      drawSeries(frame, common, s.vals, s.src, s.style);
    }
    drawYearRule(frame, common[0], fmtYear(common[0]), `emissionsA:years[${idxA[0]}]`);
    // start-level dashed rule, mirroring the "reference-year level" convention
    drawLevelRule(frame, emissionsA.global.total_decarb[idxA[0]],
                  `emissionsA:global.total_decarb[${idxA[0]}]`);
    box.appendChild(frame.svg);

    const legend = document.createElement("div");
    legend.className = "legend";
    const endIdxA = idxA[idxA.length - 1];
    const endSpan = document.createElement("span");
    endSpan.className = "end-value";
    bindNumber(endSpan, `emissionsA:global.total_decarb[${endIdxA}]`,
               emissionsA.global.total_decarb[endIdxA],
               `${compare.run} final: ${fmtMt(emissionsA.global.total_decarb[endIdxA])}`);
    legend.appendChild(endSpan);
    const endIdxB = idxB[idxB.length - 1];
    const refSpan = document.createElement("span");
    refSpan.className = "end-value";
    bindNumber(refSpan, `emissionsB:global.total_decarb[${endIdxB}]`,
               emissionsB.global.total_decarb[endIdxB],
               `${compare.reference} final: ${fmtMt(emissionsB.global.total_decarb[endIdxB])}`);
    legend.appendChild(refSpan);
    box.appendChild(legend);
    return box;
  }

  private renderMoney(compare: ComparePayload): HTMLElement {
    const box = document.createElement("section");
    box.className = "money-panel";
    const heading = document.createElement("h4");
    heading.textContent = "cumulative money deltas, run minus reference, ";
    const y0 = document.createElement("span");
    bindNumber(y0, "compare:years[0]", compare.years[0], fmtYear(compare.years[0]));
    const y1 = document.createElement("span");
    bindNumber(y1, "compare:years[1]", compare.years[1], fmtYear(compare.years[1]));
    heading.appendChild(y0);
    heading.append("-");
    heading.appendChild(y1);
    box.appendChild(heading);

    const table = document.createElement("table");
    table.className = "delta-table";
    const rows: [string, keyof ComparePayload["deltas"], (v: number) => string][] = [
      ["heating-system expenses", "invest_eur", fmtBn],
      ["energy expenses", "energy_eur", fmtBn],
      ["tax revenue", "tax_revenue_eur", fmtBn],
      ["subsidy outlay", "subsidy_outlay_eur", fmtBn],
      ["direct CO\u2082", "direct_kg", fmtMt],
      ["indirect CO\u2082 (decarbonised grid)", "indirect_decarb_kg", fmtMt],
      ["indirect CO\u2082 (baseline grid)", "indirect_baseline_kg", fmtMt],
    ];
    for (const [label, key, fmt] of rows) {
      const tr = document.createElement("tr");
      const td0 = document.createElement("td");
      td0.textContent = label;
      tr.appendChild(td0);
      const td1 = document.createElement("td");
      td1.className = "delta-value";
      bindNumber(td1, `compare:deltas.${key}`, compare.deltas[key], fmt(compare.deltas[key]));
      tr.appendChild(td1);
      table.appendChild(tr);
    }
    if (compare.eur_per_tco2_net_reduction !== undefined) {
      const tr = document.createElement("tr");
      const td0 = document.createElement("td");
      td0.textContent = "system expenses per net tCO\u2082 reduced";
      tr.appendChild(td0);
      const td1 = document.createElement("td");
      td1.className = "delta-value";
      bindNumber(td1, "compare:eur_per_tco2_net_reduction",
                 compare.eur_per_tco2_net_reduction, fmtEurPerT(compare.eur_per_tco2_net_reduction));
      tr.appendChild(td1);
      table.appendChild(tr);
    }
    box.appendChild(table);
    return box;
  }
}

/** Hand-rolled SVG chart primitives.
 *
 * Charts translate payload series into geometry only; any number rendered
 * as text is bound to its payload source via format.bindNumber. Series
 * elements carry data-source and data-series (the raw values as JSON) so
 * tests can check the drawn data equals the payload exactly.
 */

const NS = "http://www.w3.org/2000/svg";

export interface ChartFrame {
  svg: SVGSVGElement;
  x: (v: number) => number;
  y: (v: number) => number;
  width: number;
  height: number;
  plot: SVGGElement;
}

export function svgEl<K extends keyof SVGElementTagNameMap>(
  tag: K, attrs: Record<string, string | number> = {},
): SVGElementTagNameMap[K] {
  const el = document.createElementNS(NS, tag);
  for (const [k, v] of Object.entries(attrs)) el.setAttribute(k, String(v));
  return el;
}

export function chartFrame(width: number, height: number,
                           xDomain: [number, number], yDomain: [number, number],
                           pad = 28): ChartFrame {
  const svg = svgEl("svg", {
    viewBox: `0 0 ${width} ${height}`,
    width, height, role: "img",
  });
  const plot = svgEl("g", { class: "plot" });
  svg.appendChild(plot);
  const [x0, x1] = xDomain;
  const [y0, y1] = yDomain;
  const xSpan = x1 - x0 || 1;
  const ySpan = y1 - y0 || 1;
  const x = (v: number) => pad + ((v - x0) / xSpan) * (width - 2 * pad);
  const y = (v: number) => height - pad - ((v - y0) / ySpan) * (height - 2 * pad);
  return { svg, x, y, width, height, plot };
}

export function linePath(frame: ChartFrame, xs: number[], ys: number[]): string {
  return xs.map((xv, i) => `${i ? "L" : "M"}${frame.x(xv).toFixed(2)},${frame.y(ys[i]).toFixed(2)}`).join("");
}

export interface SeriesStyle {
  stroke?: string;
  dashed?: boolean;
  width?: number;
}

export function drawSeries(frame: ChartFrame, xs: number[], ys: number[],
                           source: string, style: SeriesStyle = {}): SVGPathElement {
  const path = svgEl("path", {
    d: linePath(frame, xs, ys),
    fill: "none",
    stroke: style.stroke ?? "#1f77b4",
    "stroke-width": style.width ?? 1.6,
  });
  if (style.dashed) path.setAttribute("stroke-dasharray", "5,4");
  path.setAttribute("data-source", source);
  path.setAttribute("data-series", JSON.stringify(ys));
  frame.plot.appendChild(path);
  return path;
}

/** Stacked area chart: one band per series, stacking is pure geometry. */
export function drawStackedAreas(frame: ChartFrame, xs: number[],
                                 stacks: { id: string; values: number[]; source: string }[],
                                 colors: (i: number) => string): void {
  const n = xs.length;
  let base = new Array(n).fill(0);
  stacks.forEach((stack, si) => {
    const top = base.map((b, i) => b + stack.values[i]);
    const upper = xs.map((xv, i) => `${i ? "L" : "M"}${frame.x(xv).toFixed(2)},${frame.y(top[i]).toFixed(2)}`).join("");
    const lower = [...xs].reverse()
      .map((xv, ri) => `L${frame.x(xv).toFixed(2)},${frame.y(base[n - 1 - ri]).toFixed(2)}`).join("");
    const area = svgEl("path", {
      d: `${upper}${lower}Z`,
      fill: colors(si),
      "fill-opacity": 0.85,
      stroke: "none",
    });
    area.setAttribute("data-source", stack.source);
    area.setAttribute("data-series", JSON.stringify(stack.values));
    area.setAttribute("data-tech", stack.id);
    frame.plot.appendChild(area);
    base = top;
  });
}

/** Vertical dashed rule marking a reference year (e.g. simulation start). */
export function drawYearRule(frame: ChartFrame, year: number, label: string,
                             source?: string): void {
  const xPix = frame.x(year);
  const rule = svgEl("line", {
    x1: xPix, x2: xPix, y1: 4, y2: frame.height - 20,
    stroke: "#555", "stroke-dasharray": "3,3", class: "year-rule",
  });
  rule.setAttribute("data-rule-year", String(year));
  frame.plot.appendChild(rule);
  const text = svgEl("text", { x: xPix + 3, y: 12, "font-size": 9, fill: "#555" });
  text.textContent = label;
  if (source) {
    text.setAttribute("data-source", source);
    text.setAttribute("data-value", String(year));
  } else {
    text.setAttribute("data-rule-year", String(year));
  }
  frame.plot.appendChild(text);
}

/** Horizontal dashed rule marking a reference level (e.g. start-year value). */
export function drawLevelRule(frame: ChartFrame, value: number, source: string): void {
  const yPix = frame.y(value);
  const rule = svgEl("line", {
    x1: 24, x2: frame.width - 6, y1: yPix, y2: yPix,
    stroke: "#888", "stroke-dasharray": "2,4", class: "level-rule",
  });
  rule.setAttribute("data-source", source);
  rule.setAttribute("data-value", String(value));
  frame.plot.appendChild(rule);
}

export const TECH_COLORS = [
  "#8c510a", "#bf812d", "#dfc27d", "#f6e8c3", "#c7eae5",
  "#80cdc1", "#35978f", "#01665e", "#762a83", "#9970ab",
  "#c2a5cf", "#a6dba0", "#5aae61",
];

export function techColor(i: number): string {
  return TECH_COLORS[i % TECH_COLORS.length];
}

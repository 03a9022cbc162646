/** Unit formatting, the only place raw payload numbers are transformed.
 *
 * Every element showing a payload number must carry data-source (the
 * payload path) and data-value (the raw number, full precision) so the
 * payload-to-DOM audit can trace each rendered numeric back to the API.
 */

export function fmtShare(v: number): string {
  return `${(v * 100).toFixed(1)}%`;
}

export function fmtGammaCents(vEurPerKwh: number): string {
  return `${(vEurPerKwh * 100).toFixed(2)} c/kWh`;
}

export function fmtResidual(v: number): string {
  return `${v.toExponential(2)}/y`;
}

export function fmtMt(vKg: number): string {
  return `${(vKg / 1e9).toFixed(1)} Mt`;
}

export function fmtBn(vEur: number): string {
  return `${(vEur / 1e9).toFixed(2)} bn EUR`;
}

export function fmtEurPerT(v: number): string {
  return `${v.toFixed(0)} EUR/tCO2`;
}

export function fmtYear(y: number): string {
  return String(y);
}

/** Tag an element with its payload provenance; used by every numeric cell. */
export function bindNumber(el: HTMLElement | SVGElement, source: string, value: number,
                           text: string): void {
  el.setAttribute("data-source", source);
  el.setAttribute("data-value", String(value));
  el.textContent = text;
}

/** Payload-to-DOM audit.
 *
 * Every rendered numeric must trace back to an API payload field: elements
 * carry data-source="<payload>:<path>" plus data-value (raw number) or
 * data-series (raw array). The audit walks a view root, resolves each path
 * against the payload registry and reports any mismatch or any numeric text
 * that lacks provenance.
 */

export interface AuditViolation {
  kind: "missing-source" | "bad-path" | "value-mismatch" | "series-mismatch";
  detail: string;
}

export function getPath(obj: unknown, path: string): unknown {
  let cur = obj;
  const parts = path.replace(/\[(\d+)\]/g, ".$1").split(".").filter((p) => p.length);
  for (const part of parts) {
    if (cur === null || cur === undefined) return undefined;
    cur = (cur as Record<string, unknown>)[part];
  }
  return cur;
}

const NUMERIC_TEXT = /-?\d+(\.\d+)?([eE][+-]?\d+)?/;

function hasNumericText(text: string): boolean {
  return NUMERIC_TEXT.test(text);
}

export function auditView(root: Element, payloads: Record<string, unknown>): AuditViolation[] {
  const violations: AuditViolation[] = [];

  const resolve = (source: string): { ok: boolean; value: unknown } => {
    const sep = source.indexOf(":");
    if (sep < 0) return { ok: false, value: undefined };
    const payload = payloads[source.slice(0, sep)];
    if (payload === undefined) return { ok: false, value: undefined };
    const value = getPath(payload, source.slice(sep + 1));
    return { ok: value !== undefined, value };
  };

  // 1) every data-source annotation must resolve and match its raw value
  for (const el of root.querySelectorAll("[data-source]")) {
    const source = el.getAttribute("data-source") as string;
    const { ok, value } = resolve(source);
    if (!ok) {
      violations.push({ kind: "bad-path", detail: `${source} does not resolve` });
      continue;
    }
    const rawValue = el.getAttribute("data-value");
    if (rawValue !== null && Number(rawValue) !== value) {
      violations.push({
        kind: "value-mismatch",
        detail: `${source}: data-value ${rawValue} != payload ${String(value)}`,
      });
    }
    const rawSeries = el.getAttribute("data-series");
    if (rawSeries !== null) {
      const drawn = JSON.parse(rawSeries) as number[];
      const want = value as number[] | Record<string, unknown>;
      const wantArr = Array.isArray(want) ? want : (want as { values?: number[] }).values;
      if (!wantArr || drawn.length > wantArr.length
          || !drawn.every((v) => (wantArr as number[]).includes(v))) {
        violations.push({
          kind: "series-mismatch",
          detail: `${source}: drawn series is not a subset of the payload series`,
        });
      }
    }
  }

  // 2) every text node containing digits must live under a data-source element
  const walker = document.createTreeWalker(root, NodeFilter.SHOW_TEXT);
  let node: Node | null;
  while ((node = walker.nextNode())) {
    const text = node.textContent ?? "";
    if (!hasNumericText(text)) continue;
    let el = node.parentElement;
    let annotated = false;
    while (el && el !== root.parentElement) {
      if (el.hasAttribute("data-source") || el.hasAttribute("data-rule-year")
          || el.classList.contains("no-audit")) {
        annotated = true;
        break;
      }
      el = el.parentElement;
    }
    if (!annotated) {
      violations.push({ kind: "missing-source", detail: `unannotated numeric text "${text.trim()}"` });
    }
  }
  return violations;
}

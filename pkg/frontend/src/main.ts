/** App shell: session bootstrap, tab switching, run tracking. */

import { StudioApi } from "./api.js";
import { CalibrationView } from "./calibration.js";
import { ComparisonView, fetchComparison } from "./comparison.js";
import { ScenarioForm } from "./scenario.js";

interface TrackedRun {
  runId: string;
  label: string;
  state: string;
}

export class StudioApp {
  readonly root: HTMLElement;
  private api: StudioApi;
  private runs: TrackedRun[] = [];
  calibration: CalibrationView | null = null;
  scenarioForm: ScenarioForm | null = null;
  comparison: ComparisonView | null = null;

  constructor(root: HTMLElement, api: StudioApi) {
    this.root = root;
    this.api = api;
  }

  async boot(): Promise<void> {
    const datasets = await this.api.datasets();
    const session = await this.api.createSession(datasets[0].id, "dataset");
    this.root.textContent = "";

    const nav = document.createElement("nav");
    const panes: Record<string, HTMLElement> = {};
    for (const name of ["calibration", "scenarios", "comparison"]) {
      const button = document.createElement("button");
      button.textContent = name;
      button.addEventListener("click", () => {
        for (const [k, pane] of Object.entries(panes)) {
          pane.style.display = k === name ? "block" : "none";
        }
      });
      nav.appendChild(button);
      const pane = document.createElement("section");
      pane.id = `pane-${name}`;
      pane.style.display = name === "calibration" ? "block" : "none";
      panes[name] = pane;
    }
    this.root.appendChild(nav);
    for (const pane of Object.values(panes)) this.root.appendChild(pane);

    this.calibration = new CalibrationView(panes["calibration"], this.api, session.session_id);
    await this.calibration.load();

    this.scenarioForm = new ScenarioForm(panes["scenarios"], this.api, session.session_id,
                                         session.regions);
    await this.scenarioForm.load();
    const runList = document.createElement("ul");
    runList.className = "run-list";
    panes["scenarios"].appendChild(runList);
    this.scenarioForm.onLaunched = (runId, spec) => {
      const label = "preset" in spec ? `preset ${spec.preset}` : spec.id;
      const item: TrackedRun = { runId, label, state: "running" };
      this.runs.push(item);
      const li = document.createElement("li");
      li.textContent = `${label} (${runId.slice(0, 8)}): running`;
      runList.appendChild(li);
      void this.api.waitForRun(runId).then((status) => {
        item.state = status.state;
        li.textContent = `${label} (${runId.slice(0, 8)}): ${status.state}`;
        this.renderComparePicker(panes["comparison"]);
      });
    };

    this.comparison = new ComparisonView(document.createElement("div"));
    this.renderComparePicker(panes["comparison"]);
  }

  private renderComparePicker(pane: HTMLElement): void {
    pane.textContent = "";
    const done = this.runs.filter((r) => r.state === "done");
    if (done.length < 2) {
      const hint = document.createElement("p");
      hint.textContent = "complete at least two runs to compare them";
      pane.appendChild(hint);
      return;
    }
    const pickers: HTMLSelectElement[] = [];
    for (const label of ["run", "reference run"]) {
      const select = document.createElement("select");
      for (const r of done) {
        const opt = document.createElement("option");
        opt.value = r.runId;
        opt.textContent = `${r.label} (${r.runId.slice(0, 8)})`;
        select.appendChild(opt);
      }
      const wrap = document.createElement("label");
      wrap.textContent = label + " ";
      wrap.appendChild(select);
      pane.appendChild(wrap);
      pickers.push(select);
    }
    const go = document.createElement("button");
    go.textContent = "compare";
    pane.appendChild(go);
    const target = document.createElement("div");
    pane.appendChild(target);
    this.comparison = new ComparisonView(target);
    go.addEventListener("click", () => {
      void fetchComparison(this.api, pickers[0].value, pickers[1].value)
        .then((data) => this.comparison?.render(data));
    });
  }
}

export function mount(): void {
  const root = document.getElementById("app");
  if (!root) throw new Error("missing #app element");
  const api = new StudioApi("");
  const app = new StudioApp(root, api);
  void app.boot().catch((err) => {
    root.textContent = `failed to start: ${err}`;
  });
}

if (typeof document !== "undefined" && document.getElementById("app")) {
  mount();
}

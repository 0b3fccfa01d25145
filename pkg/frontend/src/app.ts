/** Workbench wiring: circuit editor, run inspector, and benchmark panels. */

import {
  ApiClient,
  ApiError,
  BackendDescriptor,
  BenchRowJson,
  FamilyDescriptor,
  ScenarioJson,
  SimulateResponse,
  StepJson,
} from "./api.js";
import { bitstring, probabilityBars, renderBarChart, renderLineChart, Series } from "./charts.js";
import { GATE_DEFS, gateDef } from "./gatedefs.js";
import { CircuitGridModel } from "./model.js";

interface PendingLink {
  name: string;
  column: number;
  wires: number[];
  needed: number;
}

function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  attrs: Record<string, string> = {},
  ...children: (Node | string)[]
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  for (const [key, value] of Object.entries(attrs)) {
    node.setAttribute(key, value);
  }
  node.append(...children);
  return node;
}

export class App {
  private model = new CircuitGridModel(3, 8);
  private pending: PendingLink | null = null;
  private lastRun: SimulateResponse | null = null;
  private compareRun: SimulateResponse | null = null;
  private currentStep = 0;
  private families: FamilyDescriptor[] = [];
  private backends: BackendDescriptor[] = [];
  private benchRows: BenchRowJson[] = [];
  private benchRunId: string | null = null;

  constructor(
    private root: HTMLElement,
    private api: ApiClient = new ApiClient(),
  ) {}

  async mount(): Promise<void> {
    this.root.replaceChildren();
    this.root.appendChild(this.buildTabs());
    this.renderGrid();
    try {
      [this.families, this.backends] = await Promise.all([
        this.api.families(),
        this.api.backends(),
      ]);
    } catch (error) {
      this.setStatus(`cannot reach the API: ${(error as Error).message}`, true);
      return;
    }
    this.populateCatalogs();
  }

  // ---- layout ----

  private buildTabs(): HTMLElement {
    const tabs = el("nav", { class: "tabs" });
    const panels = el("div", { class: "panels" });
    const sections: [string, HTMLElement][] = [
      ["Circuit", this.buildCircuitPanel()],
      ["Run", this.buildRunPanel()],
      ["Benchmark", this.buildBenchPanel()],
    ];
    sections.forEach(([label, panel], index) => {
      panel.classList.add("panel");
      panel.id = `panel-${label.toLowerCase()}`;
      if (index > 0) {
        panel.classList.add("hidden");
      }
      const button = el("button", { class: index === 0 ? "tab active" : "tab" }, label);
      button.addEventListener("click", () => {
        tabs.querySelectorAll(".tab").forEach((t) => t.classList.remove("active"));
        button.classList.add("active");
        panels.querySelectorAll(".panel").forEach((p) => p.classList.add("hidden"));
        panel.classList.remove("hidden");
      });
      tabs.appendChild(button);
      panels.appendChild(panel);
    });
    const wrapper = el("div", {});
    wrapper.append(
      el("header", { class: "masthead" },
        el("h1", {}, "circuit workbench"),
        el("p", { class: "subtitle" },
          "build circuits, watch their state tables evolve through SQL, compare backends")),
      tabs,
      panels,
    );
    return wrapper;
  }

  // ---- circuit panel ----

  private buildCircuitPanel(): HTMLElement {
    const palette = el("div", { class: "palette" });
    for (const def of GATE_DEFS) {
      const chip = el("div", { class: "chip", draggable: "true", title: def.description }, def.label);
      chip.addEventListener("dragstart", (event) => {
        event.dataTransfer?.setData("text/gate", def.name);
        this.cancelPending();
      });
      palette.appendChild(chip);
    }

    const wires = el("input", { type: "number", id: "wire-count", value: "3", min: "1", max: "62" });
    wires.addEventListener("change", () => {
      const error = this.model.resize(Number(wires.value));
      if (error) {
        this.setStatus(error, true);
        wires.value = String(this.model.numQubits);
      }
      this.renderGrid();
    });
    const addColumn = el("button", {}, "+ column");
    addColumn.addEventListener("click", () => {
      this.model.columns += 1;
      this.renderGrid();
    });
    const clear = el("button", {}, "clear");
    clear.addEventListener("click", () => {
      this.model.clear();
      this.cancelPending();
      this.renderGrid();
    });

    const exportButton = el("button", {}, "export JSON");
    exportButton.addEventListener("click", () => this.exportCircuit());
    const importInput = el("input", { type: "file", accept: ".json", class: "hidden", id: "import-file" });
    importInput.addEventListener("change", async () => {
      const file = (importInput as HTMLInputElement).files?.[0];
      if (file) {
        this.importCircuit(await file.text());
        (importInput as HTMLInputElement).value = "";
      }
    });
    const importButton = el("button", {}, "import JSON");
    importButton.addEventListener("click", () => importInput.click());

    const presets = el("select", { id: "preset-family" },
      el("option", { value: "" }, "load a preset..."),
      el("option", { value: "ghz" }, "ghz(n)"),
      el("option", { value: "equal_superposition" }, "equal superposition(n)"),
      el("option", { value: "parity_check" }, "parity check(bits)"),
    );
    presets.addEventListener("change", () => {
      this.loadPreset((presets as HTMLSelectElement).value);
      (presets as HTMLSelectElement).value = "";
    });

    const panel = el("section", {},
      el("div", { class: "toolbar" },
        el("label", { for: "wire-count" }, "wires"), wires,
        addColumn, clear, presets, exportButton, importButton, importInput),
      palette,
      el("div", { class: "grid-scroll" }, el("div", { id: "grid", class: "grid" })),
      el("div", { id: "gate-editor", class: "gate-editor hidden" }),
      el("div", { id: "status", class: "status" }),
    );
    return panel;
  }

  private renderGrid(): void {
    const grid = this.root.querySelector<HTMLElement>("#grid");
    if (!grid) {
      return;
    }
    grid.replaceChildren();
    grid.style.gridTemplateColumns = `3rem repeat(${this.model.columns}, 3.2rem)`;
    for (let wire = 0; wire < this.model.numQubits; wire++) {
      grid.appendChild(el("div", { class: "wire-label" }, `q${wire}`));
      for (let column = 0; column < this.model.columns; column++) {
        grid.appendChild(this.buildCell(wire, column));
      }
    }
    this.refreshSerialized();
  }

  private buildCell(wire: number, column: number): HTMLElement {
    const cell = el("div", { class: "cell", "data-wire": String(wire), "data-column": String(column) });
    const gate = this.model.gateAt(column, wire);
    if (gate) {
      const def = gateDef(gate.name)!;
      const role = def.roles[gate.qubits.indexOf(wire)] ?? def.label;
      const glyph = el("div", { class: "gate-glyph" }, role);
      if (gate.params.length > 0) {
        glyph.appendChild(el("span", { class: "angle" }, gate.params[0].toFixed(2)));
      }
      if (gate.qubits.length > 1) {
        const [low, high] = [Math.min(...gate.qubits), Math.max(...gate.qubits)];
        if (wire > low && wire < high) {
          cell.classList.add("link-through");
        }
      }
      cell.classList.add("occupied");
      cell.appendChild(glyph);
      cell.addEventListener("click", () => this.openGateEditor(gate.id));
    } else {
      cell.addEventListener("click", () => this.handleEmptyCellClick(wire, column, cell));
    }
    if (this.pending && column === this.pending.column) {
      cell.classList.add("pending-column");
    }
    cell.addEventListener("dragover", (event) => event.preventDefault());
    cell.addEventListener("drop", (event) => {
      event.preventDefault();
      const name = event.dataTransfer?.getData("text/gate");
      if (name) {
        this.handleDrop(name, wire, column);
      }
    });
    return cell;
  }

  private handleDrop(name: string, wire: number, column: number): void {
    this.closeGateEditor();
    const def = gateDef(name);
    if (!def) {
      return;
    }
    if (this.model.gateAt(column, wire)) {
      this.setStatus(`cell (q${wire}, t${column}) is occupied; drop rejected`, true);
      return;
    }
    if (def.arity === 1) {
      const params = def.numParams > 0 ? [Math.PI / 2] : [];
      this.model.place(name, column, [wire], params);
      this.setStatus(`placed ${name} on q${wire} at t${column}`);
      this.renderGrid();
      return;
    }
    this.pending = { name, column, wires: [wire], needed: def.arity };
    this.setStatus(
      `${name}: pick ${def.arity - 1} more wire(s) in column t${column} ` +
      "(click elsewhere to cancel)");
    this.renderGrid();
  }

  private handleEmptyCellClick(wire: number, column: number, cell: HTMLElement): void {
    this.closeGateEditor();
    if (!this.pending) {
      return;
    }
    if (column !== this.pending.column || this.pending.wires.includes(wire)) {
      this.cancelPending("links must stay in one column; selection cancelled");
      this.renderGrid();
      return;
    }
    this.pending.wires.push(wire);
    cell.classList.add("pending-wire");
    if (this.pending.wires.length === this.pending.needed) {
      const { name, column: targetColumn, wires } = this.pending;
      this.pending = null;
      const error = this.model.placementError(name, targetColumn, wires);
      if (error) {
        this.setStatus(`${error}; drop rejected`, true);
      } else {
        this.model.place(name, targetColumn, wires);
        this.setStatus(`placed ${name} on q${wires.join(",q")} at t${targetColumn}`);
      }
      this.renderGrid();
    } else {
      this.setStatus(
        `${this.pending.name}: ${this.pending.needed - this.pending.wires.length} wire(s) left`);
    }
  }

  private cancelPending(message?: string): void {
    this.pending = null;
    if (message) {
      this.setStatus(message, true);
    }
  }

  private openGateEditor(id: number): void {
    const gate = this.model.gateById(id);
    const editor = this.root.querySelector<HTMLElement>("#gate-editor");
    if (!gate || !editor) {
      return;
    }
    editor.classList.remove("hidden");
    editor.replaceChildren();
    const def = gateDef(gate.name)!;
    editor.appendChild(el("strong", {}, `${def.label} on q${gate.qubits.join(", q")} at t${gate.column}`));
    if (def.numParams > 0) {
      const angle = el("input", { type: "number", step: "0.0001", value: String(gate.params[0] ?? 0) });
      const apply = el("button", {}, "set angle (rad)");
      apply.addEventListener("click", () => {
        const value = Number((angle as HTMLInputElement).value);
        if (!Number.isFinite(value)) {
          this.setStatus("angle must be a number", true);
          return;
        }
        this.model.setParams(id, [value]);
        this.setStatus(`angle set to ${value}`);
        this.closeGateEditor();
        this.renderGrid();
      });
      editor.append(angle, apply);
    }
    const remove = el("button", { class: "danger" }, "remove");
    remove.addEventListener("click", () => {
      this.model.remove(id);
      this.closeGateEditor();
      this.renderGrid();
    });
    const close = el("button", {}, "close");
    close.addEventListener("click", () => this.closeGateEditor());
    editor.append(remove, close);
  }

  private closeGateEditor(): void {
    const editor = this.root.querySelector<HTMLElement>("#gate-editor");
    if (editor) {
      editor.classList.add("hidden");
      editor.replaceChildren();
    }
  }

  private exportCircuit(): void {
    const blob = new Blob([this.model.serialize()], { type: "application/json" });
    const link = el("a", {
      href: URL.createObjectURL(blob),
      download: "circuit.json",
    });
    link.click();
    URL.revokeObjectURL(link.href);
  }

  private importCircuit(text: string): void {
    try {
      this.model = CircuitGridModel.parse(text, this.model.columns);
      this.cancelPending();
      const wires = this.root.querySelector<HTMLInputElement>("#wire-count");
      if (wires) {
        wires.value = String(this.model.numQubits);
      }
      this.setStatus(`imported ${this.model.gates().length} gate(s)`);
      this.renderGrid();
    } catch (error) {
      this.setStatus(`import failed: ${(error as Error).message}`, true);
    }
  }

  private loadPreset(family: string): void {
    if (!family) {
      return;
    }
    if (family === "parity_check") {
      const bits = window.prompt("input bits (e.g. 10)", "10");
      if (bits === null) {
        return;
      }
      const n = bits.length + 1;
      const model = new CircuitGridModel(n, Math.max(8, bits.length + 2));
      [...bits].forEach((bit, wire) => {
        if (bit === "1") {
          model.place("x", 0, [wire]);
        }
      });
      [...bits].forEach((_bit, wire) => {
        model.place("cx", wire + 1, [wire, n - 1]);
      });
      this.model = model;
    } else {
      const answer = window.prompt("number of qubits", "3");
      if (answer === null) {
        return;
      }
      const n = Number(answer);
      if (!Number.isInteger(n) || n < 1 || n > 62) {
        this.setStatus("qubit count must be an integer in [1, 62]", true);
        return;
      }
      const model = new CircuitGridModel(n, Math.max(8, n + 1));
      if (family === "ghz") {
        model.place("h", 0, [0]);
        for (let wire = 0; wire + 1 < n; wire++) {
          model.place("cx", wire + 1, [wire, wire + 1]);
        }
      } else {
        for (let wire = 0; wire < n; wire++) {
          model.place("h", 0, [wire]);
        }
      }
      this.model = model;
    }
    const wires = this.root.querySelector<HTMLInputElement>("#wire-count");
    if (wires) {
      wires.value = String(this.model.numQubits);
    }
    this.setStatus(`loaded ${family}`);
    this.renderGrid();
  }

  private refreshSerialized(): void {
    const target = this.root.querySelector<HTMLElement>("#serialized");
    if (target) {
      target.textContent = JSON.stringify(this.model.toJson(), null, 2);
    }
  }

  private setStatus(message: string, isError = false): void {
    const status = this.root.querySelector<HTMLElement>("#status");
    if (status) {
      status.textContent = message;
      status.classList.toggle("error", isError);
    }
  }

  // ---- run panel ----

  private buildRunPanel(): HTMLElement {
    const backend = el("select", { id: "run-backend" });
    const compare = el("select", { id: "run-compare" }, el("option", { value: "" }, "no comparison"));
    const fusion = el("input", { type: "number", id: "run-fusion", value: "4", min: "1" });
    const shots = el("input", { type: "number", id: "run-shots", value: "0", min: "0" });
    const seed = el("input", { type: "number", id: "run-seed", value: "0" });
    const run = el("button", { class: "primary" }, "run circuit");
    run.addEventListener("click", () => void this.runCircuit());

    const slider = el("input", { type: "range", id: "step-slider", min: "0", max: "0", value: "0" });
    slider.addEventListener("input", () => {
      this.currentStep = Number((slider as HTMLInputElement).value);
      this.renderStep();
    });
    const prev = el("button", {}, "← step");
    prev.addEventListener("click", () => this.moveStep(-1));
    const next = el("button", {}, "step →");
    next.addEventListener("click", () => this.moveStep(1));

    return el("section", {},
      el("div", { class: "toolbar" },
        el("label", { for: "run-backend" }, "backend"), backend,
        el("label", { for: "run-compare" }, "compare"), compare,
        el("label", { for: "run-fusion" }, "fusion"), fusion,
        el("label", { for: "run-shots" }, "shots"), shots,
        el("label", { for: "run-seed" }, "seed"), seed,
        run),
      el("div", { id: "run-error", class: "status error" }),
      el("div", { class: "inspect-header" },
        el("span", { id: "step-caption" }, "run a circuit to inspect steps"),
        prev, slider, next),
      el("div", { id: "truncation", class: "banner hidden" }),
      el("div", { class: "inspect" },
        el("div", { class: "pane" },
          el("h3", {}, "state rows"),
          el("div", { id: "state-table" })),
        el("div", { class: "pane" },
          el("h3", {}, "probabilities"),
          el("div", { id: "bars" }),
          el("div", { id: "bars-compare" })),
        el("div", { class: "pane wide" },
          el("h3", {}, "SQL for this step"),
          el("pre", { id: "sql-pane" })),
        el("div", { class: "pane" },
          el("h3", {}, "measurement counts"),
          el("div", { id: "counts" })),
        el("div", { class: "pane" },
          el("h3", {}, "metrics"),
          el("div", { id: "metrics" })),
        el("div", { class: "pane wide" },
          el("h3", {}, "circuit JSON"),
          el("pre", { id: "serialized" })),
      ));
  }

  private populateCatalogs(): void {
    const backend = this.root.querySelector<HTMLSelectElement>("#run-backend");
    const compare = this.root.querySelector<HTMLSelectElement>("#run-compare");
    if (backend && compare) {
      for (const entry of this.backends) {
        backend.appendChild(el("option", { value: entry.name },
          `${entry.name} (${entry.kind})`));
        compare.appendChild(el("option", { value: entry.name }, entry.name));
      }
    }
    const family = this.root.querySelector<HTMLSelectElement>("#bench-family");
    if (family) {
      for (const entry of this.families) {
        family.appendChild(el("option", { value: entry.name }, entry.name));
      }
      family.dispatchEvent(new Event("change"));
    }
    const benchBackends = this.root.querySelector<HTMLElement>("#bench-backends");
    if (benchBackends) {
      for (const entry of this.backends) {
        const box = el("input", {
          type: "checkbox",
          value: entry.name,
          id: `bench-backend-${entry.name}`,
        });
        if (entry.name === "reference" || entry.name === "oracle") {
          (box as HTMLInputElement).checked = true;
        }
        benchBackends.append(box,
          el("label", { for: `bench-backend-${entry.name}` }, entry.name));
      }
    }
  }

  private runOptions(): { fusion_window: number; keep_intermediates: boolean; shots?: number; seed?: number } {
    const fusion = Number(this.root.querySelector<HTMLInputElement>("#run-fusion")?.value ?? 4);
    const shots = Number(this.root.querySelector<HTMLInputElement>("#run-shots")?.value ?? 0);
    const seed = Number(this.root.querySelector<HTMLInputElement>("#run-seed")?.value ?? 0);
    const options: { fusion_window: number; keep_intermediates: boolean; shots?: number; seed?: number } = {
      fusion_window: fusion,
      keep_intermediates: true,
    };
    if (shots > 0) {
      options.shots = shots;
      options.seed = seed;
    }
    return options;
  }

  private async runCircuit(): Promise<void> {
    const errorPane = this.root.querySelector<HTMLElement>("#run-error");
    errorPane?.replaceChildren();
    const backend = this.root.querySelector<HTMLSelectElement>("#run-backend")?.value ?? "reference";
    const compareWith = this.root.querySelector<HTMLSelectElement>("#run-compare")?.value ?? "";
    const body = {
      circuit: this.model.toJson(),
      backend,
      options: this.runOptions(),
    };
    try {
      this.lastRun = await this.api.simulate(body);
      this.compareRun = compareWith && compareWith !== backend
        ? await this.api.simulate({ ...body, backend: compareWith })
        : null;
    } catch (error) {
      this.lastRun = null;
      this.compareRun = null;
      if (error instanceof ApiError) {
        const extra = error.body.statement_index !== undefined
          ? ` (statement ${error.body.statement_index})`
          : "";
        errorPane?.append(`${error.body.code}: ${error.body.message}${extra}`);
      } else {
        errorPane?.append((error as Error).message);
      }
      return;
    }
    const steps = this.lastRun.steps ?? [];
    this.currentStep = Math.max(0, steps.length - 1);
    const slider = this.root.querySelector<HTMLInputElement>("#step-slider");
    if (slider) {
      slider.max = String(Math.max(0, steps.length - 1));
      slider.value = String(this.currentStep);
    }
    this.renderStep();
    this.renderRunExtras();
  }

  private moveStep(delta: number): void {
    const steps = this.lastRun?.steps ?? [];
    if (steps.length === 0) {
      return;
    }
    this.currentStep = Math.min(Math.max(this.currentStep + delta, 0), steps.length - 1);
    const slider = this.root.querySelector<HTMLInputElement>("#step-slider");
    if (slider) {
      slider.value = String(this.currentStep);
    }
    this.renderStep();
  }

  private stepAt(run: SimulateResponse, index: number): StepJson | null {
    return run.steps?.[index] ?? null;
  }

  private renderStep(): void {
    if (!this.lastRun) {
      return;
    }
    const numQubits = this.model.numQubits;
    const steps = this.lastRun.steps ?? [];
    const caption = this.root.querySelector<HTMLElement>("#step-caption");
    const banner = this.root.querySelector<HTMLElement>("#truncation");
    const stateTable = this.root.querySelector<HTMLElement>("#state-table");
    const sqlPane = this.root.querySelector<HTMLElement>("#sql-pane");
    const bars = this.root.querySelector<HTMLElement>("#bars");
    const barsCompare = this.root.querySelector<HTMLElement>("#bars-compare");
    if (!caption || !stateTable || !sqlPane || !bars || !banner || !barsCompare) {
      return;
    }
    let rows = this.lastRun.final_state;
    let sql = this.lastRun.sql;
    let truncated = false;
    let label = "final state";
    if (steps.length > 0) {
      const step = this.stepAt(this.lastRun, this.currentStep)!;
      rows = step.rows;
      sql = step.sql;
      truncated = step.truncated;
      label = `step ${step.index + 1}/${steps.length} (gates ${step.gate_indices.join(", ")})`;
    }
    caption.textContent = `${label}: ${rows.length} row(s)`;
    banner.classList.toggle("hidden", !truncated);
    if (truncated) {
      banner.textContent = "state truncated to the first 4096 rows";
    }

    const table = el("table", { class: "state" },
      el("thead", {}, el("tr", {},
        el("th", {}, "basis"), el("th", {}, "s"),
        el("th", {}, "re"), el("th", {}, "im"), el("th", {}, "p"))));
    const body = el("tbody", {});
    for (const row of rows.slice(0, 256)) {
      body.appendChild(el("tr", {},
        el("td", {}, `|${bitstring(row.s, numQubits)}⟩`),
        el("td", {}, String(row.s)),
        el("td", {}, row.r.toFixed(7)),
        el("td", {}, row.i.toFixed(7)),
        el("td", {}, (row.r * row.r + row.i * row.i).toFixed(7))));
    }
    table.appendChild(body);
    stateTable.replaceChildren(table);
    if (rows.length > 256) {
      stateTable.appendChild(el("p", { class: "hint" },
        `showing 256 of ${rows.length} rows`));
    }
    sqlPane.textContent = sql;
    renderBarChart(bars, probabilityBars(rows, numQubits),
      this.backendLabel(this.lastRun));
    if (this.compareRun) {
      const compareStep = steps.length > 0
        ? this.stepAt(this.compareRun, this.currentStep)
        : null;
      const compareRows = compareStep ? compareStep.rows : this.compareRun.final_state;
      renderBarChart(barsCompare, probabilityBars(compareRows, numQubits),
        this.backendLabel(this.compareRun));
    } else {
      barsCompare.replaceChildren();
    }
  }

  private backendLabel(run: SimulateResponse): string {
    return String(run.metrics["backend"] ?? "");
  }

  private renderRunExtras(): void {
    if (!this.lastRun) {
      return;
    }
    const counts = this.root.querySelector<HTMLElement>("#counts");
    if (counts) {
      counts.replaceChildren();
      if (this.lastRun.counts) {
        const list = el("ul", {});
        for (const [s, count] of Object.entries(this.lastRun.counts)) {
          list.appendChild(el("li", {},
            `|${bitstring(Number(s), this.model.numQubits)}⟩ (${s}): ${count}`));
        }
        counts.appendChild(list);
      } else {
        counts.textContent = "set shots > 0 to sample";
      }
    }
    const metrics = this.root.querySelector<HTMLElement>("#metrics");
    if (metrics) {
      const m = this.lastRun.metrics as Record<string, unknown>;
      const totalMs = Number(m["total_wall_ns"] ?? 0) / 1e6;
      const stepNs = (m["step_wall_ns"] as number[] | undefined) ?? [];
      metrics.replaceChildren(el("ul", {},
        el("li", {}, `backend: ${m["backend"]} ${m["backend_version"] ?? ""}`),
        el("li", {}, `mode: ${m["mode"]}`),
        el("li", {}, `total wall: ${totalMs.toFixed(3)} ms`),
        el("li", {}, `step wall (ms): ${stepNs.map((ns) => (ns / 1e6).toFixed(2)).join(", ") || "-"}`),
        el("li", {}, `step rows: ${((m["step_rows"] as number[] | undefined) ?? []).join(", ") || "-"}`),
        el("li", {}, `peak rows: ${m["peak_rows"]}`),
      ));
    }
    this.refreshSerialized();
  }

  // ---- benchmark panel ----

  private buildBenchPanel(): HTMLElement {
    const family = el("select", { id: "bench-family" });
    const paramsBox = el("div", { id: "bench-params", class: "bench-params" });
    family.addEventListener("change", () => {
      const descriptor = this.families.find(
        (entry) => entry.name === (family as HTMLSelectElement).value);
      paramsBox.replaceChildren();
      if (!descriptor) {
        return;
      }
      for (const param of descriptor.params) {
        const hint = param.name === "n" ? "e.g. 4..12..4" : "";
        paramsBox.append(
          el("label", { for: `bench-param-${param.name}` }, param.name),
          el("input", {
            type: "text",
            id: `bench-param-${param.name}`,
            placeholder: hint,
            value: param.default !== null ? String(param.default) : "",
          }),
          el("span", { class: "field-error", id: `bench-param-${param.name}-error` }),
        );
      }
    });

    const reps = el("input", { type: "number", id: "bench-reps", value: "3", min: "1" });
    const fusion = el("input", { type: "number", id: "bench-fusion", value: "4", min: "1" });
    const start = el("button", { class: "primary" }, "run sweep");
    start.addEventListener("click", () => void this.runBenchmark());

    const exportCsv = el("button", { id: "bench-export-csv", disabled: "true" }, "download CSV");
    exportCsv.addEventListener("click", () => {
      if (this.benchRunId) {
        window.open(this.api.benchmarkCsvUrl(this.benchRunId), "_blank");
      }
    });
    const exportJson = el("button", { id: "bench-export-json", disabled: "true" }, "download JSON");
    exportJson.addEventListener("click", () => this.downloadBenchJson());

    return el("section", {},
      el("div", { class: "toolbar" },
        el("label", { for: "bench-family" }, "family"), family,
        el("label", { for: "bench-reps" }, "reps"), reps,
        el("label", { for: "bench-fusion" }, "fusion"), fusion,
        start, exportCsv, exportJson),
      paramsBox,
      el("div", { class: "toolbar" },
        el("span", {}, "backends:"),
        el("span", { id: "bench-backends" })),
      el("div", { id: "bench-error", class: "status error" }),
      el("progress", { id: "bench-progress", value: "0", max: "1", class: "hidden" }),
      el("div", { class: "inspect" },
        el("div", { class: "pane" },
          el("h3", {}, "wall time vs sweep"),
          el("div", { id: "bench-walltime" })),
        el("div", { class: "pane" },
          el("h3", {}, "final rows vs sweep"),
          el("div", { id: "bench-rows" })),
      ),
      el("div", { class: "pane wide" },
        el("h3", {}, "report rows"),
        el("div", { id: "bench-table" })));
  }

  private parseParamValue(raw: string): unknown {
    const text = raw.trim();
    if (/^-?\d+$/.test(text)) {
      return Number(text);
    }
    if (/^-?\d+\.\.-?\d+(\.\.\d+)?$/.test(text)) {
      return text; // server expands a..b[..step]
    }
    if (text.includes(",")) {
      return text.split(",").map((piece) => {
        const trimmed = piece.trim();
        return /^-?\d+$/.test(trimmed) ? Number(trimmed) : trimmed;
      });
    }
    return text;
  }

  private collectScenario(): ScenarioJson | null {
    const errorPane = this.root.querySelector<HTMLElement>("#bench-error");
    errorPane?.replaceChildren();
    this.root.querySelectorAll(".field-error").forEach((node) => {
      node.textContent = "";
    });
    const familyName = this.root.querySelector<HTMLSelectElement>("#bench-family")?.value;
    const descriptor = this.families.find((entry) => entry.name === familyName);
    if (!descriptor) {
      errorPane?.append("pick a family");
      return null;
    }
    const params: Record<string, unknown> = {};
    for (const param of descriptor.params) {
      const input = this.root.querySelector<HTMLInputElement>(`#bench-param-${param.name}`);
      const raw = input?.value.trim() ?? "";
      if (!raw) {
        if (param.required) {
          this.fieldError(param.name, "required");
          return null;
        }
        continue;
      }
      params[param.name] = this.parseParamValue(raw);
    }
    const backends = [...this.root.querySelectorAll<HTMLInputElement>(
      "#bench-backends input:checked")].map((box) => box.value);
    if (backends.length === 0) {
      errorPane?.append("pick at least one backend");
      return null;
    }
    return {
      family: descriptor.name,
      params,
      backends,
      repetitions: Number(this.root.querySelector<HTMLInputElement>("#bench-reps")?.value ?? 1),
      options: {
        fusion_window: Number(this.root.querySelector<HTMLInputElement>("#bench-fusion")?.value ?? 4),
      },
    };
  }

  private fieldError(param: string, message: string): void {
    const node = this.root.querySelector<HTMLElement>(`#bench-param-${param}-error`);
    if (node) {
      node.textContent = message;
    }
  }

  private async runBenchmark(): Promise<void> {
    const scenario = this.collectScenario();
    if (!scenario) {
      return;
    }
    const errorPane = this.root.querySelector<HTMLElement>("#bench-error");
    const progress = this.root.querySelector<HTMLProgressElement>("#bench-progress");
    progress?.classList.remove("hidden");
    this.benchRows = [];
    try {
      const { run_id } = await this.api.benchmarkStart(scenario);
      this.benchRunId = run_id;
      for await (const event of this.api.benchmarkEvents(run_id)) {
        if (event.event === "progress") {
          const data = event.data as { completed: number; total: number; row: BenchRowJson };
          if (progress) {
            progress.value = data.completed / data.total;
          }
          this.benchRows.push(data.row);
          this.renderBenchCharts();
        } else if (event.event === "report") {
          this.benchRows = event.data as BenchRowJson[];
          this.renderBenchCharts();
        } else if (event.event === "error") {
          errorPane?.append(String((event.data as { message?: string }).message ?? "failed"));
        }
      }
      this.root.querySelector<HTMLButtonElement>("#bench-export-csv")?.removeAttribute("disabled");
      this.root.querySelector<HTMLButtonElement>("#bench-export-json")?.removeAttribute("disabled");
    } catch (error) {
      if (error instanceof ApiError) {
        const message = `${error.body.code}: ${error.body.message}`;
        // Field-level hints: the scenario validator names the offending part.
        const match = /parameter|param|n must|depth|input_bits/.exec(error.body.message);
        if (match && error.body.message.includes("n ")) {
          this.fieldError("n", error.body.message);
        }
        errorPane?.append(message);
      } else {
        errorPane?.append((error as Error).message);
      }
    } finally {
      progress?.classList.add("hidden");
    }
  }

  private sweepAxis(): string {
    const rows = this.benchRows;
    if (rows.length === 0) {
      return "n";
    }
    const keys = Object.keys(rows[0].params);
    for (const key of keys) {
      const values = new Set(rows.map((row) => String(row.params[key])));
      if (values.size > 1) {
        return key;
      }
    }
    return keys[0] ?? "n";
  }

  private renderBenchCharts(): void {
    const axis = this.sweepAxis();
    const walltime = this.root.querySelector<HTMLElement>("#bench-walltime");
    const rowsPane = this.root.querySelector<HTMLElement>("#bench-rows");
    if (!walltime || !rowsPane) {
      return;
    }
    const byBackend = new Map<string, BenchRowJson[]>();
    for (const row of this.benchRows) {
      if (row.status !== "success") {
        continue;
      }
      const bucket = byBackend.get(row.backend) ?? [];
      bucket.push(row);
      byBackend.set(row.backend, bucket);
    }
    const wallSeries: Series[] = [];
    const rowSeries: Series[] = [];
    for (const [backend, rows] of byBackend) {
      wallSeries.push({
        name: backend,
        points: rows.map((row) => ({
          x: Number(row.params[axis] ?? 0),
          y: (row.wall_ns ?? 0) / 1e6,
        })),
      });
      rowSeries.push({
        name: backend,
        points: rows.map((row) => ({
          x: Number(row.params[axis] ?? 0),
          y: row.final_rows ?? 0,
        })),
      });
    }
    renderLineChart(walltime, wallSeries, { xLabel: axis, yLabel: "wall ms", logY: true });
    renderLineChart(rowsPane, rowSeries, { xLabel: axis, yLabel: "final rows", logY: true });
    this.renderBenchTable();
  }

  private renderBenchTable(): void {
    const pane = this.root.querySelector<HTMLElement>("#bench-table");
    if (!pane) {
      return;
    }
    const table = el("table", { class: "state" },
      el("thead", {}, el("tr", {},
        ...["params", "backend", "rep", "wall ms", "final rows", "peak rows", "status"]
          .map((h) => el("th", {}, h)))));
    const body = el("tbody", {});
    for (const row of this.benchRows) {
      body.appendChild(el("tr", { class: row.status === "success" ? "" : "refused" },
        el("td", {}, Object.entries(row.params).map(([k, v]) => `${k}=${v}`).join(";")),
        el("td", {}, row.backend),
        el("td", {}, String(row.rep)),
        el("td", {}, row.wall_ns === null ? "-" : (row.wall_ns / 1e6).toFixed(3)),
        el("td", {}, row.final_rows === null ? "-" : String(row.final_rows)),
        el("td", {}, row.peak_rows === null ? "-" : String(row.peak_rows)),
        el("td", {}, row.status)));
    }
    table.appendChild(body);
    pane.replaceChildren(table);
  }

  private downloadBenchJson(): void {
    if (!this.benchRunId) {
      return;
    }
    void this.api.benchmarkPoll(this.benchRunId).then((snapshot) => {
      const blob = new Blob([JSON.stringify(snapshot.report ?? [], null, 2)],
        { type: "application/json" });
      const link = el("a", {
        href: URL.createObjectURL(blob),
        download: "benchmark.json",
      });
      link.click();
      URL.revokeObjectURL(link.href);
    });
  }
}

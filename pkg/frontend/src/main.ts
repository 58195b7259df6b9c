import { ApiClient, debounce, latestWins } from "./api.js";
import { renderInspector } from "./inspector.js";
import { renderScatter, Series } from "./render.js";
import {
  ViewState,
  clampBounds,
  decodeState,
  encodeState,
  initialState,
  markerForMethod,
  methodLabel,
  normalizeRow,
  objectiveMaxima,
  withRunToggled,
} from "./state.js";
import type { FrontSummary, RunStatus, WorstcasePoint } from "./types.js";

const api = new ApiClient("");
const colors = ["#2c6fbb", "#d1495b", "#3a7d44"];

let state: ViewState = decodeState(location.hash.slice(1)) ?? initialState();
const fronts = new Map<string, FrontSummary>();
let statuses: RunStatus[] = [];
let survivors: Set<number> | null = null;
let nearest: number | null = null;
let whatif: { points: WorstcasePoint[]; upperBound: boolean } | null = null;

const navigateQuery = latestWins<{ surviving_point_ids: number[]; nearest_point_id: number | null }>();
const whatifQuery = latestWins<{ points: WorstcasePoint[]; upper_bound_for_maro: boolean }>();

function byId(id: string): HTMLElement {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing #${id}`);
  return node;
}

function pushState(): void {
  history.replaceState(null, "", `#${encodeState(state)}`);
}

async function refreshRunList(): Promise<void> {
  const known = new Map(statuses.map((s) => [s.id, s]));
  const listed = await Promise.all(
    [...new Set([...known.keys(), ...state.runs])].map(async (id) => {
      try {
        return await api.runStatus(id);
      } catch {
        return null;
      }
    }),
  );
  statuses = listed.filter((s): s is RunStatus => s !== null);
  renderRunList();
}

function renderRunList(): void {
  const list = byId("run-list");
  list.textContent = "";
  for (const status of statuses) {
    const item = document.createElement("label");
    item.className = "run-item";
    const checkbox = document.createElement("input");
    checkbox.type = "checkbox";
    checkbox.checked = state.runs.includes(status.id);
    checkbox.disabled = status.status !== "done";
    checkbox.addEventListener("change", () => {
      state = withRunToggled(state, status.id);
      survivors = null;
      nearest = null;
      whatif = null;
      void loadFronts();
    });
    const label = document.createElement("span");
    label.textContent = `${status.id} · ${status.method ? methodLabel(status.method) : status.status}`;
    label.className = `status-${status.status}`;
    item.append(checkbox, label);
    list.append(item);
  }
}

async function loadFronts(): Promise<void> {
  for (const id of state.runs) {
    if (!fronts.has(id)) {
      fronts.set(id, await api.front(id));
    }
  }
  if (state.activeRun === null && state.runs.length) state.activeRun = state.runs[0];
  pushState();
  renderAll();
  void runNavigate();
  void runWhatif();
}

function activeFront(): FrontSummary | null {
  return state.activeRun ? fronts.get(state.activeRun) ?? null : null;
}

function renderAll(): void {
  renderScatterPanel();
  renderControls();
  void renderInspectorPanel();
}

function renderScatterPanel(): void {
  const container = byId("scatter");
  const selected = state.runs.map((id) => fronts.get(id)).filter((f): f is FrontSummary => !!f);
  if (!selected.length) {
    container.textContent = "";
    container.append(Object.assign(document.createElement("p"), { textContent: "Select up to three finished runs.", className: "hint" }));
    return;
  }
  const maxima = objectiveMaxima(selected.map((f) => f.objectives));
  const series: Series[] = selected.map((front, i) => ({
    runId: front.run_id,
    method: front.method,
    marker: markerForMethod(front.method),
    color: colors[i % colors.length],
    points: front.point_ids.map((pid, row) => ({
      id: pid,
      values: normalizeRow(front.objectives[row], maxima, state.normalized),
    })),
  }));
  if (whatif && state.activeRun) {
    const front = fronts.get(state.activeRun);
    if (front) {
      series.push({
        runId: `${state.activeRun}:whatif`,
        method: front.method,
        marker: markerForMethod(front.method),
        color: "#f2a33c",
        overlay: true,
        points: whatif.points.map((p) => ({ id: p.id, values: normalizeRow(p.objectives, maxima, state.normalized) })),
      });
    }
  }
  const names = selected[0].objective_names;
  renderScatter(container, series, {
    width: 640,
    height: 480,
    margin: 48,
    xLabel: names[0] + (state.normalized ? " (normalized)" : ""),
    yLabel: names[1] + (state.normalized ? " (normalized)" : ""),
    dimmed: (runId, pointId) =>
      survivors !== null && runId === state.activeRun && !survivors.has(pointId),
    outlined: (runId, pointId) => runId === state.activeRun && nearest === pointId,
    selected: (runId, pointId) => runId === state.activeRun && state.selectedPoint === pointId,
    onSelect: (runId, pointId) => {
      state.activeRun = runId;
      state.selectedPoint = pointId;
      pushState();
      renderAll();
    },
  });
  const legend = byId("legend");
  legend.textContent = "";
  for (const s of series.filter((s) => !s.overlay)) {
    const item = document.createElement("span");
    item.className = "legend-item";
    item.style.color = s.color;
    item.textContent = `${s.marker === "diamond" ? "◆" : s.marker === "circle" ? "●" : "■"} ${s.runId} ${methodLabel(s.method)}`;
    legend.append(item);
  }
  if (whatif) {
    const item = document.createElement("span");
    item.className = "legend-item";
    item.style.color = "#f2a33c";
    item.textContent = "▪ scenario subset envelope" + (whatif.upperBound ? " (upper bound for maro)" : "");
    legend.append(item);
  }
}

function renderControls(): void {
  const front = activeFront();
  const panel = byId("nav-controls");
  panel.textContent = "";
  if (!front) return;

  const heading = document.createElement("h3");
  heading.textContent = `navigate ${front.run_id}`;
  panel.append(heading);

  const objectives = front.objectives;
  front.objective_names.forEach((name, m) => {
    const values = objectives.map((row) => row[m]);
    const lo = Math.min(...values);
    const hi = Math.max(...values);
    const row = document.createElement("div");
    row.className = "slider-row";
    const label = document.createElement("label");
    label.textContent = `${name} ≤ `;
    const slider = document.createElement("input");
    slider.type = "range";
    slider.min = String(lo);
    slider.max = String(hi);
    slider.step = String((hi - lo) / 200 || 1);
    slider.value = String(state.bounds[m] ?? hi);
    const value = document.createElement("span");
    value.className = "slider-value";
    value.textContent = state.bounds[m] === null ? "—" : Number(slider.value).toPrecision(5);
    const apply = debounce(() => {
      state.bounds[m] = Number(slider.value);
      state.bounds = clampBounds(state.bounds, objectives[0].map((_, i) => Math.min(...objectives.map((r) => r[i]))), objectives[0].map((_, i) => Math.max(...objectives.map((r) => r[i]))));
      pushState();
      void runNavigate();
    }, 150);
    slider.addEventListener("input", () => {
      value.textContent = Number(slider.value).toPrecision(5);
      apply();
    });
    const clear = document.createElement("button");
    clear.textContent = "clear";
    clear.addEventListener("click", () => {
      state.bounds[m] = null;
      value.textContent = "—";
      slider.value = String(hi);
      pushState();
      void runNavigate();
    });
    row.append(label, slider, value, clear);
    panel.append(row);
  });

  const refRow = document.createElement("div");
  refRow.className = "slider-row";
  const refLabel = document.createElement("label");
  refLabel.textContent = "reference point ";
  const refSelect = document.createElement("select");
  const none = document.createElement("option");
  none.value = "";
  none.textContent = "none";
  refSelect.append(none);
  for (const pid of front.point_ids) {
    const option = document.createElement("option");
    option.value = String(pid);
    option.textContent = `point ${pid}`;
    refSelect.append(option);
  }
  refSelect.value = state.reference === null ? "" : String(state.reference);
  refSelect.addEventListener("change", () => {
    state.reference = refSelect.value === "" ? null : Number(refSelect.value);
    pushState();
    void runNavigate();
  });
  refRow.append(refLabel, refSelect);
  panel.append(refRow);

  const normRow = document.createElement("label");
  normRow.className = "slider-row";
  const norm = document.createElement("input");
  norm.type = "checkbox";
  norm.checked = state.normalized;
  norm.addEventListener("change", () => {
    state.normalized = norm.checked;
    pushState();
    renderScatterPanel();
  });
  normRow.append(norm, document.createTextNode(" normalize axes (each objective's max = 1)"));
  panel.append(normRow);

  renderScenarioPanel(front);
}

function renderScenarioPanel(front: FrontSummary): void {
  const panel = byId("scenario-controls");
  panel.textContent = "";
  const heading = document.createElement("h3");
  heading.textContent = "scenario what-if";
  panel.append(heading);
  if (front.method === "nominal") {
    const hint = document.createElement("p");
    hint.className = "hint";
    hint.textContent = "What-if applies to robust and adjustable runs.";
    panel.append(hint);
    return;
  }
  const subset = state.scenarioSubset ?? front.scenario_ids;
  for (const sid of front.scenario_ids) {
    const label = document.createElement("label");
    label.className = "scenario-item";
    const checkbox = document.createElement("input");
    checkbox.type = "checkbox";
    checkbox.checked = subset.includes(sid);
    checkbox.addEventListener("change", () => {
      const current = new Set(state.scenarioSubset ?? front.scenario_ids);
      if (checkbox.checked) current.add(sid);
      else current.delete(sid);
      state.scenarioSubset = [...current].sort((a, b) => a - b);
      pushState();
      void runWhatif();
    });
    label.append(checkbox, document.createTextNode(` scenario ${sid}${sid === 0 ? " (nominal)" : ""}`));
    panel.append(label);
  }
  if (whatif?.upperBound) {
    const caveat = document.createElement("p");
    caveat.className = "caveat";
    caveat.textContent = "Subset values are an upper bound for adjustable runs: the recourse is not re-optimized.";
    panel.append(caveat);
  }
}

async function runNavigate(): Promise<void> {
  const front = activeFront();
  if (!front) {
    survivors = null;
    nearest = null;
    return;
  }
  await navigateQuery(
    () => api.navigate(front.run_id, state.bounds, state.reference),
    (response) => {
      survivors = new Set(response.surviving_point_ids);
      nearest = response.nearest_point_id;
      renderScatterPanel();
      const message = byId("nav-result");
      message.textContent = response.surviving_point_ids.length
        ? `${response.surviving_point_ids.length} of ${front.point_ids.length} points satisfy the bounds` +
          (nearest !== null ? `; nearest to reference: point ${nearest}` : "")
        : "No points satisfy the bounds.";
    },
  );
}

async function runWhatif(): Promise<void> {
  const front = activeFront();
  if (!front || front.method === "nominal" || state.scenarioSubset === null) {
    whatif = null;
    renderScatterPanel();
    return;
  }
  if (!state.scenarioSubset.length) {
    whatif = null;
    renderScatterPanel();
    return;
  }
  await whatifQuery(
    () => api.worstcase(front.run_id, state.scenarioSubset ?? []),
    (response) => {
      whatif = { points: response.points, upperBound: response.upper_bound_for_maro };
      renderScatterPanel();
      renderScenarioPanel(front);
    },
  );
}

async function renderInspectorPanel(): Promise<void> {
  const container = byId("inspector");
  const front = activeFront();
  if (!front || state.selectedPoint === null) {
    renderInspector(container, null, front?.method ?? "", front?.objective_names ?? []);
    return;
  }
  const detail = await api.point(front.run_id, state.selectedPoint);
  renderInspector(container, detail, front.method, front.objective_names);
}

async function setupCreateForm(): Promise<void> {
  const problems = await api.listProblems();
  const problemSelect = byId("new-problem") as HTMLSelectElement;
  for (const p of problems) {
    const option = document.createElement("option");
    option.value = p.id;
    option.textContent = p.id;
    problemSelect.append(option);
  }
  byId("create-run").addEventListener("click", async () => {
    const method = (byId("new-method") as HTMLSelectElement).value;
    const nPoints = Number((byId("new-points") as HTMLInputElement).value) || 11;
    const seed = Number((byId("new-seed") as HTMLInputElement).value) || 0;
    const problem = problemSelect.value;
    const overrides = problem === "toy" && method.startsWith("maro") ? { kind: "wsv" } : {};
    const created = await api.createRun({
      problem,
      method,
      overrides,
      scenarios: { strategy: "oat" },
      scalarization: { type: "epsilon_constraint", n_points: nPoints },
      seed,
    });
    statuses.push({ id: created.id, status: "pending" });
    renderRunList();
    const poll = setInterval(async () => {
      const status = await api.runStatus(created.id);
      statuses = statuses.map((s) => (s.id === status.id ? status : s));
      renderRunList();
      if (status.status === "done" || status.status === "failed") clearInterval(poll);
    }, 750);
  });
}

async function start(): Promise<void> {
  await setupCreateForm();
  await refreshRunList();
  if (state.runs.length) await loadFronts();
  renderAll();
}

void start();

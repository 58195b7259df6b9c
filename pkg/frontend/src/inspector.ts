// Point inspector: decision values, per-scenario WSV tabs, the scenario
// cloud, spread statistics, and the cost-of-robustness record.

import { markerPath } from "./render.js";
import type { PointDetail } from "./types.js";

function el<K extends keyof HTMLElementTagNameMap>(tag: K, className?: string, text?: string): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  if (className) node.className = className;
  if (text !== undefined) node.textContent = text;
  return node;
}

function fmt(value: number): string {
  return Math.abs(value) >= 1000 ? value.toFixed(1) : value.toPrecision(5);
}

function keyValueTable(values: Record<string, number>): HTMLTableElement {
  const table = el("table", "kv");
  for (const [k, v] of Object.entries(values)) {
    const row = el("tr");
    row.append(el("td", "key", k), el("td", "val", fmt(v)));
    table.append(row);
  }
  return table;
}

function scenarioCloud(detail: PointDetail, objectiveNames: string[]): SVGSVGElement {
  const svg = document.createElementNS("http://www.w3.org/2000/svg", "svg");
  const size = 180;
  const pad = 26;
  svg.setAttribute("viewBox", `0 0 ${size} ${size}`);
  svg.setAttribute("class", "cloud");
  const rows = detail.scenario_table;
  const xs = rows.map((r) => r.objectives[0]);
  const ys = rows.map((r) => r.objectives[1]);
  const lo = [Math.min(...xs), Math.min(...ys)];
  const hi = [Math.max(...xs), Math.max(...ys)];
  const span = [Math.max(hi[0] - lo[0], 1e-12), Math.max(hi[1] - lo[1], 1e-12)];
  const sx = (v: number) => pad + ((v - lo[0]) / span[0]) * (size - 2 * pad);
  const sy = (v: number) => size - pad - ((v - lo[1]) / span[1]) * (size - 2 * pad);
  const frame = document.createElementNS("http://www.w3.org/2000/svg", "rect");
  frame.setAttribute("x", `${pad}`);
  frame.setAttribute("y", `${pad}`);
  frame.setAttribute("width", `${size - 2 * pad}`);
  frame.setAttribute("height", `${size - 2 * pad}`);
  frame.setAttribute("class", "cloud-frame");
  svg.append(frame);
  for (const row of rows) {
    const node = document.createElementNS("http://www.w3.org/2000/svg", "path");
    const nominal = row.scenario_id === 0;
    node.setAttribute("d", markerPath(nominal ? "diamond" : "circle", sx(row.objectives[0]), sy(row.objectives[1]), 4));
    node.setAttribute("class", nominal ? "cloud-nominal" : "cloud-point");
    const title = document.createElementNS("http://www.w3.org/2000/svg", "title");
    title.textContent = `scenario ${row.scenario_id}: ${objectiveNames[0]}=${fmt(row.objectives[0])}, ${objectiveNames[1]}=${fmt(row.objectives[1])}`;
    node.append(title);
    svg.append(node);
  }
  const caption = document.createElementNS("http://www.w3.org/2000/svg", "text");
  caption.setAttribute("x", `${size / 2}`);
  caption.setAttribute("y", "14");
  caption.setAttribute("class", "cloud-title");
  caption.textContent = "objectives per scenario";
  svg.append(caption);
  return svg;
}

export function renderInspector(
  container: HTMLElement,
  detail: PointDetail | null,
  method: string,
  objectiveNames: string[],
): void {
  container.textContent = "";
  if (!detail) {
    container.append(el("p", "hint", "Select a point to inspect it."));
    return;
  }
  container.append(el("h3", undefined, `point ${detail.id}`));

  const section = (title: string) => {
    const box = el("div", "section");
    box.append(el("h4", undefined, title));
    container.append(box);
    return box;
  };

  const objectives = section("objectives");
  const names = objectiveNames;
  objectives.append(
    keyValueTable({
      [`${names[0]} (worst case)`]: detail.objectives_worst_case[0],
      [`${names[1]} (worst case)`]: detail.objectives_worst_case[1],
      [`${names[0]} (nominal)`]: detail.objectives_nominal[0],
      [`${names[1]} (nominal)`]: detail.objectives_nominal[1],
    }),
  );

  if (Object.keys(detail.hnv).length) {
    section("here-and-now variables").append(keyValueTable(detail.hnv));
  }

  const wsvBox = section("wait-and-see variables");
  if (detail.wsv_per_scenario) {
    const tabs = el("div", "tabs");
    const body = el("div");
    detail.wsv_per_scenario.forEach((values, k) => {
      const button = el("button", k === 0 ? "tab active" : "tab", `u${k}`);
      button.addEventListener("click", () => {
        tabs.querySelectorAll("button").forEach((b) => b.classList.remove("active"));
        button.classList.add("active");
        body.textContent = "";
        body.append(keyValueTable(values));
      });
      tabs.append(button);
    });
    body.append(keyValueTable(detail.wsv_per_scenario[0] ?? {}));
    wsvBox.append(tabs, body);
  } else if (detail.wsv && Object.keys(detail.wsv).length) {
    wsvBox.append(keyValueTable(detail.wsv));
  } else {
    wsvBox.append(el("p", "hint", "none"));
  }

  section("scenario cloud").append(scenarioCloud(detail, names));

  const stats = section("spread across scenarios");
  stats.append(
    keyValueTable({
      [`range ${names[0]}`]: detail.scatter_stats.range[0],
      [`range ${names[1]}`]: detail.scatter_stats.range[1],
      [`std ${names[0]}`]: detail.scatter_stats.std[0],
      [`std ${names[1]}`]: detail.scatter_stats.std[1],
    }),
  );

  if (method !== "nominal" && detail.cost_of_robustness) {
    const cost = section("cost of robustness");
    const record = detail.cost_of_robustness;
    const entries: Record<string, number> = {
      [`${names[0]} at nominal`]: record.nominal_objectives[0],
      [`${names[1]} at nominal`]: record.nominal_objectives[1],
    };
    if (record.gaps) {
      entries[`gap ${names[0]}`] = record.gaps[0];
      entries[`gap ${names[1]}`] = record.gaps[1];
    }
    cost.append(keyValueTable(entries));
  }
}

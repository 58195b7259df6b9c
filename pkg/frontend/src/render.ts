// SVG scatter rendering. The geometry helpers are pure so they can be
// unit-tested without a DOM; the DOM layer below them is deliberately thin.

export interface SeriesPoint {
  id: number;
  values: number[];
}

export interface Series {
  runId: string;
  method: string;
  marker: "diamond" | "circle" | "square";
  color: string;
  points: SeriesPoint[];
  overlay?: boolean;
}

export interface ScatterOptions {
  width: number;
  height: number;
  margin: number;
  xLabel: string;
  yLabel: string;
  dimmed?: (runId: string, pointId: number) => boolean;
  outlined?: (runId: string, pointId: number) => boolean;
  selected?: (runId: string, pointId: number) => boolean;
  onSelect?: (runId: string, pointId: number) => void;
}

export interface Scale {
  domain: [number, number];
  range: [number, number];
}

export function makeScale(values: number[], range: [number, number], pad = 0.06): Scale {
  let lo = Math.min(...values);
  let hi = Math.max(...values);
  if (!isFinite(lo) || !isFinite(hi)) {
    lo = 0;
    hi = 1;
  }
  if (hi - lo < 1e-12) {
    lo -= 0.5;
    hi += 0.5;
  }
  const span = hi - lo;
  return { domain: [lo - pad * span, hi + pad * span], range };
}

export function applyScale(scale: Scale, value: number): number {
  const [d0, d1] = scale.domain;
  const [r0, r1] = scale.range;
  return r0 + ((value - d0) / (d1 - d0)) * (r1 - r0);
}

export function ticks(scale: Scale, count = 5): number[] {
  const [lo, hi] = scale.domain;
  const step = (hi - lo) / (count - 1);
  return Array.from({ length: count }, (_, i) => lo + i * step);
}

/** SVG path for a marker centered at (x, y) with "radius" r. */
export function markerPath(shape: "diamond" | "circle" | "square", x: number, y: number, r: number): string {
  switch (shape) {
    case "diamond":
      return `M ${x} ${y - r} L ${x + r} ${y} L ${x} ${y + r} L ${x - r} ${y} Z`;
    case "square":
      return `M ${x - r} ${y - r} H ${x + r} V ${y + r} H ${x - r} Z`;
    case "circle": {
      // two arcs make a full circle path
      return `M ${x - r} ${y} A ${r} ${r} 0 1 0 ${x + r} ${y} A ${r} ${r} 0 1 0 ${x - r} ${y} Z`;
    }
  }
}

const SVG_NS = "http://www.w3.org/2000/svg";

function svgEl<K extends keyof SVGElementTagNameMap>(tag: K, attrs: Record<string, string>): SVGElementTagNameMap[K] {
  const el = document.createElementNS(SVG_NS, tag);
  for (const [k, v] of Object.entries(attrs)) el.setAttribute(k, v);
  return el;
}

export function renderScatter(container: HTMLElement, series: Series[], options: ScatterOptions): void {
  container.textContent = "";
  const { width, height, margin } = options;
  const svg = svgEl("svg", { viewBox: `0 0 ${width} ${height}`, class: "scatter" });

  const xs = series.flatMap((s) => s.points.map((p) => p.values[0]));
  const ys = series.flatMap((s) => s.points.map((p) => p.values[1]));
  const xScale = makeScale(xs.length ? xs : [0, 1], [margin, width - margin]);
  const yScale = makeScale(ys.length ? ys : [0, 1], [height - margin, margin]);

  for (const t of ticks(xScale)) {
    const x = applyScale(xScale, t);
    svg.append(svgEl("line", { x1: `${x}`, x2: `${x}`, y1: `${margin}`, y2: `${height - margin}`, class: "grid" }));
    const label = svgEl("text", { x: `${x}`, y: `${height - margin + 16}`, class: "tick" });
    label.textContent = t.toPrecision(3);
    svg.append(label);
  }
  for (const t of ticks(yScale)) {
    const y = applyScale(yScale, t);
    svg.append(svgEl("line", { x1: `${margin}`, x2: `${width - margin}`, y1: `${y}`, y2: `${y}`, class: "grid" }));
    const label = svgEl("text", { x: `${margin - 6}`, y: `${y + 3}`, class: "tick tick-y" });
    label.textContent = t.toPrecision(3);
    svg.append(label);
  }
  const xLabel = svgEl("text", { x: `${width / 2}`, y: `${height - 4}`, class: "axis-label" });
  xLabel.textContent = options.xLabel;
  const yLabel = svgEl("text", {
    x: "12",
    y: `${height / 2}`,
    class: "axis-label",
    transform: `rotate(-90 12 ${height / 2})`,
  });
  yLabel.textContent = options.yLabel;
  svg.append(xLabel, yLabel);

  for (const s of series) {
    const chain = s.points
      .map((p) => `${applyScale(xScale, p.values[0])},${applyScale(yScale, p.values[1])}`)
      .join(" ");
    if (!s.overlay && s.points.length > 1) {
      svg.append(svgEl("polyline", { points: chain, class: "chain", stroke: s.color }));
    }
    for (const p of s.points) {
      const x = applyScale(xScale, p.values[0]);
      const y = applyScale(yScale, p.values[1]);
      const classes = ["marker"];
      if (s.overlay) classes.push("overlay");
      if (options.dimmed?.(s.runId, p.id)) classes.push("dimmed");
      if (options.outlined?.(s.runId, p.id)) classes.push("outlined");
      if (options.selected?.(s.runId, p.id)) classes.push("selected");
      const node = svgEl("path", {
        d: markerPath(s.marker, x, y, s.overlay ? 4 : 5.5),
        class: classes.join(" "),
        fill: s.color,
        "data-run": s.runId,
        "data-point": `${p.id}`,
      });
      if (options.onSelect && !s.overlay) {
        node.addEventListener("click", () => options.onSelect?.(s.runId, p.id));
      }
      svg.append(node);
    }
  }
  container.append(svg);
}

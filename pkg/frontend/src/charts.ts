/** Hand-rolled SVG charts: probability bars and benchmark line plots.
 *
 * Bar heights come straight from API rows (|amplitude|^2); nothing else is
 * recomputed client-side.
 */

import type { StateRowJson } from "./api.js";

const SVG_NS = "http://www.w3.org/2000/svg";

export interface Bar {
  label: string;
  value: number;
}

export function bitstring(s: number, numQubits: number): string {
  let out = "";
  for (let bit = numQubits - 1; bit >= 0; bit--) {
    out += (s >> bit) & 1 ? "1" : "0";
  }
  return out;
}

/** Bars for one state-table snapshot; value is the Born probability. */
export function probabilityBars(
  rows: StateRowJson[],
  numQubits: number,
  maxBars = 64,
): Bar[] {
  const bars = rows.map((row) => ({
    label: bitstring(row.s, numQubits),
    value: row.r * row.r + row.i * row.i,
  }));
  if (bars.length <= maxBars) {
    return bars;
  }
  return [...bars]
    .sort((a, b) => b.value - a.value)
    .slice(0, maxBars)
    .sort((a, b) => (a.label < b.label ? -1 : 1));
}

export function barsFromProbabilities(
  probabilities: { s: number; p: number }[],
  numQubits: number,
  maxBars = 64,
): Bar[] {
  return probabilityBars(
    probabilities.map(({ s, p }) => ({ s, r: Math.sqrt(p), i: 0 })),
    numQubits,
    maxBars,
  );
}

function svgElement<K extends keyof SVGElementTagNameMap>(
  tag: K,
  attrs: Record<string, string | number>,
): SVGElementTagNameMap[K] {
  const el = document.createElementNS(SVG_NS, tag);
  for (const [key, value] of Object.entries(attrs)) {
    el.setAttribute(key, String(value));
  }
  return el;
}

export function renderBarChart(
  container: HTMLElement,
  bars: Bar[],
  title = "",
): void {
  container.replaceChildren();
  if (bars.length === 0) {
    container.textContent = "no rows";
    return;
  }
  const width = 640;
  const height = 220;
  const bottom = 40;
  const svg = svgElement("svg", {
    viewBox: `0 0 ${width} ${height}`,
    class: "bar-chart",
    role: "img",
  });
  const slot = width / bars.length;
  const barWidth = Math.max(2, Math.min(48, slot * 0.8));
  const maxValue = Math.max(...bars.map((bar) => bar.value), 1e-12);
  bars.forEach((bar, index) => {
    const barHeight = (bar.value / maxValue) * (height - bottom - 18);
    const x = index * slot + (slot - barWidth) / 2;
    const y = height - bottom - barHeight;
    const rect = svgElement("rect", {
      x,
      y,
      width: barWidth,
      height: Math.max(barHeight, 0.5),
      class: "bar",
    });
    const tooltip = svgElement("title", {});
    tooltip.textContent = `|${bar.label}>  p=${bar.value.toFixed(6)}`;
    rect.appendChild(tooltip);
    svg.appendChild(rect);
    const value = svgElement("text", {
      x: index * slot + slot / 2,
      y: y - 4,
      class: "bar-value",
      "text-anchor": "middle",
    });
    value.textContent = bar.value.toFixed(3);
    if (bars.length <= 16) {
      svg.appendChild(value);
    }
    if (bars.length <= 32) {
      const label = svgElement("text", {
        x: index * slot + slot / 2,
        y: height - bottom + 14,
        class: "bar-label",
        "text-anchor": "middle",
      });
      label.textContent = bar.label;
      svg.appendChild(label);
    }
  });
  if (title) {
    const caption = svgElement("text", {
      x: width / 2,
      y: height - 6,
      class: "chart-title",
      "text-anchor": "middle",
    });
    caption.textContent = title;
    svg.appendChild(caption);
  }
  container.appendChild(svg);
}

export interface Series {
  name: string;
  points: { x: number; y: number }[];
}

export function renderLineChart(
  container: HTMLElement,
  series: Series[],
  options: { xLabel: string; yLabel: string; logY?: boolean },
): void {
  container.replaceChildren();
  const usable = series.filter((entry) => entry.points.length > 0);
  if (usable.length === 0) {
    container.textContent = "no data";
    return;
  }
  const width = 460;
  const height = 260;
  const margin = { left: 56, right: 12, top: 14, bottom: 42 };
  const svg = svgElement("svg", {
    viewBox: `0 0 ${width} ${height}`,
    class: "line-chart",
    role: "img",
  });
  const points = usable.flatMap((entry) => entry.points);
  const xs = points.map((point) => point.x);
  const rawYs = points.map((point) => point.y);
  const transform = (y: number): number =>
    options.logY ? Math.log10(Math.max(y, 1e-12)) : y;
  const ys = rawYs.map(transform);
  const xMin = Math.min(...xs);
  const xMax = Math.max(...xs);
  const yMin = Math.min(...ys);
  const yMax = Math.max(...ys);
  const xSpan = xMax - xMin || 1;
  const ySpan = yMax - yMin || 1;
  const toX = (x: number): number =>
    margin.left + ((x - xMin) / xSpan) * (width - margin.left - margin.right);
  const toY = (y: number): number =>
    height -
    margin.bottom -
    ((transform(y) - yMin) / ySpan) * (height - margin.top - margin.bottom);

  svg.appendChild(
    svgElement("line", {
      x1: margin.left, y1: height - margin.bottom,
      x2: width - margin.right, y2: height - margin.bottom,
      class: "axis",
    }),
  );
  svg.appendChild(
    svgElement("line", {
      x1: margin.left, y1: margin.top,
      x2: margin.left, y2: height - margin.bottom,
      class: "axis",
    }),
  );

  usable.forEach((entry, seriesIndex) => {
    const sorted = [...entry.points].sort((a, b) => a.x - b.x);
    const path = sorted
      .map((point, index) =>
        `${index === 0 ? "M" : "L"}${toX(point.x).toFixed(1)},${toY(point.y).toFixed(1)}`)
      .join(" ");
    svg.appendChild(
      svgElement("path", { d: path, class: `series series-${seriesIndex}` }),
    );
    for (const point of sorted) {
      const dot = svgElement("circle", {
        cx: toX(point.x),
        cy: toY(point.y),
        r: 3,
        class: `series-dot series-${seriesIndex}`,
      });
      const tooltip = svgElement("title", {});
      tooltip.textContent = `${entry.name}: (${point.x}, ${point.y})`;
      dot.appendChild(tooltip);
      svg.appendChild(dot);
    }
    const legend = svgElement("text", {
      x: width - margin.right,
      y: margin.top + 14 * (seriesIndex + 1),
      class: `legend series-${seriesIndex}`,
      "text-anchor": "end",
    });
    legend.textContent = entry.name;
    svg.appendChild(legend);
  });

  for (const x of [...new Set(xs)].sort((a, b) => a - b)) {
    const tick = svgElement("text", {
      x: toX(x),
      y: height - margin.bottom + 16,
      class: "tick",
      "text-anchor": "middle",
    });
    tick.textContent = String(x);
    svg.appendChild(tick);
  }
  const xCaption = svgElement("text", {
    x: (margin.left + width - margin.right) / 2,
    y: height - 6,
    class: "chart-title",
    "text-anchor": "middle",
  });
  xCaption.textContent = options.xLabel;
  svg.appendChild(xCaption);
  const yCaption = svgElement("text", {
    x: 14,
    y: margin.top + 4,
    class: "chart-title",
  });
  yCaption.textContent = options.yLabel + (options.logY ? " (log)" : "");
  svg.appendChild(yCaption);

  container.appendChild(svg);
}

/** Cohort analytics: the threshold table and the two curve plots.
 *
 * Every displayed number comes verbatim from the service payload; the
 * client formats but never recomputes metrics. Curve points are attached
 * to their SVG markers as data attributes so rendering can be audited
 * against the payload.
 */

import type { CohortReport, CurvePoint, ThresholdRow } from "./types.js";

const ISUP_KEYS = ["1", "2", "3", "4", "5"];

export function formatRate(value: number | null): string {
  return value === null ? "n/a" : value.toFixed(3);
}

export function formatReduction(row: ThresholdRow): string {
  const pct = (row.ihc_reduction_fraction * 100).toFixed(1);
  return `${row.ihc_reduction_count} (${pct}%)`;
}

export function renderEmptyState(container: HTMLElement): void {
  container.replaceChildren();
  const empty = document.createElement("div");
  empty.className = "empty-state";
  empty.textContent =
    "No evaluation report is available for this cohort yet. " +
    "Run the evaluate step (or configure the service with predictions and a manifest), then reload.";
  container.appendChild(empty);
}

function cell(tr: HTMLTableRowElement, text: string, tag: "td" | "th" = "td"): HTMLElement {
  const element = document.createElement(tag);
  element.textContent = text;
  tr.appendChild(element);
  return element;
}

export function renderThresholdTable(report: CohortReport): HTMLTableElement {
  const table = document.createElement("table");
  table.className = "threshold-table";
  table.dataset.cohort = report.cohort_id;
  const head = document.createElement("tr");
  table.appendChild(head);
  const columns = [
    "Threshold",
    "Sensitivity",
    "Specificity",
    "TP",
    "FP",
    "TN",
    "FN",
    ...ISUP_KEYS.map((grade) => `FN ISUP ${grade}`),
    "IHC reduction (TN + FN)",
  ];
  for (const column of columns) {
    cell(head, column, "th");
  }
  for (const row of report.thresholds) {
    const tr = document.createElement("tr");
    table.appendChild(tr);
    tr.dataset.threshold = String(row.threshold);
    cell(tr, String(row.threshold));
    cell(tr, formatRate(row.sensitivity));
    cell(tr, formatRate(row.specificity));
    for (const count of [row.tp, row.fp, row.tn, row.fn]) {
      cell(tr, String(count));
    }
    for (const grade of ISUP_KEYS) {
      const count = row.fn_isup_breakdown[grade] ?? 0;
      const suffix = count > 0 && row.isup_label_level === "location" ? "*" : "";
      cell(tr, `${count}${suffix}`);
    }
    cell(tr, formatReduction(row)).className = "reduction";
  }
  return table;
}

function svgElement<K extends keyof SVGElementTagNameMap>(tag: K): SVGElementTagNameMap[K] {
  return document.createElementNS("http://www.w3.org/2000/svg", tag);
}

interface PlottedPoint {
  x: number;
  y: number;
  data: Record<string, string>;
}

function renderPlot(
  className: string,
  series: { name: string; points: PlottedPoint[] }[],
  width = 320,
  height = 240,
): SVGSVGElement {
  const svg = svgElement("svg");
  svg.setAttribute("class", className);
  svg.setAttribute("viewBox", `0 0 ${width} ${height}`);
  for (const { name, points } of series) {
    const path = svgElement("polyline");
    path.setAttribute("class", `series series-${name}`);
    path.setAttribute("fill", "none");
    path.setAttribute(
      "points",
      points.map((p) => `${(p.x * width).toFixed(2)},${((1 - p.y) * height).toFixed(2)}`).join(" "),
    );
    svg.appendChild(path);
    for (const point of points) {
      const marker = svgElement("circle");
      marker.setAttribute("class", `marker marker-${name}`);
      marker.setAttribute("cx", (point.x * width).toFixed(2));
      marker.setAttribute("cy", ((1 - point.y) * height).toFixed(2));
      marker.setAttribute("r", "1.5");
      for (const [key, value] of Object.entries(point.data)) {
        marker.setAttribute(`data-${key}`, value);
      }
      svg.appendChild(marker);
    }
  }
  return svg;
}

export function renderTradeoffPlot(points: CurvePoint[]): SVGSVGElement {
  const series = (
    name: "sensitivity" | "specificity",
  ): { name: string; points: PlottedPoint[] } => ({
    name,
    points: points
      .filter((p) => p[name] !== null)
      .map((p) => ({
        x: p.threshold,
        y: p[name] as number,
        data: { threshold: String(p.threshold), value: String(p[name]) },
      })),
  });
  return renderPlot("tradeoff-plot", [series("sensitivity"), series("specificity")]);
}

export function renderRocPlot(points: [number, number][], auc: number | null): SVGSVGElement {
  const svg = renderPlot("roc-plot", [
    {
      name: "roc",
      points: points.map(([fpr, tpr]) => ({
        x: fpr,
        y: tpr,
        data: { fpr: String(fpr), tpr: String(tpr) },
      })),
    },
  ]);
  if (auc !== null) {
    const label = svgElement("text");
    label.setAttribute("class", "auc-label");
    label.setAttribute("x", "200");
    label.setAttribute("y", "220");
    label.textContent = `AUC = ${auc.toFixed(3)}`;
    svg.appendChild(label);
  }
  return svg;
}

export function renderAnalytics(report: CohortReport | null, container: HTMLElement): void {
  if (report === null || report.thresholds.length === 0) {
    renderEmptyState(container);
    return;
  }
  container.replaceChildren();
  const heading = document.createElement("h2");
  heading.textContent = `Cohort ${report.cohort_id} (n = ${report.n_slides})`;
  container.appendChild(heading);
  container.appendChild(renderThresholdTable(report));
  if (report.curve && report.curve.length > 0) {
    container.appendChild(renderTradeoffPlot(report.curve));
  }
  if (report.roc && report.roc.length > 0) {
    container.appendChild(renderRocPlot(report.roc, report.auc));
  }
}

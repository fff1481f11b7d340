// Matrix heatmap: the active grid with likelihood rows descending and
// severity columns descending, each cell colored by its rating and showing
// the live case count. Clicking a cell filters the board.

import { clear, el } from "./dom";
import { RATING_LABELS, ratingColor } from "./format";
import type { App } from "./app";

export function renderHeatmap(root: HTMLElement, app: App): void {
  clear(root);
  root.append(el("h2", {}, `Rating matrix (v${app.matrix.version})`));
  const grid = app.heatmap;
  if (!grid) {
    return;
  }
  const table = el("table", { class: "heatmap", id: "heatmap-grid" });
  const head = el("tr", {}, el("th", {}, "L \\ S"));
  for (const severity of grid.severities) {
    head.append(el("th", {}, severity));
  }
  table.append(head);
  for (const row of grid.cells) {
    const tr = el("tr", {}, el("th", {}, row[0].likelihood));
    for (const cell of row) {
      const td = el(
        "td",
        {
          class: "heat-cell",
          "data-likelihood": cell.likelihood,
          "data-severity": cell.severity,
          title: `${cell.count} case(s), rating ${cell.rating}`,
        },
        String(cell.count),
      );
      td.style.backgroundColor = ratingColor(cell.rating);
      if (cell.count === 0) {
        td.classList.add("empty");
      }
      td.addEventListener("click", () => {
        app.filter = { likelihood: cell.likelihood, severity: cell.severity };
        app.render();
      });
      tr.append(td);
    }
    table.append(tr);
  }
  root.append(table);

  const legend = el("div", { class: "legend" }, "Cell color = rating: ");
  for (const [code, label] of Object.entries(RATING_LABELS)) {
    const swatch = el("span", { class: "swatch" }, `${code} ${label}`);
    swatch.style.backgroundColor = ratingColor(code);
    legend.append(swatch);
  }
  legend.append(el("span", {}, ` — cell number = assessed cases (${grid.total} total)`));
  root.append(legend);
}

// Iteration banner: current index and cadence, plus the close flow with an
// override dialog for cases that have not reached Monitoring.

import { clear, el } from "./dom";
import type { App } from "./app";

export function renderBanner(root: HTMLElement, app: App): void {
  clear(root);
  const iteration = app.currentIteration();
  const info = el("div", { class: "banner-info" });
  if (!iteration) {
    info.append("No iteration yet.");
  } else if (iteration.closed_at) {
    info.append(`Iteration ${iteration.index} closed (cadence ${iteration.cadence_days} days).`);
  } else {
    info.append(`Iteration ${iteration.index} open — cadence ${iteration.cadence_days} days.`);
  }
  root.append(info);

  const controls = el("div", { class: "banner-controls" });
  const errorBox = el("span", { class: "error", id: "banner-error" });

  if (!iteration || iteration.closed_at) {
    const cadence = el("input", {
      type: "number",
      value: "21",
      min: "1",
      id: "open-cadence",
      title: "cadence in days",
    });
    const openButton = el("button", { id: "open-iteration" }, "Open iteration");
    openButton.addEventListener("click", async () => {
      try {
        const result = await app.api.openIteration(Number(cadence.value), app.revision);
        if (result.warning) {
          app.notify(result.warning);
        }
        await app.refresh();
      } catch (error) {
        app.showError(errorBox, error);
      }
    });
    controls.append(cadence, openButton, errorBox);
  } else {
    const closeButton = el("button", { id: "close-iteration" }, "Close iteration");
    closeButton.addEventListener("click", () => renderCloseDialog(root, app, errorBox));
    controls.append(closeButton, errorBox);
  }
  root.append(controls);
}

function renderCloseDialog(root: HTMLElement, app: App, errorBox: HTMLElement): void {
  const existing = root.querySelector(".close-dialog");
  if (existing) {
    existing.remove();
    return;
  }
  const incomplete = app.cases.filter((c) => !c.status.complete);
  const dialog = el("div", { class: "close-dialog" });
  const inputs = new Map<number, HTMLInputElement>();
  if (incomplete.length) {
    dialog.append(
      el("p", {}, "These cases have not reached Monitoring; justify each carryover:"),
    );
    for (const c of incomplete) {
      const input = el("input", {
        type: "text",
        placeholder: "justification",
        "data-case": String(c.case_id),
      });
      inputs.set(c.case_id, input);
      dialog.append(
        el("label", { class: "override-row" }, `case ${c.case_id} (${c.profile.asset}) `, input),
      );
    }
  } else {
    dialog.append(el("p", {}, "Every case reached Monitoring; the iteration can close."));
  }
  const confirm = el("button", { id: "confirm-close" }, "Confirm close");
  confirm.addEventListener("click", async () => {
    const overrides = [...inputs.entries()]
      .filter(([, input]) => input.value.trim())
      .map(([case_id, input]) => ({ case_id, justification: input.value.trim() }));
    try {
      await app.api.closeIteration(overrides, app.revision);
      await app.refresh();
    } catch (error) {
      app.showError(errorBox, error);
    }
  });
  dialog.append(confirm);
  root.append(dialog);
}

// What-if explorer: pick a case and hypothetical likelihood/severity; the
// server answers with the rating that combination would get. Read-only.

import { clear, el, option } from "./dom";
import { ratingColor } from "./format";
import type { App } from "./app";

export function renderWhatIf(root: HTMLElement, app: App): void {
  clear(root);
  root.append(el("h2", {}, "What-if explorer"));
  if (!app.cases.length) {
    root.append(el("p", {}, "No cases yet."));
    return;
  }

  const caseSelect = el("select", { id: "whatif-case" });
  for (const c of app.cases) {
    caseSelect.append(option(String(c.case_id), `#${c.case_id} ${c.profile.asset}`));
  }
  const likelihoodSelect = el("select", { id: "whatif-likelihood" });
  for (const code of [...app.matrix.likelihood_axis].reverse()) {
    likelihoodSelect.append(option(code));
  }
  const severitySelect = el("select", { id: "whatif-severity" });
  for (const code of [...app.matrix.severity_axis].reverse()) {
    severitySelect.append(option(code));
  }

  const result = el("span", { class: "whatif-result", id: "whatif-result" }, "—");
  const current = el("span", { class: "whatif-current", id: "whatif-current" }, "");
  const errorBox = el("span", { class: "error" });

  const update = async () => {
    errorBox.textContent = "";
    try {
      const response = await app.api.whatIf(
        Number(caseSelect.value),
        likelihoodSelect.value,
        severitySelect.value,
      );
      result.textContent = response.rating;
      result.style.backgroundColor = ratingColor(response.rating);
      current.textContent = response.current_rating
        ? `current: ${response.current_rating}`
        : "not assessed yet";
    } catch (error) {
      result.textContent = "—";
      app.showError(errorBox, error);
    }
  };
  for (const select of [caseSelect, likelihoodSelect, severitySelect]) {
    select.addEventListener("change", update);
  }

  root.append(
    el("div", { class: "whatif-row" }, "Case ", caseSelect),
    el(
      "div",
      { class: "whatif-row" },
      "Likelihood ",
      likelihoodSelect,
      " Severity ",
      severitySelect,
    ),
    el("div", { class: "whatif-row" }, "Hypothetical rating: ", result, " ", current, errorBox),
  );
  void update();
}

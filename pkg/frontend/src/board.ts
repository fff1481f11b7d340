// Risk board: cases grouped by current step, a detail panel with the full
// history, and a form for the next step. Documentation is required
// client-side before submit; server error codes surface verbatim.

import { clear, el, option } from "./dom";
import { groupCasesByStep, ratingColor } from "./format";
import { STEP_ORDER, type CaseDoc, type StepName, type StepRecordDoc } from "./types";
import type { App } from "./app";

export function renderBoard(root: HTMLElement, app: App): void {
  clear(root);
  const header = el("div", { class: "board-header" });
  header.append(el("h2", {}, "Risk board"));
  if (app.filter) {
    const clearButton = el("button", { id: "clear-filter" }, "clear filter");
    clearButton.addEventListener("click", () => {
      app.filter = null;
      app.render();
    });
    header.append(
      el(
        "span",
        { class: "filter-note" },
        `showing cases at likelihood ${app.filter.likelihood} / severity ${app.filter.severity} `,
        clearButton,
      ),
    );
  }
  const newCaseButton = el("button", { id: "new-case" }, "New case");
  newCaseButton.addEventListener("click", () => renderNewCaseForm(root, app));
  header.append(newCaseButton);
  root.append(header);

  const cases = app.filter
    ? app.cases.filter(
        (c) =>
          c.assessment !== null &&
          c.assessment.likelihood === app.filter!.likelihood &&
          c.assessment.severity === app.filter!.severity,
      )
    : app.cases;

  const columns = el("div", { class: "board-columns" });
  const groups = groupCasesByStep(cases);
  for (const step of STEP_ORDER) {
    const column = el("div", { class: "board-column", "data-step": step });
    column.append(el("h3", {}, step));
    for (const c of groups.get(step) ?? []) {
      column.append(caseCard(c, app));
    }
    columns.append(column);
  }
  root.append(columns);

  const detail = el("div", { class: "case-detail", id: "case-detail" });
  root.append(detail);
  if (app.selectedCase !== null) {
    const selected = app.cases.find((c) => c.case_id === app.selectedCase);
    if (selected) {
      renderCaseDetail(detail, selected, app);
    }
  }
}

function caseCard(c: CaseDoc, app: App): HTMLElement {
  const card = el("div", { class: "case-card", "data-case": String(c.case_id) });
  const title = el("strong", {}, `#${c.case_id} ${c.profile.asset}`);
  card.append(title);
  if (c.assessment) {
    const chip = el("span", { class: "rating-chip" }, c.assessment.rating);
    chip.style.backgroundColor = ratingColor(c.assessment.rating);
    card.append(chip);
  }
  card.append(el("div", { class: "case-status" }, c.status.text));
  card.addEventListener("click", () => {
    app.selectedCase = c.case_id;
    app.render();
  });
  return card;
}

function renderCaseDetail(root: HTMLElement, c: CaseDoc, app: App): void {
  clear(root);
  root.append(el("h3", {}, `Case ${c.case_id}: ${c.profile.asset}`));
  root.append(
    el(
      "p",
      { class: "case-profile" },
      `${c.profile.description} — ${c.profile.consequence} ` +
        `(where ${c.profile.locus}, type ${c.profile.risk_type})`,
    ),
  );
  if (c.assessment) {
    root.append(
      el(
        "p",
        {},
        `Assessed ${c.assessment.likelihood}/${c.assessment.severity} -> ` +
          `${c.assessment.rating}; impact ${c.assessment.impact}`,
      ),
    );
  }
  const history = el("div", { class: "history" }, el("h4", {}, "History"));
  for (const record of c.history) {
    history.append(historyRow(record));
  }
  root.append(history);

  if (c.status.next_step) {
    root.append(stepForm(c, c.status.next_step, app));
  } else {
    root.append(el("p", { class: "done-note" }, "Cycle complete for this iteration."));
  }
}

function historyRow(record: StepRecordDoc): HTMLElement {
  return el(
    "div",
    { class: "history-row" },
    el("span", { class: "history-step" }, `${record.step} (iteration ${record.iteration})`),
    el("span", { class: "history-meta" }, ` ${record.actor} @ ${record.timestamp}: `),
    el("span", { class: "history-doc" }, record.documentation),
  );
}

const EFFECTIVENESS = ["Effective", "Ineffective", "Inconclusive"];

function stepForm(c: CaseDoc, step: StepName, app: App): HTMLElement {
  const form = el("form", { class: "step-form", "data-step": step });
  form.append(el("h4", {}, `Record ${step}`));
  const fields = new Map<string, HTMLInputElement | HTMLSelectElement | HTMLTextAreaElement>();

  const addText = (name: string, label: string) => {
    const input = el("input", { type: "text", name });
    fields.set(name, input);
    form.append(el("label", {}, `${label} `, input));
  };
  const addSelect = (name: string, label: string, values: string[]) => {
    const select = el("select", { name });
    values.forEach((value) => select.append(option(value)));
    fields.set(name, select);
    form.append(el("label", {}, `${label} `, select));
  };

  if (step === "Profile") {
    addSelect("locus", "Where", ["A", "G", "A/G"]);
    addText("asset", "Asset");
    addSelect("risk_type", "Type", ["E", "I", "E/I"]);
    addText("description", "Description");
    addText("consequence", "Consequence");
  } else if (step === "Assessment") {
    addText("vulnerability", "Vulnerability");
    addText("threat", "Threat");
    addText("threat_agent", "Threat agent");
    addText("impact", "Impact (subset of CIAa)");
    addSelect("likelihood", "Likelihood", [...app.matrix.likelihood_axis].reverse());
    addSelect("severity", "Severity", [...app.matrix.severity_axis].reverse());
  } else if (step === "Evaluation") {
    addSelect("decision", "Decision", ["Accept", "Avoid", "Transfer", "Mitigate"]);
    addText("solution", "Solution");
  } else if (step === "Treatment") {
    addText("action_text", "Action");
    addText("action_owner", "Owner");
    const due = el("input", { type: "date", name: "action_due" });
    fields.set("action_due", due);
    form.append(el("label", {}, "Due ", due));
    addText("controls", "Controls (comma separated)");
    addText("validation_note", "Validation note");
  } else {
    addText("observation", "Observation");
    addSelect("effective", "Effective", EFFECTIVENESS);
    addText("reviewed_by", "Reviewed by");
  }

  const documentation = el("textarea", {
    name: "documentation",
    placeholder: "documentation (required)",
  });
  fields.set("documentation", documentation);
  form.append(el("label", {}, "Documentation ", documentation));

  const errorBox = el("div", { class: "error form-error" });
  const submit = el("button", { type: "submit" }, `Submit ${step}`);
  form.append(submit, errorBox);

  form.addEventListener("submit", async (event) => {
    event.preventDefault();
    errorBox.textContent = "";
    // the documentation rule is also enforced client-side, before any request
    if (!documentation.value.trim()) {
      errorBox.textContent = "DocumentationRequired: every step needs documentation";
      return;
    }
    const value = (name: string) => fields.get(name)!.value;
    let payload: Record<string, unknown>;
    if (step === "Treatment") {
      payload = {
        actions: [
          { text: value("action_text"), owner: value("action_owner"), due: value("action_due") },
        ],
        controls: value("controls")
          .split(",")
          .map((s) => s.trim())
          .filter(Boolean),
        validation_note: value("validation_note"),
        documentation: documentation.value,
      };
    } else {
      payload = { documentation: documentation.value };
      for (const [name, field] of fields) {
        if (name !== "documentation") {
          payload[name] = field.value;
        }
      }
    }
    try {
      await app.api.recordStep(c.case_id, step, payload, app.revision);
      await app.refresh();
    } catch (error) {
      app.showError(errorBox, error);
    }
  });
  return form;
}

function renderNewCaseForm(root: HTMLElement, app: App): void {
  const existing = root.querySelector(".new-case-form");
  if (existing) {
    existing.remove();
    return;
  }
  const form = el("form", { class: "new-case-form step-form" });
  form.append(el("h4", {}, "New case (records its Profile step)"));
  const make = (name: string, placeholder: string) => {
    const input = el("input", { type: "text", name, placeholder });
    form.append(input);
    return input;
  };
  const locus = make("locus", "where: A, G or A/G");
  const asset = make("asset", "asset");
  const riskType = make("risk_type", "type: E, I or E/I");
  const description = make("description", "description");
  const consequence = make("consequence", "consequence");
  const documentation = el("textarea", { name: "documentation", placeholder: "documentation (required)" });
  form.append(documentation);
  const errorBox = el("div", { class: "error form-error" });
  const submit = el("button", { type: "submit" }, "Create case");
  form.append(submit, errorBox);
  form.addEventListener("submit", async (event) => {
    event.preventDefault();
    if (!documentation.value.trim()) {
      errorBox.textContent = "DocumentationRequired: every step needs documentation";
      return;
    }
    try {
      await app.api.createCase(
        {
          locus: locus.value,
          asset: asset.value,
          risk_type: riskType.value,
          description: description.value,
          consequence: consequence.value,
          documentation: documentation.value,
        },
        app.revision,
      );
      await app.refresh();
    } catch (error) {
      app.showError(errorBox, error);
    }
  });
  root.prepend(form);
}

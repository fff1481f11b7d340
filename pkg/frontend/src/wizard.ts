// AHP wizard: pick a tie group, name criteria, judge all upper-triangle
// pairs on a 1-9 slider (criteria first, then alternatives per criterion),
// watch the live CR flags, override with justification where needed, and
// finish with the ranked tie group. All numbers come from the server.

import { clear, el } from "./dom";
import { crBadge, formatScore, reciprocalOf, sliderToJudgment } from "./format";
import {
  allSlots,
  completionOverrides,
  flaggedMatrices,
  isFullyJudged,
  nextSlot,
  sessionMatrices,
} from "./wizardState";
import type { SessionDoc } from "./types";
import type { App } from "./app";

export function renderWizard(root: HTMLElement, app: App): void {
  clear(root);
  root.append(el("h2", {}, "AHP tie-breaking"));
  if (app.activeSession) {
    renderSession(root, app, app.activeSession);
    return;
  }
  renderGroupPicker(root, app);
}

function renderGroupPicker(root: HTMLElement, app: App): void {
  if (!app.ties.length) {
    root.append(el("p", {}, "No tie groups at the configured levels."));
  }
  for (const group of app.ties) {
    const row = el("div", { class: "tie-group", "data-rating": group.rating });
    row.append(
      el("span", {}, `${group.rating}: cases ${group.cases.join(", ")} `),
    );
    const criteriaInput = el("input", {
      type: "text",
      class: "criteria-input",
      placeholder: "criteria, comma separated",
      value: "urgency",
    });
    const startButton = el("button", { class: "start-session" }, "Start session");
    const errorBox = el("span", { class: "error" });
    startButton.addEventListener("click", async () => {
      const criteria = criteriaInput.value
        .split(",")
        .map((s) => s.trim())
        .filter(Boolean);
      try {
        const response = await app.api.createSession(group.cases, criteria, app.revision);
        app.revision = response.revision;
        app.activeSession = response.session;
        app.render();
      } catch (error) {
        app.showError(errorBox, error);
      }
    });
    row.append(criteriaInput, startButton, errorBox);
    root.append(row);
  }

  const completed = app.sessions.filter((s) => s.status === "Complete");
  if (completed.length) {
    root.append(el("h3", {}, "Completed sessions"));
    for (const session of completed) {
      const button = el(
        "button",
        { class: "open-session", "data-session": String(session.session_id) },
        `session ${session.session_id} (cases ${session.tie_group.join(", ")})`,
      );
      button.addEventListener("click", () => {
        app.activeSession = session;
        app.render();
      });
      root.append(button);
    }
  }
}

function renderSession(root: HTMLElement, app: App, session: SessionDoc): void {
  const backButton = el("button", { id: "wizard-back" }, "back to tie groups");
  backButton.addEventListener("click", () => {
    app.activeSession = null;
    app.render();
  });
  root.append(
    el(
      "div",
      { class: "session-head" },
      `Session ${session.session_id}: cases ${session.tie_group.join(", ")} at ${session.rating} `,
      backButton,
    ),
  );

  if (session.status === "Complete" && session.result) {
    renderResult(root, session);
    return;
  }

  const errorBox = el("div", { class: "error", id: "wizard-error" });
  const slot = nextSlot(session);
  const judged = allSlots(session).filter((s) => s.value !== null);

  if (judged.length) {
    const list = el("div", { class: "judged-list" }, el("h4", {}, "Judgments so far"));
    for (const entry of judged) {
      list.append(
        el(
          "div",
          { class: "judged-row" },
          `${entry.matrix}: ${entry.leftLabel} vs ${entry.rightLabel} = ${entry.value} ` +
            `(derived ${entry.rightLabel} vs ${entry.leftLabel} = ${reciprocalOf(entry.value!)})`,
        ),
      );
    }
    root.append(list);
  }

  if (slot) {
    const pane = el("div", { class: "judgment-pane", "data-matrix": slot.matrix });
    pane.append(
      el(
        "h4",
        {},
        slot.matrix === "criteria"
          ? "Weigh the criteria"
          : `Compare the tied cases on "${slot.matrix}"`,
      ),
    );
    const slider = el("input", {
      type: "range",
      min: "-8",
      max: "8",
      step: "1",
      value: "0",
      id: "judgment-slider",
    });
    const leftName =
      slot.matrix === "criteria" ? slot.leftLabel : `case ${slot.leftLabel}`;
    const rightName =
      slot.matrix === "criteria" ? slot.rightLabel : `case ${slot.rightLabel}`;
    const readout = el("div", { class: "judgment-readout", id: "judgment-readout" });
    const updateReadout = () => {
      const value = sliderToJudgment(Number(slider.value));
      readout.textContent = `${leftName} vs ${rightName}: ${value} (reciprocal ${reciprocalOf(value)} is derived)`;
    };
    slider.addEventListener("input", updateReadout);
    updateReadout();

    const judgeButton = el("button", { id: "judge-button" }, "Record judgment");
    judgeButton.addEventListener("click", async () => {
      try {
        const value = sliderToJudgment(Number(slider.value));
        const response = await app.api.judge(
          session.session_id,
          slot.matrix,
          slot.i,
          slot.j,
          value,
          app.revision,
        );
        app.revision = response.revision;
        app.activeSession = response.session;
        app.render();
      } catch (error) {
        app.showError(errorBox, error);
      }
    });
    pane.append(
      el("div", { class: "slider-row" }, el("span", {}, `favors ${rightName} ← `), slider, el("span", {}, ` → favors ${leftName}`)),
      readout,
      judgeButton,
    );
    root.append(pane);
  }

  // Live consistency per fully judged matrix; red flag above the threshold.
  const crList = el("div", { class: "cr-list" });
  const overrideInputs = new Map<string, HTMLInputElement>();
  for (const { name } of sessionMatrices(session)) {
    const preview = session.consistency_preview[name];
    if (!preview) {
      continue;
    }
    const badge = crBadge(preview.cr, preview.acceptable);
    const row = el("div", { class: "cr-row", "data-matrix": name });
    const flag = el("span", { class: `cr-flag ${badge.flag}` }, badge.text);
    row.append(el("span", {}, `${name}: `), flag);
    if (!preview.acceptable) {
      const input = el("input", {
        type: "text",
        class: "cr-override",
        placeholder: "override justification (required to complete)",
        "data-matrix": name,
      });
      overrideInputs.set(name, input);
      row.append(input);
    }
    crList.append(row);
  }
  root.append(crList);

  if (isFullyJudged(session)) {
    const completeButton = el("button", { id: "complete-session" }, "Complete session");
    completeButton.addEventListener("click", async () => {
      const justifications = new Map(
        [...overrideInputs.entries()].map(([name, input]) => [name, input.value]),
      );
      const flagged = flaggedMatrices(session);
      const overrides = completionOverrides(session, justifications);
      const missing = flagged.filter(({ name }) => !(name in overrides));
      if (missing.length) {
        errorBox.textContent =
          "InconsistentJudgments: justify the flagged matrices before completing " +
          `(${missing.map((m) => m.name).join(", ")})`;
        return;
      }
      try {
        const response = await app.api.completeSession(
          session.session_id,
          overrides,
          app.revision,
        );
        app.revision = response.revision;
        app.activeSession = response.session;
        await app.refresh();
      } catch (error) {
        app.showError(errorBox, error);
      }
    });
    root.append(completeButton);
  }
  root.append(errorBox);
}

function renderResult(root: HTMLElement, session: SessionDoc): void {
  const result = session.result!;
  const list = el("ol", { class: "ranking", id: "session-ranking" });
  for (const ranked of result.ranking) {
    list.append(
      el(
        "li",
        { "data-case": String(ranked.case_id) },
        `case ${ranked.case_id} — score ${formatScore(ranked.score)}`,
      ),
    );
  }
  root.append(el("h4", {}, "Final ranking"), list);
  const crs = Object.entries(result.consistency)
    .map(([name, cr]) => `${name} ${cr.toFixed(3)}`)
    .join(", ");
  root.append(el("p", { class: "result-meta" }, `Consistency ratios: ${crs}`));
}

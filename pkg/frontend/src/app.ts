// Composition root: loads snapshots, tracks the register revision for
// optimistic concurrency, and re-renders the views after every change.
// A 409 (stale revision) always surfaces as a visible refresh prompt.

import { ApiClient, ApiError } from "./api";
import { clear, el } from "./dom";
import { renderBanner } from "./banner";
import { renderBoard } from "./board";
import { renderHeatmap } from "./heatmapView";
import { renderWhatIf } from "./whatif";
import { renderWizard } from "./wizard";
import type {
  CaseDoc,
  HeatmapDoc,
  IterationDoc,
  MatrixDoc,
  SessionDoc,
  TieGroupDoc,
} from "./types";

export class App {
  revision = 0;
  cases: CaseDoc[] = [];
  matrix!: MatrixDoc;
  heatmap: HeatmapDoc | null = null;
  iterations: IterationDoc[] = [];
  ties: TieGroupDoc[] = [];
  sessions: SessionDoc[] = [];
  filter: { likelihood: string; severity: string } | null = null;
  selectedCase: number | null = null;
  activeSession: SessionDoc | null = null;

  constructor(
    public api: ApiClient,
    private root: HTMLElement,
  ) {}

  currentIteration(): IterationDoc | null {
    return this.iterations.length ? this.iterations[this.iterations.length - 1] : null;
  }

  async refresh(): Promise<void> {
    const [cases, matrix, heatmap, ties, register, sessions] = await Promise.all([
      this.api.getCases(),
      this.api.getMatrix(),
      this.api.getHeatmap(),
      this.api.getTies(),
      this.api.getRegister(),
      this.api.getSessions(),
    ]);
    this.revision = register.revision;
    this.cases = cases.cases;
    this.matrix = matrix.matrix;
    this.heatmap = heatmap;
    this.ties = ties.groups;
    this.iterations = register.iterations;
    this.sessions = sessions.sessions;
    if (this.activeSession) {
      this.activeSession =
        this.sessions.find((s) => s.session_id === this.activeSession!.session_id) ?? null;
    }
    this.render();
  }

  render(): void {
    clear(this.root);
    const banner = el("header", { id: "banner" });
    renderBanner(banner, this);
    const notices = el("div", { id: "notices" });
    const main = el("main", {});
    const board = el("section", { id: "board" });
    renderBoard(board, this);
    const aside = el("aside", {});
    const heat = el("section", { id: "heatmap" });
    renderHeatmap(heat, this);
    const whatif = el("section", { id: "whatif" });
    renderWhatIf(whatif, this);
    const wizard = el("section", { id: "wizard" });
    renderWizard(wizard, this);
    aside.append(heat, whatif, wizard);
    main.append(board, aside);
    this.root.append(banner, notices, main);
  }

  notify(message: string): void {
    const notices = this.root.querySelector("#notices");
    if (notices) {
      notices.append(el("div", { class: "notice" }, message));
    }
  }

  showError(target: HTMLElement, error: unknown): void {
    if (error instanceof ApiError && error.isStaleRevision) {
      this.showStalePrompt();
      return;
    }
    if (error instanceof ApiError) {
      // server error codes verbatim, one vocabulary with the CLI
      target.textContent = `${error.code}: ${error.message}`;
    } else {
      target.textContent = String(error);
    }
  }

  // Never overwrite silently: a stale revision always asks for a refresh.
  showStalePrompt(): void {
    const notices = this.root.querySelector("#notices");
    if (!notices) {
      return;
    }
    const prompt = el(
      "div",
      { class: "stale-prompt", id: "stale-prompt" },
      "The register changed elsewhere. Refresh to continue. ",
    );
    const button = el("button", { id: "stale-refresh" }, "Refresh");
    button.addEventListener("click", () => void this.refresh());
    prompt.append(button);
    clear(notices as HTMLElement);
    notices.append(prompt);
  }
}

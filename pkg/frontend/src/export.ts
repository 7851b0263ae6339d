// Export view: disabled (with per-section hints) until the server says the
// plan is ready; then shows the brief fields and the rendered instruction
// with copy-to-clipboard. Readiness refreshes flip the gate without a reload.

import type { ApiClient, Brief, Readiness, SectionKind } from "./api.js";
import { SECTION_LABELS } from "./api.js";
import { exportEnabled, failingSections } from "./state.js";

export class ExportView {
  readonly element: HTMLElement;
  private button: HTMLButtonElement;
  private hints: HTMLElement;
  private result: HTMLElement;
  private projectId: string | null = null;

  constructor(
    private readonly api: ApiClient,
    private readonly doc: Document = document,
  ) {
    this.element = doc.createElement("section");
    this.element.className = "export-view";

    this.button = doc.createElement("button");
    this.button.type = "button";
    this.button.className = "export-button";
    this.button.textContent = "Export app brief";
    this.button.disabled = true;
    this.button.addEventListener("click", () => void this.loadBrief());
    this.element.appendChild(this.button);

    this.hints = doc.createElement("ul");
    this.hints.className = "readiness-hints";
    this.element.appendChild(this.hints);

    this.result = doc.createElement("div");
    this.result.className = "export-result";
    this.element.appendChild(this.result);
  }

  setProject(projectId: string): void {
    this.projectId = projectId;
    this.result.textContent = "";
  }

  /** Server-driven gate; call on load and after every readiness change. */
  updateReadiness(readiness: Readiness | null): void {
    const enabled = exportEnabled(readiness);
    this.button.disabled = !enabled;
    this.hints.textContent = "";
    if (!enabled) {
      for (const kind of failingSections(readiness)) {
        const item = this.doc.createElement("li");
        item.dataset.section = kind;
        item.textContent = `${SECTION_LABELS[kind]} is not ready yet.`;
        this.hints.appendChild(item);
      }
    }
  }

  private async loadBrief(): Promise<void> {
    if (!this.projectId) return;
    try {
      const { brief, instruction } = await this.api.getBrief(this.projectId);
      this.render(brief, instruction);
    } catch {
      this.result.textContent = "The brief is not available yet.";
    }
  }

  private render(brief: Brief, instruction: string): void {
    this.result.textContent = "";

    const instructionBox = this.doc.createElement("blockquote");
    instructionBox.className = "build-instruction";
    instructionBox.textContent = instruction; // verbatim from the API
    this.result.appendChild(instructionBox);

    const copy = this.doc.createElement("button");
    copy.type = "button";
    copy.className = "copy-instruction";
    copy.textContent = "Copy instruction";
    copy.addEventListener("click", () => {
      void navigator.clipboard?.writeText(instruction);
      copy.textContent = "Copied!";
    });
    this.result.appendChild(copy);

    this.result.appendChild(this.renderList("Target users", brief.target_users));
    this.result.appendChild(this.renderList("Contexts", brief.contexts));
    this.result.appendChild(
      this.renderList(
        "Features",
        brief.features.map((f) => `${f.name} — ${f.components.join(", ")}`),
      ),
    );
    this.result.appendChild(this.renderList("Positive impacts", brief.positive_impacts));
    this.result.appendChild(this.renderList("Negative impacts", brief.negative_impacts));
  }

  private renderList(title: string, values: string[]): HTMLElement {
    const wrap = this.doc.createElement("div");
    wrap.className = "brief-list";
    const heading = this.doc.createElement("h4");
    heading.textContent = title;
    wrap.appendChild(heading);
    const list = this.doc.createElement("ul");
    for (const value of values) {
      const item = this.doc.createElement("li");
      item.textContent = value;
      list.appendChild(item);
    }
    wrap.appendChild(list);
    return wrap;
  }
}

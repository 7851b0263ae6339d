// Rubric feedback panel: one button runs the evaluation, and the server's
// formative messages render verbatim, grouped by section.

import type { ApiClient, RubricResult } from "./api.js";
import { SECTION_LABELS } from "./api.js";

export class FeedbackPanel {
  readonly element: HTMLElement;
  private list: HTMLElement;
  private button: HTMLButtonElement;
  private projectId: string | null = null;

  constructor(
    private readonly api: ApiClient,
    private readonly onResults: (results: RubricResult[]) => void,
    private readonly doc: Document = document,
  ) {
    this.element = doc.createElement("section");
    this.element.className = "feedback-panel";
    this.button = doc.createElement("button");
    this.button.type = "button";
    this.button.className = "evaluate-button";
    this.button.textContent = "Check my plan";
    this.button.addEventListener("click", () => void this.evaluate());
    this.element.appendChild(this.button);
    this.list = doc.createElement("div");
    this.list.className = "feedback-list";
    this.element.appendChild(this.list);
  }

  setProject(projectId: string): void {
    this.projectId = projectId;
    this.list.textContent = "";
  }

  private async evaluate(): Promise<void> {
    if (!this.projectId) return;
    this.button.disabled = true;
    try {
      const { results } = await this.api.evaluate(this.projectId);
      this.render(results);
      this.onResults(results);
    } catch {
      this.list.textContent = "Could not check the plan right now. Try again.";
    } finally {
      this.button.disabled = false;
    }
  }

  private render(results: RubricResult[]): void {
    this.list.textContent = "";
    for (const result of results) {
      const group = this.doc.createElement("div");
      group.className = "feedback-group";
      group.dataset.section = result.section;
      group.dataset.ready = String(result.section_ready);
      const heading = this.doc.createElement("h4");
      heading.textContent = SECTION_LABELS[result.section];
      group.appendChild(heading);
      const items = this.doc.createElement("ul");
      for (const message of result.feedback_messages) {
        const item = this.doc.createElement("li");
        item.textContent = message; // server strings verbatim
        items.appendChild(item);
      }
      group.appendChild(items);
      this.list.appendChild(group);
    }
  }
}

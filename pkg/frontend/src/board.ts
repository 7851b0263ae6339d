// The plan board: the title plus the four section boxes in scaffold order.
// The stage-cursor box is highlighted and shows its guidance prompt. Edits
// debounce 800 ms into a PATCH; unsaved/saving/saved state is indicated and a
// failed save leaves the text in place with a retry link.

import type { ApiClient, Guidance, Project, SectionKind } from "./api.js";
import { CHAT_SECTIONS, SECTION_LABELS } from "./api.js";
import { debounce, type Debounced } from "./debounce.js";

export const SAVE_DEBOUNCE_MS = 800;

export interface BoardHandlers {
  onProjectChange(project: Project): void;
  onOpenChat(section: SectionKind): void;
}

type SaveState = "saved" | "unsaved" | "saving" | "error";

export class PlanBoard {
  readonly element: HTMLElement;
  private project: Project | null = null;
  private guidance: Partial<Record<SectionKind, Guidance>> = {};
  private textareas = new Map<SectionKind, HTMLTextAreaElement>();
  private statusEls = new Map<SectionKind, HTMLElement>();
  private savers = new Map<SectionKind, Debounced<[]>>();

  constructor(
    private readonly api: ApiClient,
    private readonly handlers: BoardHandlers,
    private readonly doc: Document = document,
  ) {
    this.element = doc.createElement("section");
    this.element.className = "plan-board";
  }

  async loadGuidance(): Promise<void> {
    for (const kind of CHAT_SECTIONS) {
      try {
        const { guidance } = await this.api.getGuidance(kind);
        this.guidance[kind] = guidance;
      } catch {
        // guidance is decorative; the board works without it
      }
    }
  }

  setProject(project: Project): void {
    const firstRender = this.project === null || this.project.id !== project.id;
    this.project = project;
    if (firstRender) {
      this.render();
    } else {
      this.refreshHighlight();
    }
  }

  private render(): void {
    const project = this.project;
    if (!project) return;
    this.element.textContent = "";
    this.textareas.clear();
    this.statusEls.clear();
    for (const saver of this.savers.values()) saver.cancel();
    this.savers.clear();

    const titleBox = this.doc.createElement("div");
    titleBox.className = "plan-box plan-box-title";
    const titleLabel = this.doc.createElement("h2");
    titleLabel.textContent = project.title;
    titleLabel.className = "project-title";
    titleBox.appendChild(titleLabel);
    this.element.appendChild(titleBox);

    for (const kind of CHAT_SECTIONS) {
      this.element.appendChild(this.renderSection(kind, project));
    }
    this.refreshHighlight();
  }

  private renderSection(kind: SectionKind, project: Project): HTMLElement {
    const box = this.doc.createElement("div");
    box.className = "plan-box";
    box.dataset.section = kind;

    const header = this.doc.createElement("div");
    header.className = "plan-box-header";
    const label = this.doc.createElement("h3");
    label.textContent = SECTION_LABELS[kind];
    header.appendChild(label);

    const chatButton = this.doc.createElement("button");
    chatButton.type = "button";
    chatButton.className = "open-chat";
    chatButton.textContent = "Ask the planner";
    chatButton.addEventListener("click", () => this.handlers.onOpenChat(kind));
    header.appendChild(chatButton);
    box.appendChild(header);

    const prompt = this.doc.createElement("p");
    prompt.className = "guidance-prompt";
    prompt.hidden = true;
    box.appendChild(prompt);

    const textarea = this.doc.createElement("textarea");
    textarea.value = project.sections[kind].text;
    textarea.rows = 4;
    textarea.addEventListener("input", () => this.onEdit(kind));
    textarea.addEventListener("blur", () => this.savers.get(kind)?.flush());
    box.appendChild(textarea);
    this.textareas.set(kind, textarea);

    const status = this.doc.createElement("div");
    status.className = "save-status";
    box.appendChild(status);
    this.statusEls.set(kind, status);
    this.setStatus(kind, "saved");

    this.savers.set(kind, debounce(() => void this.save(kind), SAVE_DEBOUNCE_MS));
    return box;
  }

  private onEdit(kind: SectionKind): void {
    this.setStatus(kind, "unsaved");
    this.savers.get(kind)?.(); // arms the 800 ms save
  }

  private async save(kind: SectionKind): Promise<void> {
    const project = this.project;
    const textarea = this.textareas.get(kind);
    if (!project || !textarea) return;
    this.setStatus(kind, "saving");
    try {
      const { project: updated } = await this.api.patchSection(project.id, kind, textarea.value);
      this.project = updated;
      this.setStatus(kind, "saved");
      this.refreshHighlight();
      this.handlers.onProjectChange(updated);
    } catch {
      this.setStatus(kind, "error"); // local text stays put; retry link below
    }
  }

  private setStatus(kind: SectionKind, state: SaveState): void {
    const status = this.statusEls.get(kind);
    if (!status) return;
    status.dataset.state = state;
    status.textContent = "";
    if (state === "saved") status.textContent = "Saved";
    if (state === "unsaved") status.textContent = "Unsaved changes…";
    if (state === "saving") status.textContent = "Saving…";
    if (state === "error") {
      status.textContent = "Could not save. ";
      const retry = this.doc.createElement("a");
      retry.href = "#";
      retry.textContent = "Retry";
      retry.className = "retry-save";
      retry.addEventListener("click", (event) => {
        event.preventDefault();
        void this.save(kind);
      });
      status.appendChild(retry);
    }
  }

  private refreshHighlight(): void {
    const project = this.project;
    if (!project) return;
    for (const kind of CHAT_SECTIONS) {
      const box = this.element.querySelector<HTMLElement>(`[data-section="${kind}"]`);
      if (!box) continue;
      const active = project.stage_cursor === kind;
      box.classList.toggle("stage-active", active);
      const prompt = box.querySelector<HTMLElement>(".guidance-prompt");
      const card = this.guidance[kind];
      if (prompt) {
        prompt.hidden = !active || !card;
        if (active && card) prompt.textContent = card.prompt_text;
      }
    }
  }
}

// The per-section chat drawer: message thread, preset bubbles, freeform
// input. Planner replies wear an origin badge ("tip" for rule-based, "AI" for
// model, "notice" for system). One request in flight per section; the input
// is disabled while a turn is pending, and a 502 renders the server's system
// reply and re-enables the input.

import type { ApiClient, ChatInput, Message, Preset, SectionKind } from "./api.js";
import { ApiRequestError, SECTION_LABELS } from "./api.js";
import {
  beginChat,
  canSendChat,
  closeDrawer,
  endChat,
  openDrawer,
  type UiSessionState,
} from "./state.js";

const ORIGIN_BADGES: Record<string, string> = {
  rule: "tip",
  model: "AI",
  system: "notice",
};

export class ChatDrawer {
  readonly element: HTMLElement;
  private state: UiSessionState;
  private presets: Partial<Record<SectionKind, Preset[]>> = {};
  private thread: HTMLElement;
  private bubbleBar: HTMLElement;
  private input: HTMLTextAreaElement;
  private sendButton: HTMLButtonElement;
  private heading: HTMLElement;

  constructor(
    private readonly api: ApiClient,
    state: UiSessionState,
    private readonly onState: (state: UiSessionState) => void,
    private readonly doc: Document = document,
  ) {
    this.state = state;
    this.element = doc.createElement("aside");
    this.element.className = "chat-drawer";
    this.element.hidden = true;

    const header = doc.createElement("div");
    header.className = "chat-header";
    this.heading = doc.createElement("h3");
    header.appendChild(this.heading);
    const close = doc.createElement("button");
    close.type = "button";
    close.className = "chat-close";
    close.textContent = "Close";
    close.addEventListener("click", () => this.setState(closeDrawer(this.state)));
    header.appendChild(close);
    this.element.appendChild(header);

    this.thread = doc.createElement("div");
    this.thread.className = "chat-thread";
    this.element.appendChild(this.thread);

    this.bubbleBar = doc.createElement("div");
    this.bubbleBar.className = "preset-bubbles";
    this.element.appendChild(this.bubbleBar);

    const composer = doc.createElement("div");
    composer.className = "chat-composer";
    this.input = doc.createElement("textarea");
    this.input.rows = 2;
    this.input.placeholder = "Type your question…";
    composer.appendChild(this.input);
    this.sendButton = doc.createElement("button");
    this.sendButton.type = "button";
    this.sendButton.textContent = "Send";
    this.sendButton.addEventListener("click", () => void this.sendFreeform());
    composer.appendChild(this.sendButton);
    this.element.appendChild(composer);
  }

  private setState(next: UiSessionState): void {
    this.state = next;
    this.onState(next);
    this.syncVisibility();
  }

  externalState(next: UiSessionState): void {
    this.state = next;
    this.syncVisibility();
  }

  private syncVisibility(): void {
    this.element.hidden = !this.state.drawerOpen;
    const section = this.state.activeSection;
    const pending = section !== null && !canSendChat(this.state, section);
    this.input.disabled = pending;
    this.sendButton.disabled = pending;
    for (const bubble of this.bubbleBar.querySelectorAll("button")) {
      bubble.disabled = pending;
    }
  }

  async open(section: SectionKind): Promise<void> {
    this.setState(openDrawer(this.state, section));
    this.heading.textContent = `${SECTION_LABELS[section]} chat`;
    await Promise.all([this.renderPresets(section), this.renderThread(section)]);
    this.syncVisibility();
  }

  private async renderPresets(section: SectionKind): Promise<void> {
    if (!this.presets[section]) {
      const { presets } = await this.api.getPresets(section);
      this.presets[section] = presets;
    }
    this.bubbleBar.textContent = "";
    for (const preset of this.presets[section] ?? []) {
      const bubble = this.doc.createElement("button");
      bubble.type = "button";
      bubble.className = "preset-bubble";
      bubble.dataset.presetId = preset.id;
      bubble.textContent = preset.label;
      bubble.addEventListener("click", () => void this.sendTurn(section, { preset_id: preset.id }));
      this.bubbleBar.appendChild(bubble);
    }
  }

  private async renderThread(section: SectionKind): Promise<void> {
    const projectId = this.state.projectId;
    if (!projectId) return;
    const { messages } = await this.api.getTranscript(projectId, section);
    this.thread.textContent = "";
    for (const message of messages) this.appendMessage(message);
  }

  appendMessage(message: Message): void {
    const row = this.doc.createElement("div");
    row.className = `chat-message chat-${message.role}`;
    if (message.role === "planner") {
      const badge = this.doc.createElement("span");
      badge.className = `origin-badge origin-${message.origin}`;
      badge.textContent = ORIGIN_BADGES[message.origin] ?? message.origin;
      row.appendChild(badge);
    }
    const text = this.doc.createElement("span");
    text.className = "chat-text";
    text.textContent = message.text;
    row.appendChild(text);
    this.thread.appendChild(row);
    this.thread.scrollTop = this.thread.scrollHeight;
  }

  private async sendFreeform(): Promise<void> {
    const text = this.input.value.trim();
    const section = this.state.activeSection;
    if (!text || !section) return;
    const sent = await this.sendTurn(section, { text });
    if (sent) this.input.value = "";
  }

  private async sendTurn(section: SectionKind, input: ChatInput): Promise<boolean> {
    const projectId = this.state.projectId;
    if (!projectId) return false;
    const started = beginChat(this.state, section);
    if (started === null) return false; // one in-flight request per section
    this.setState(started);
    try {
      const turn = await this.api.chat(projectId, section, input);
      this.appendMessage(turn.student_echo);
      this.appendMessage(turn.planner_reply);
      return true;
    } catch (error) {
      if (error instanceof ApiRequestError && error.plannerReply) {
        // moderation/provider failure: the server persisted a system reply
        if (error.studentEcho) this.appendMessage(error.studentEcho);
        this.appendMessage(error.plannerReply);
      } else {
        this.appendLocalNotice("Network problem — your question was not sent. Try again.");
      }
      return false;
    } finally {
      this.setState(endChat(this.state, section));
    }
  }

  private appendLocalNotice(text: string): void {
    const row = this.doc.createElement("div");
    row.className = "chat-message chat-planner chat-local-error";
    const badge = this.doc.createElement("span");
    badge.className = "origin-badge origin-system";
    badge.textContent = "notice";
    row.appendChild(badge);
    const body = this.doc.createElement("span");
    body.className = "chat-text";
    body.textContent = text;
    row.appendChild(body);
    this.thread.appendChild(row);
  }
}

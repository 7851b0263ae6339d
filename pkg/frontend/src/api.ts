// Typed client for the App Planner HTTP API. The UI performs no business
// logic: every score, routing decision, and exported string shown on screen
// comes verbatim from these payloads.

export type SectionKind = "define" | "design" | "positive_impact" | "negative_impact";
export type StageCursor = SectionKind | "title" | "complete";

export const CHAT_SECTIONS: SectionKind[] = [
  "define",
  "design",
  "positive_impact",
  "negative_impact",
];

export const SECTION_LABELS: Record<SectionKind, string> = {
  define: "Define",
  design: "Design",
  positive_impact: "Positive Impact",
  negative_impact: "Negative Impact",
};

export interface SectionContent {
  text: string;
  last_edited_at: number;
  revision: number;
}

export interface Project {
  id: string;
  title: string;
  sections: Record<SectionKind, SectionContent>;
  stage_cursor: StageCursor;
  created_at: number;
  updated_at: number;
  schema_version: number;
}

export interface Readiness {
  ready: boolean;
  per_section: Record<SectionKind, boolean>;
}

export interface Preset {
  id: string;
  section: SectionKind;
  label: string;
  response_template: string;
}

export interface Guidance {
  section: SectionKind;
  prompt_text: string;
  example_text: string;
  review: boolean;
}

export type MessageOrigin = "rule" | "model" | "system";

export interface Message {
  id: string;
  project_id: string;
  section: SectionKind;
  role: "student" | "planner";
  origin: MessageOrigin;
  text: string;
  created_at: number;
}

export interface RubricScore {
  criterion_id: string;
  score: number;
  evidence: string;
  feedback: string;
}

export interface RubricResult {
  section: SectionKind;
  mode: string;
  section_ready: boolean;
  generated_at: number;
  scores: RubricScore[];
  feedback_messages: string[];
}

export interface Feature {
  name: string;
  components: string[];
  behavior: string;
}

export interface Brief {
  app_name: string;
  problem_statement: string;
  target_users: string[];
  contexts: string[];
  features: Feature[];
  positive_impacts: string[];
  negative_impacts: string[];
}

export interface ProjectSummary {
  id: string;
  title: string;
  updated_at: number;
}

export type ChatInput = { preset_id: string } | { text: string };

export interface ChatTurnResponse {
  student_echo: Message;
  planner_reply: Message;
}

export class ApiRequestError extends Error {
  constructor(
    readonly status: number,
    readonly code: string,
    message: string,
    readonly payload: Record<string, unknown> = {},
  ) {
    super(message);
    this.name = "ApiRequestError";
  }

  /** Chat errors (422/502) carry the persisted system reply to render. */
  get plannerReply(): Message | undefined {
    return this.payload["planner_reply"] as Message | undefined;
  }

  get studentEcho(): Message | undefined {
    return this.payload["student_echo"] as Message | undefined;
  }
}

export type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

export class ApiClient {
  constructor(
    private readonly baseUrl: string,
    private readonly token?: string,
    private readonly fetchFn: FetchLike = (input, init) => fetch(input, init),
  ) {}

  private async request<T>(method: string, path: string, body?: unknown): Promise<T> {
    const headers: Record<string, string> = {};
    if (body !== undefined) headers["Content-Type"] = "application/json";
    if (this.token) headers["Authorization"] = `Bearer ${this.token}`;
    const response = await this.fetchFn(`${this.baseUrl}${path}`, {
      method,
      headers,
      body: body === undefined ? undefined : JSON.stringify(body),
    });
    if (!response.ok) {
      let payload: Record<string, unknown> = {};
      try {
        payload = (await response.json()) as Record<string, unknown>;
      } catch {
        // non-JSON error body; keep the empty payload
      }
      throw new ApiRequestError(
        response.status,
        String(payload["code"] ?? "HttpError"),
        String(payload["message"] ?? `request failed with status ${response.status}`),
        payload,
      );
    }
    return (await response.json()) as T;
  }

  createProject(title: string): Promise<{ project: Project }> {
    return this.request("POST", "/projects", { title });
  }

  listProjects(): Promise<{ projects: ProjectSummary[] }> {
    return this.request("GET", "/projects");
  }

  getProject(id: string): Promise<{ project: Project; readiness: Readiness }> {
    return this.request("GET", `/projects/${id}`);
  }

  patchSection(id: string, kind: SectionKind, text: string): Promise<{ project: Project }> {
    return this.request("PATCH", `/projects/${id}/sections/${kind}`, { text });
  }

  getPresets(kind: SectionKind): Promise<{ presets: Preset[] }> {
    return this.request("GET", `/sections/${kind}/presets`);
  }

  getGuidance(kind: SectionKind): Promise<{ guidance: Guidance }> {
    return this.request("GET", `/sections/${kind}/guidance`);
  }

  chat(id: string, section: SectionKind, input: ChatInput): Promise<ChatTurnResponse> {
    return this.request("POST", `/projects/${id}/chat`, { section, input });
  }

  getTranscript(id: string, section: SectionKind): Promise<{ messages: Message[] }> {
    return this.request("GET", `/projects/${id}/transcript?section=${section}`);
  }

  evaluate(id: string, section?: SectionKind): Promise<{ results: RubricResult[] }> {
    return this.request("POST", `/projects/${id}/evaluate`, section ? { section } : {});
  }

  getBrief(id: string): Promise<{ brief: Brief; instruction: string }> {
    return this.request("GET", `/projects/${id}/brief`);
  }
}

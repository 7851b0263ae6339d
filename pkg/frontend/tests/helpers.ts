// A recording fake backend: routes are canned JSON handlers keyed by
// "METHOD path", and every request lands in the network log so tests can
// assert exactly what the UI sent (and what it never sent).

import type {
  Brief,
  FetchLike,
  Message,
  Project,
  Readiness,
  RubricResult,
  SectionKind,
} from "../src/api.js";

export interface RecordedRequest {
  method: string;
  url: string;
  body?: unknown;
}

type Handler = (body: unknown) => { status?: number; json: unknown };

export class FakeBackend {
  readonly requests: RecordedRequest[] = [];
  private routes = new Map<string, Handler>();

  on(method: string, path: string, jsonOrHandler: unknown | Handler): void {
    const handler: Handler =
      typeof jsonOrHandler === "function"
        ? (jsonOrHandler as Handler)
        : () => ({ json: jsonOrHandler });
    this.routes.set(`${method} ${path}`, handler);
  }

  get fetch(): FetchLike {
    return async (url, init) => {
      const method = init?.method ?? "GET";
      const path = url.replace(/^https?:\/\/[^/]+/, "");
      const body = init?.body ? JSON.parse(String(init.body)) : undefined;
      this.requests.push({ method, url, body });
      const handler = this.routes.get(`${method} ${path}`);
      if (!handler) {
        return fakeResponse(404, { code: "NotFound", message: `no route ${method} ${path}` });
      }
      const result = handler(body);
      return fakeResponse(result.status ?? 200, result.json);
    };
  }

  ofMethod(method: string): RecordedRequest[] {
    return this.requests.filter((r) => r.method === method);
  }
}

function fakeResponse(status: number, json: unknown): Response {
  return {
    ok: status >= 200 && status < 300,
    status,
    json: async () => json,
  } as unknown as Response;
}

export const flush = (): Promise<void> => new Promise((resolve) => setTimeout(resolve, 0));

export function freshProject(overrides: Partial<Project> = {}): Project {
  const section = { text: "", last_edited_at: 0, revision: 0 };
  return {
    id: "p1",
    title: "LunchPal",
    sections: {
      define: { ...section },
      design: { ...section },
      positive_impact: { ...section },
      negative_impact: { ...section },
    },
    stage_cursor: "define",
    created_at: 0,
    updated_at: 0,
    schema_version: 1,
    ...overrides,
  };
}

export function notReady(): Readiness {
  return {
    ready: false,
    per_section: {
      define: false,
      design: false,
      positive_impact: false,
      negative_impact: false,
    },
  };
}

export function allReady(): Readiness {
  return {
    ready: true,
    per_section: {
      define: true,
      design: true,
      positive_impact: true,
      negative_impact: true,
    },
  };
}

export const DEFINE_PRESETS = [
  {
    id: "define.problem",
    section: "define" as SectionKind,
    label: "How can I define a problem?",
    response_template: "…",
  },
  {
    id: "define.users",
    section: "define" as SectionKind,
    label: "Who are the target users?",
    response_template: "…",
  },
  {
    id: "define.context",
    section: "define" as SectionKind,
    label: "When and where do users encounter this problem?",
    response_template: "…",
  },
];

export function message(partial: Partial<Message>): Message {
  return {
    id: "m1",
    project_id: "p1",
    section: "define",
    role: "planner",
    origin: "rule",
    text: "a reply",
    created_at: 1,
    ...partial,
  };
}

export function sampleBrief(): { brief: Brief; instruction: string } {
  return {
    brief: {
      app_name: "LunchPal",
      problem_statement: "Students waste time at lunch.",
      target_users: ["Students"],
      contexts: ["at school"],
      features: [{ name: "shows the menu", components: ["list view"], behavior: "Shows the menu." }],
      positive_impacts: ["Saves time."],
      negative_impacts: ["Could distract."],
    },
    instruction: "Make an app called LunchPal that tackles this problem: Students waste time at lunch. It should have shows the menu using list view.",
  };
}

export function rubricResult(section: SectionKind, ready: boolean): RubricResult {
  return {
    section,
    mode: "heuristic",
    section_ready: ready,
    generated_at: 0,
    scores: [],
    feedback_messages: ready
      ? [`Excellent — your ${section} section covers everything we look for!`]
      : ["Name your target users: who exactly will use this app?"],
  };
}

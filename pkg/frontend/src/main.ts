// Application wiring: pick or create a project, then mount the plan board,
// chat drawer, feedback panel, and export view against the live API.

import { ApiClient, type Project, type SectionKind } from "./api.js";
import { PlanBoard } from "./board.js";
import { ChatDrawer } from "./chat.js";
import { loadConfig } from "./config.js";
import { ExportView } from "./export.js";
import { FeedbackPanel } from "./feedback.js";
import { initialState, type UiSessionState } from "./state.js";

async function refreshReadiness(api: ApiClient, projectId: string, exportView: ExportView) {
  const { readiness } = await api.getProject(projectId);
  exportView.updateReadiness(readiness);
}

async function mountProject(api: ApiClient, root: HTMLElement, project: Project) {
  let state: UiSessionState = { ...initialState(), projectId: project.id };

  const exportView = new ExportView(api);
  exportView.setProject(project.id);

  const feedback = new FeedbackPanel(api, () => {
    void refreshReadiness(api, project.id, exportView);
  });
  feedback.setProject(project.id);

  const drawer = new ChatDrawer(api, state, (next) => {
    state = next;
  });

  const board = new PlanBoard(api, {
    onProjectChange: () => void refreshReadiness(api, project.id, exportView),
    onOpenChat: (section: SectionKind) => void drawer.open(section),
  });
  await board.loadGuidance();
  board.setProject(project);

  const main = document.createElement("div");
  main.className = "layout";
  const left = document.createElement("div");
  left.className = "layout-main";
  left.append(board.element, feedback.element, exportView.element);
  main.append(left, drawer.element);
  root.textContent = "";
  root.appendChild(main);

  await refreshReadiness(api, project.id, exportView);
}

async function pickProject(api: ApiClient, root: HTMLElement): Promise<void> {
  const params = new URLSearchParams(window.location.search);
  const wanted = params.get("project");
  if (wanted) {
    const { project } = await api.getProject(wanted);
    await mountProject(api, root, project);
    return;
  }

  const { projects } = await api.listProjects();
  root.textContent = "";
  const picker = document.createElement("section");
  picker.className = "project-picker";
  const heading = document.createElement("h2");
  heading.textContent = "Start planning";
  picker.appendChild(heading);

  const form = document.createElement("form");
  const input = document.createElement("input");
  input.placeholder = "Name your app…";
  input.maxLength = 200;
  form.appendChild(input);
  const create = document.createElement("button");
  create.type = "submit";
  create.textContent = "Create project";
  form.appendChild(create);
  form.addEventListener("submit", (event) => {
    event.preventDefault();
    void (async () => {
      const { project } = await api.createProject(input.value);
      window.history.replaceState(null, "", `?project=${project.id}`);
      await mountProject(api, root, project);
    })();
  });
  picker.appendChild(form);

  if (projects.length) {
    const list = document.createElement("ul");
    list.className = "project-list";
    for (const summary of projects) {
      const item = document.createElement("li");
      const link = document.createElement("a");
      link.href = `?project=${summary.id}`;
      link.textContent = summary.title;
      item.appendChild(link);
      list.appendChild(item);
    }
    picker.appendChild(list);
  }
  root.appendChild(picker);
}

export async function boot(root: HTMLElement): Promise<void> {
  const config = loadConfig();
  const api = new ApiClient(config.apiBaseUrl, config.apiToken);
  try {
    await pickProject(api, root);
  } catch (error) {
    root.textContent = "Could not reach the App Planner service. Is it running?";
    console.error(error);
  }
}

const rootElement = typeof document === "undefined" ? null : document.getElementById("app");
if (rootElement) {
  void boot(rootElement);
}

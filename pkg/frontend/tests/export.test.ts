// Export gate acceptance: disabled on a fresh project, enabled after a
// readiness refresh — same DOM instance, no reload.

import { describe, expect, it } from "vitest";

import { ApiClient } from "../src/api.js";
import { ExportView } from "../src/export.js";
import { FakeBackend, allReady, flush, notReady, sampleBrief } from "./helpers.js";

function viewWith(backend: FakeBackend) {
  const api = new ApiClient("http://api.test", undefined, backend.fetch);
  const view = new ExportView(api);
  view.setProject("p1");
  document.body.appendChild(view.element);
  return view;
}

describe("export view", () => {
  it("is disabled with per-section hints on a fresh project", () => {
    const view = viewWith(new FakeBackend());
    view.updateReadiness(notReady());
    const button = view.element.querySelector<HTMLButtonElement>(".export-button")!;
    expect(button.disabled).toBe(true);
    const hints = Array.from(
      view.element.querySelectorAll<HTMLElement>(".readiness-hints li"),
    ).map((el) => el.dataset.section);
    expect(hints).toEqual(["define", "design", "positive_impact", "negative_impact"]);
  });

  it("enables without reload once readiness flips, and shows the brief verbatim", async () => {
    const backend = new FakeBackend();
    backend.on("GET", "/projects/p1/brief", sampleBrief());
    const view = viewWith(backend);
    const button = view.element.querySelector<HTMLButtonElement>(".export-button")!;

    view.updateReadiness(notReady());
    expect(button.disabled).toBe(true);

    view.updateReadiness(allReady()); // same instance: no reload involved
    expect(button.disabled).toBe(false);
    expect(view.element.querySelectorAll(".readiness-hints li")).toHaveLength(0);

    button.click();
    await flush();
    const quote = view.element.querySelector(".build-instruction")!;
    expect(quote.textContent).toBe(sampleBrief().instruction);
    expect(backend.ofMethod("GET").map((r) => r.url)).toEqual([
      "http://api.test/projects/p1/brief",
    ]);
  });

  it("only partially failing sections are hinted", () => {
    const view = viewWith(new FakeBackend());
    const partial = {
      ready: false,
      per_section: {
        define: true,
        design: true,
        positive_impact: true,
        negative_impact: false,
      },
    };
    view.updateReadiness(partial);
    const hints = Array.from(
      view.element.querySelectorAll<HTMLElement>(".readiness-hints li"),
    ).map((el) => el.dataset.section);
    expect(hints).toEqual(["negative_impact"]);
  });
});

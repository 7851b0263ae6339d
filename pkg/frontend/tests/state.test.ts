import { describe, expect, it } from "vitest";

import {
  beginChat,
  canSendChat,
  closeDrawer,
  endChat,
  exportEnabled,
  failingSections,
  initialState,
  openDrawer,
} from "../src/state.js";
import { allReady, notReady } from "./helpers.js";

describe("ui session state", () => {
  it("starts with no project, closed drawer, nothing pending", () => {
    const state = initialState();
    expect(state.projectId).toBeNull();
    expect(state.drawerOpen).toBe(false);
    expect(Object.values(state.pending).every((p) => !p)).toBe(true);
  });

  it("binds the drawer to a chat section", () => {
    const state = openDrawer(initialState(), "design");
    expect(state.drawerOpen).toBe(true);
    expect(state.activeSection).toBe("design");
    expect(closeDrawer(state).drawerOpen).toBe(false);
  });

  it("allows at most one in-flight chat request per section", () => {
    const first = beginChat(initialState(), "define");
    expect(first).not.toBeNull();
    expect(canSendChat(first!, "define")).toBe(false);
    expect(beginChat(first!, "define")).toBeNull(); // second send refused
    expect(canSendChat(first!, "design")).toBe(true); // other sections unaffected
    const done = endChat(first!, "define");
    expect(canSendChat(done, "define")).toBe(true);
  });

  it("export gate follows the server readiness verbatim", () => {
    expect(exportEnabled(null)).toBe(false);
    expect(exportEnabled(notReady())).toBe(false);
    expect(exportEnabled(allReady())).toBe(true);
  });

  it("lists the failing sections for the hints", () => {
    expect(failingSections(notReady())).toEqual([
      "define",
      "design",
      "positive_impact",
      "negative_impact",
    ]);
    expect(failingSections(allReady())).toEqual([]);
    const partial = { ...allReady(), ready: false, per_section: { ...allReady().per_section, design: false } };
    expect(failingSections(partial)).toEqual(["design"]);
  });
});

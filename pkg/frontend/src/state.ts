// UI session state and the small pure rules the views share. Kept free of DOM
// and network so the invariants (one in-flight chat per section, drawer bound
// to a chat section, server-gated export) are directly testable.

import type { Readiness, SectionKind } from "./api.js";
import { CHAT_SECTIONS } from "./api.js";

export interface UiSessionState {
  projectId: string | null;
  activeSection: SectionKind | null;
  drawerOpen: boolean;
  pending: Record<SectionKind, boolean>;
}

export function initialState(): UiSessionState {
  return {
    projectId: null,
    activeSection: null,
    drawerOpen: false,
    pending: {
      define: false,
      design: false,
      positive_impact: false,
      negative_impact: false,
    },
  };
}

export function isChatSection(value: string): value is SectionKind {
  return (CHAT_SECTIONS as string[]).includes(value);
}

export function openDrawer(state: UiSessionState, section: SectionKind): UiSessionState {
  return { ...state, drawerOpen: true, activeSection: section };
}

export function closeDrawer(state: UiSessionState): UiSessionState {
  return { ...state, drawerOpen: false };
}

export function canSendChat(state: UiSessionState, section: SectionKind): boolean {
  return !state.pending[section];
}

/** Returns the new state, or null when a request is already in flight. */
export function beginChat(state: UiSessionState, section: SectionKind): UiSessionState | null {
  if (state.pending[section]) return null;
  return { ...state, pending: { ...state.pending, [section]: true } };
}

export function endChat(state: UiSessionState, section: SectionKind): UiSessionState {
  return { ...state, pending: { ...state.pending, [section]: false } };
}

/** The export view is purely server-gated: enabled iff readiness.ready. */
export function exportEnabled(readiness: Readiness | null): boolean {
  return readiness !== null && readiness.ready;
}

export function failingSections(readiness: Readiness | null): SectionKind[] {
  if (readiness === null) return [...CHAT_SECTIONS];
  return CHAT_SECTIONS.filter((kind) => !readiness.per_section[kind]);
}

// Build-time configuration. Either edit the defaults here before `npm run
// build`, or set window.__APP_PLANNER_API__ / window.__APP_PLANNER_TOKEN__ in
// index.html ahead of the module script.

export interface AppConfig {
  apiBaseUrl: string;
  apiToken?: string;
}

declare global {
  interface Window {
    __APP_PLANNER_API__?: string;
    __APP_PLANNER_TOKEN__?: string;
  }
}

const DEFAULT_API_BASE_URL = "http://localhost:8080";

export function loadConfig(): AppConfig {
  const win = typeof window === "undefined" ? undefined : window;
  return {
    apiBaseUrl: win?.__APP_PLANNER_API__ ?? DEFAULT_API_BASE_URL,
    apiToken: win?.__APP_PLANNER_TOKEN__,
  };
}

/** Fetch stubbing helpers: route table -> canned Response objects. */

import { vi } from "vitest";

export interface Route {
  method: string;
  path: string | RegExp;
  /** Response body (object -> JSON) or a function of the parsed request body. */
  reply: unknown | ((requestBody: unknown) => unknown);
  status?: number;
  contentType?: string;
  /** Consume the route after this many hits (default unlimited). */
  times?: number;
}

export function stubFetch(routes: Route[]): ReturnType<typeof vi.fn> {
  const mock = vi.fn(async (input: RequestInfo | URL, init?: RequestInit) => {
    const url = String(input);
    const path = url.replace(/^https?:\/\/[^/]+/, "");
    const method = init?.method ?? "GET";
    for (const route of routes) {
      if (route.times !== undefined && route.times <= 0) continue;
      const matches =
        route.method === method &&
        (typeof route.path === "string" ? route.path === path : route.path.test(path));
      if (!matches) continue;
      if (route.times !== undefined) route.times -= 1;
      let requestBody: unknown;
      if (init?.body && typeof init.body === "string") {
        try {
          requestBody = JSON.parse(init.body);
        } catch {
          requestBody = init.body;
        }
      }
      const payload = typeof route.reply === "function" ? (route.reply as (b: unknown) => unknown)(requestBody) : route.reply;
      const contentType = route.contentType ?? "application/json";
      const text = contentType.includes("json") ? JSON.stringify(payload) : String(payload);
      return new Response(text, {
        status: route.status ?? 200,
        headers: { "Content-Type": contentType },
      });
    }
    throw new TypeError(`no stubbed route for ${method} ${path}`);
  });
  vi.stubGlobal("fetch", mock);
  return mock;
}

export function errorEnvelope(code: string, message: string, field?: string) {
  return { error: { code, message, ...(field ? { field } : {}) } };
}

import { readFileSync } from "node:fs";
import { dirname, join } from "node:path";
import { fileURLToPath } from "node:url";

import type { FetchLike } from "../src/api";

const here = dirname(fileURLToPath(import.meta.url));

export function fixtureText(name: string): string {
  return readFileSync(join(here, "fixtures", name), "utf-8");
}

export interface Route {
  status?: number;
  body: string;
}

/** Mock fetch keyed by "METHOD path"; records calls for assertions. */
export function mockFetch(routes: Record<string, Route | ((init?: RequestInit) => Route)>): {
  fetch: FetchLike;
  calls: { url: string; init?: RequestInit }[];
} {
  const calls: { url: string; init?: RequestInit }[] = [];
  const fetch: FetchLike = async (url, init) => {
    calls.push({ url, init });
    const method = init?.method ?? "GET";
    const path = url.replace(/^https?:\/\/[^/]+/, "");
    const route = routes[`${method} ${path}`];
    if (!route) {
      return new Response(JSON.stringify({ code: "not_found", message: `no route ${method} ${path}`, details: [] }), {
        status: 404,
      });
    }
    const resolved = typeof route === "function" ? route(init) : route;
    return new Response(resolved.body, { status: resolved.status ?? 200 });
  };
  return { fetch, calls };
}

/** A fetch that never answers until aborted; for cancellation tests. */
export function hangingFetch(): { fetch: FetchLike; started: number } {
  const state = { started: 0 };
  const fetch: FetchLike = (_url, init) => {
    state.started++;
    return new Promise((_resolve, reject) => {
      const signal = init?.signal;
      if (signal?.aborted) {
        reject(abortError());
        return;
      }
      signal?.addEventListener("abort", () => reject(abortError()));
    });
  };
  return { fetch, started: state.started };
}

function abortError(): Error {
  const error = new Error("The operation was aborted");
  error.name = "AbortError";
  return error;
}

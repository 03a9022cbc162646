/** Test helpers: fixture loading and a routed fetch fake. */

import { readFileSync } from "node:fs";
import { join } from "node:path";

export function fixture<T>(name: string): T {
  return JSON.parse(readFileSync(join(__dirname, "..", "fixtures", name), "utf-8")) as T;
}

export type Route = (url: string, init?: RequestInit) => unknown | undefined;

/** fetch fake: first route returning non-undefined wins. */
export function fakeFetch(...routes: Route[]): typeof fetch {
  return (async (input: RequestInfo | URL, init?: RequestInit) => {
    const url = String(input);
    for (const route of routes) {
      const body = route(url, init);
      if (body !== undefined) {
        const status = (body as { __status?: number }).__status ?? 200;
        const payload = (body as { __body?: unknown }).__body ?? body;
        return new Response(JSON.stringify(payload), {
          status,
          headers: { "content-type": "application/json" },
        });
      }
    }
    throw new Error(`no fake route for ${url}`);
  }) as typeof fetch;
}

export function errorBody(status: number, detail: unknown): { __status: number; __body: unknown } {
  return { __status: status, __body: { detail } };
}

/**
 * Shared test utilities: fixture loading and a scripted fetch double. The
 * fixtures are recorded verbatim from the risk service, so assertions against
 * them are assertions against the real wire format.
 */

import { readFileSync } from "node:fs";
import { dirname, join } from "node:path";
import { fileURLToPath } from "node:url";

import type { FetchLike } from "../src/api.js";

const here = dirname(fileURLToPath(import.meta.url));

export function loadFixture<T>(name: string): T {
  const path = join(here, "fixtures", `${name}.json`);
  return JSON.parse(readFileSync(path, "utf8")) as T;
}

export interface RecordedRequest {
  url: string;
  method: string;
  body: unknown;
}

export interface ScriptedFetch {
  fetch: FetchLike;
  requests: RecordedRequest[];
}

export type RouteHandler = (request: RecordedRequest) =>
  | { status?: number; payload: unknown }
  | undefined;

/**
 * Build a fetch double that records every request and answers from the given
 * handler. Unmatched requests fail loudly so a test can never silently talk
 * to a route it did not script.
 */
export function scriptedFetch(handler: RouteHandler): ScriptedFetch {
  const requests: RecordedRequest[] = [];
  const fetchFn: FetchLike = async (url, init) => {
    const request: RecordedRequest = {
      url,
      method: init?.method ?? "GET",
      body: typeof init?.body === "string" ? JSON.parse(init.body) : undefined,
    };
    requests.push(request);
    const answer = handler(request);
    if (answer === undefined) {
      throw new Error(`unscripted request: ${request.method} ${url}`);
    }
    return new Response(JSON.stringify(answer.payload), {
      status: answer.status ?? 200,
      headers: { "content-type": "application/json" },
    });
  };
  return { fetch: fetchFn, requests };
}

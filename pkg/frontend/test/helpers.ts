/** Shared test plumbing: recorded service responses and a scripted fetch. */

import { readFileSync } from "node:fs";
import { dirname, join } from "node:path";
import { fileURLToPath } from "node:url";

import type { FetchLike } from "../src/api.js";

const FIXTURES = join(dirname(fileURLToPath(import.meta.url)), "fixtures");

export interface RecordedResponse {
  status: number;
  body: unknown;
}

export function fixture(name: string): RecordedResponse {
  return JSON.parse(readFileSync(join(FIXTURES, name), "utf-8"));
}

export function asResponse(recorded: RecordedResponse): Response {
  return new Response(JSON.stringify(recorded.body), {
    status: recorded.status,
    headers: { "Content-Type": "application/json" },
  });
}

/** Fetch stub that replies per URL-substring rule, recording every call. */
export function scriptedFetch(
  rules: Array<[match: string, recorded: RecordedResponse]>,
): { fetchFn: FetchLike; calls: Array<{ url: string; init?: RequestInit }> } {
  const calls: Array<{ url: string; init?: RequestInit }> = [];
  const fetchFn: FetchLike = async (url, init) => {
    calls.push({ url, init });
    for (const [match, recorded] of rules) {
      if (url.includes(match)) {
        return asResponse(recorded);
      }
    }
    throw new Error(`no scripted response for ${url}`);
  };
  return { fetchFn, calls };
}

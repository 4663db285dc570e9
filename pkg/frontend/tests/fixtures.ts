import { readFileSync } from "node:fs";

export interface Fixture<T = unknown> {
  request: { method: string; url: string; payload: unknown };
  status: number;
  body: T;
}

export function loadFixture<T = unknown>(name: string): Fixture<T> {
  const url = new URL(`./fixtures/${name}.json`, import.meta.url);
  return JSON.parse(readFileSync(url, "utf-8")) as Fixture<T>;
}

export function loadCorpus(): { url: string; payload: unknown; status: number }[] {
  const url = new URL("./fixtures/validation_corpus.json", import.meta.url);
  return JSON.parse(readFileSync(url, "utf-8"));
}

/** Fetch stub that replays a recorded fixture body. */
export function fetchFromFixture(fixture: Fixture): (url: string, init?: RequestInit) => Promise<Response> {
  return async () =>
    new Response(JSON.stringify(fixture.body), {
      status: fixture.status,
      headers: { "content-type": "application/json" },
    });
}

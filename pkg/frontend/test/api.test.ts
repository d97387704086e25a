import { describe, expect, it } from "vitest";

import { ApiClient, ServiceError } from "../src/api.js";
import { fixture, scriptedFetch } from "./helpers.js";

const BASE = "http://service.test";

describe("ApiClient", () => {
  it("fetches predictions from the documented endpoint", async () => {
    const { fetchFn, calls } = scriptedFetch([["/prediction", fixture("prediction.json")]]);
    const client = new ApiClient(BASE, fetchFn);
    const body = await client.getPrediction("c1", "recovery");
    expect(calls[0]?.url).toBe(`${BASE}/cases/c1/prediction?goal=recovery`);
    expect(body.prediction?.probability).toBeCloseTo(2 / 3, 12);
    expect(body.verdict).toBe("temporarily_violated");
  });

  it("posts what-if overlays without touching the case", async () => {
    const { fetchFn, calls } = scriptedFetch([["/whatif", fixture("whatif_manipulation.json")]]);
    const client = new ApiClient(BASE, fetchFn);
    const body = await client.postWhatIf("c1", "recovery", { therapy: "Manipulation" });
    expect(calls[0]?.url).toBe(`${BASE}/cases/c1/whatif?goal=recovery`);
    expect(JSON.parse(String(calls[0]?.init?.body))).toEqual({
      attributes: { therapy: "Manipulation" },
    });
    expect(body.prediction?.probability).toBe(1.0);
  });

  it("returns ingest rejections as values for inline display", async () => {
    const { fetchFn } = scriptedFetch([["/events", fixture("rejection_out_of_order.json")]]);
    const client = new ApiClient(BASE, fetchFn);
    const body = await client.postEvent("c1", {
      activity: "late",
      timestamp: "2010-01-01T00:00:00+00:00",
    });
    expect(body.accepted).toBe(false);
    if (!body.accepted) {
      expect(body.reason).toBe("out_of_order");
    }
  });

  it("throws ServiceError on plain HTTP errors", async () => {
    const { fetchFn } = scriptedFetch([
      ["/cases/ghost", { status: 404, body: { error: "unknown case", schema_version: 1 } }],
    ]);
    const client = new ApiClient(BASE, fetchFn);
    await expect(client.getCase("ghost")).rejects.toThrow(ServiceError);
  });

  it("escapes case ids in URLs", async () => {
    const { fetchFn, calls } = scriptedFetch([["/cases/", fixture("case.json")]]);
    const client = new ApiClient(BASE, fetchFn);
    await client.getCase("a/b c");
    expect(calls[0]?.url).toBe(`${BASE}/cases/a%2Fb%20c`);
  });
});

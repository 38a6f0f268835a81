import { describe, expect, it } from "vitest";

import { ApiClient, ApiError } from "../src/api";

const BASE = "http://127.0.0.1:8157";

function jsonResponse(body: unknown, status = 200): Response {
  return new Response(JSON.stringify(body), {
    status,
    headers: { "Content-Type": "application/json" },
  });
}

describe("origin guard", () => {
  it("only ever talks to the configured service origin", async () => {
    const seen: string[] = [];
    const client = new ApiClient(BASE, async (url) => {
      seen.push(url);
      return jsonResponse({ rows: [] });
    });
    await client.getLec([500000]);
    expect(seen).toHaveLength(1);
    expect(seen[0]).toBe(`${BASE}/v1/lec?thresholds=500000`);
    expect(new URL(seen[0] ?? "").origin).toBe(BASE);
  });

  it("refuses absolute URLs pointing elsewhere", async () => {
    const client = new ApiClient(BASE, async () => jsonResponse({}));
    await expect(
      // a path that is actually a foreign absolute URL must never be fetched
      client["request"]("https://collector.example/exfil"),
    ).rejects.toThrow(/foreign origin/);
  });
});

describe("request handling", () => {
  it("posts maturities as the documented body shape", async () => {
    let captured: unknown;
    const client = new ApiClient(BASE, async (_url, init) => {
      captured = JSON.parse(String(init?.body));
      return jsonResponse({ annual_risk_usd: "9280.00" });
    });
    await client.postForecast({ "1a": "fully_implemented", "5a": 0.81 });
    expect(captured).toEqual({
      maturities: { "1a": "fully_implemented", "5a": 0.81 },
    });
  });

  it("surfaces service error messages with status codes", async () => {
    const client = new ApiClient(BASE, async () =>
      jsonResponse({ error: { status: 400, message: "missing maturity for controls: 6b" } }, 400),
    );
    const failure = await client.getModel().catch((e: unknown) => e);
    expect(failure).toBeInstanceOf(ApiError);
    expect((failure as ApiError).status).toBe(400);
    expect((failure as ApiError).message).toContain("6b");
  });

  it("flags non-JSON responses", async () => {
    const client = new ApiClient(BASE, async () => new Response("<html>oops</html>"));
    await expect(client.getBaseline()).rejects.toThrow(/non-JSON/);
  });
});

import { describe, expect, it } from "vitest";

import { DialogClient, ServiceError } from "../src/api.js";

function capture(body: unknown, status = 200) {
  const calls: Array<{ url: string; init?: RequestInit }> = [];
  const client = new DialogClient("http://svc", async (url, init) => {
    calls.push({ url: String(url), init });
    return new Response(JSON.stringify(body), {
      status,
      headers: { "content-type": "application/json" },
    });
  });
  return { client, calls };
}

describe("request shapes", () => {
  it("creates sessions with a bare POST", async () => {
    const { client, calls } = capture({ sessionId: "abc" });
    expect(await client.createSession()).toEqual({ sessionId: "abc" });
    expect(calls[0].url).toBe("http://svc/session");
    expect(calls[0].init?.method).toBe("POST");
  });

  it("sends utterances as a JSON text body", async () => {
    const { client, calls } = capture({ act: "query", text: "?", openGoals: [], drsBox: "" });
    await client.sendUtterance("abc", "From Milan.");
    expect(calls[0].url).toBe("http://svc/session/abc/utterance");
    expect(JSON.parse(String(calls[0].init?.body))).toEqual({ text: "From Milan." });
    expect(calls[0].init?.headers).toMatchObject({ "content-type": "application/json" });
  });

  it("fetches state with GET", async () => {
    const { client, calls } = capture({ sessionId: "abc", history: [] });
    await client.getState("abc");
    expect(calls[0].url).toBe("http://svc/session/abc/state");
    expect(calls[0].init?.method).toBeUndefined();
  });
});

describe("error mapping", () => {
  it("turns the error envelope into a typed error", async () => {
    const { client } = capture(
      { error: { code: "UnknownSession", message: "no session xyz" } },
      404,
    );
    const err = await client.getState("xyz").catch((e) => e);
    expect(err).toBeInstanceOf(ServiceError);
    expect(err.code).toBe("UnknownSession");
    expect(err.message).toBe("no session xyz");
  });

  it("labels non-envelope failures with the HTTP status", async () => {
    const client = new DialogClient(
      "http://svc",
      async () => new Response("boom", { status: 502 }),
    );
    const err = await client.createSession().catch((e) => e);
    expect(err).toBeInstanceOf(ServiceError);
    expect(err.code).toBe("HTTP502");
  });

  it("wraps transport failures as Network errors", async () => {
    const client = new DialogClient("http://svc", async () => {
      throw new Error("ECONNREFUSED");
    });
    const err = await client.createSession().catch((e) => e);
    expect(err).toBeInstanceOf(ServiceError);
    expect(err.code).toBe("Network");
  });
});

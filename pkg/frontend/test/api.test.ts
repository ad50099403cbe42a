// Request-capture tests: the client talks to exactly the documented
// endpoints, and edit-then-accept sends the edited source to /resolve.

import { describe, expect, it } from "vitest";
import { ApiClient, ApiError } from "../src/api.js";
import type { SuggestionDoc } from "../src/types.js";

interface Captured {
  url: string;
  method: string;
  body: unknown;
}

function capturingFetch(
  responses: Record<string, unknown>,
  log: Captured[],
): (input: string, init?: RequestInit) => Promise<Response> {
  return async (input, init) => {
    const method = init?.method ?? "GET";
    log.push({
      url: input,
      method,
      body: init?.body ? JSON.parse(String(init.body)) : undefined,
    });
    const key = `${method} ${input}`;
    if (!(key in responses)) {
      return new Response(JSON.stringify({ error: "NotFound" }), { status: 404 });
    }
    return new Response(JSON.stringify(responses[key]), { status: 200 });
  };
}

const SUGGESTION: SuggestionDoc = {
  pending: true,
  answer: "two cells proposed",
  trace: [],
  cells: [
    { id: "q0_0", kind: "sql", source: "SELECT 1" },
    { id: "q0_1", kind: "chart", source: "{}", binding: "sql_result_q0_0" },
  ],
};

describe("ApiClient", () => {
  it("posts ask to the session endpoint with query and scope", async () => {
    const log: Captured[] = [];
    const client = new ApiClient(
      "http://api",
      capturingFetch({ "POST http://api/sessions/s1/ask": SUGGESTION }, log),
    );
    const suggestion = await client.ask("s1", "plot income", {
      level: "notebook",
      data_variable: "df1",
      task_type: "NL2VIS",
    });
    expect(suggestion.cells).toHaveLength(2);
    expect(log).toHaveLength(1);
    expect(log[0].body).toEqual({
      query: "plot income",
      scope: { level: "notebook", data_variable: "df1", task_type: "NL2VIS" },
    });
  });

  it("edit-then-accept sends the edited source as an edit decision", async () => {
    const log: Captured[] = [];
    const client = new ApiClient(
      "http://api",
      capturingFetch({ "POST http://api/sessions/s1/resolve": { revision: 2 } }, log),
    );
    const edited = [{ ...SUGGESTION.cells[0], source: "SELECT 42 AS answer" }];
    await client.resolve("s1", "edit", edited);
    expect(log[0].body).toEqual({
      decision: "edit",
      cells: [expect.objectContaining({ id: "q0_0", source: "SELECT 42 AS answer" })],
    });
  });

  it("plain accept carries no cells payload", async () => {
    const log: Captured[] = [];
    const client = new ApiClient(
      "http://api",
      capturingFetch({ "POST http://api/sessions/s1/resolve": { revision: 2 } }, log),
    );
    await client.resolve("s1", "accept");
    expect(log[0].body).toEqual({ decision: "accept" });
  });

  it("surfaces stage-attributed API errors", async () => {
    const failing = async () =>
      new Response(
        JSON.stringify({ error: "UnknownVariable", stage: "context", message: "ghost" }),
        { status: 404 },
      );
    const client = new ApiClient("http://api", failing);
    await expect(client.ask("s1", "q", { level: "notebook", task_type: "Other" }))
      .rejects.toSatisfy((error: unknown) => {
        expect(error).toBeInstanceOf(ApiError);
        const apiError = error as ApiError;
        expect(apiError.body.stage).toBe("context");
        expect(apiError.message).toContain("UnknownVariable");
        return true;
      });
  });

  it("uses only documented endpoints across a full flow", async () => {
    const log: Captured[] = [];
    const responses = {
      "GET http://api/notebooks/nb1": { id: "nb1", revision: 0, cells: [] },
      "POST http://api/sessions": { session_id: "s9" },
      "POST http://api/sessions/s9/ask": SUGGESTION,
      "POST http://api/sessions/s9/resolve": { revision: 2 },
      "GET http://api/sessions/s9/dag": { nodes: [], edges: [], var_defs: {}, diagnostics: {} },
    };
    const client = new ApiClient("http://api", capturingFetch(responses, log));
    await client.getNotebook("nb1");
    const { session_id } = await client.createSession("nb1");
    await client.ask(session_id, "q", { level: "notebook", task_type: "Other" });
    await client.resolve(session_id, "accept");
    await client.getDag(session_id);
    const mutations = log.filter((entry) => entry.method !== "GET");
    // every mutation is a session create, an ask, or a resolve
    expect(
      mutations.every((entry) =>
        /\/sessions$|\/ask$|\/resolve$/.test(entry.url),
      ),
    ).toBe(true);
  });
});

import { describe, expect, it } from "vitest";

import { SurveyClient } from "../src/api.js";
import { SessionFlow } from "../src/flow.js";
import { FakeService } from "./fake-service.js";

function makeFlow(service: FakeService, participant = "tester"): SessionFlow {
  const client = new SurveyClient("http://fake", service.fetch);
  return new SessionFlow(client, participant, { random: () => 0.1 });
}

describe("session flow", () => {
  it("starts on the instructions screen with a fresh session", async () => {
    const service = new FakeService();
    const flow = makeFlow(service);
    await flow.start();
    expect(flow.screen).toEqual({ kind: "instructions" });
    expect(flow.session?.direct).toHaveLength(18);
    expect(flow.session?.indirect).toHaveLength(15);
  });

  it("begin moves to the first direct question", async () => {
    const service = new FakeService();
    const flow = makeFlow(service);
    await flow.start();
    flow.beginQuestions();
    expect(flow.screen).toEqual({ kind: "direct", index: 0 });
  });

  it("blocks direct submission until both scales are answered", async () => {
    const service = new FakeService();
    const flow = makeFlow(service);
    await flow.start();
    flow.beginQuestions();

    expect(flow.canSubmit()).toBe(false);
    expect(await flow.submit()).toBe(false);
    expect(flow.message).toMatch(/relatedness/);
    expect(flow.screen).toEqual({ kind: "direct", index: 0 });

    flow.selectRelatedness(4);
    expect(await flow.submit()).toBe(false);
    expect(flow.message).toMatch(/substitutability/);
    expect(flow.screen).toEqual({ kind: "direct", index: 0 });

    flow.selectSimilarity(2);
    expect(flow.canSubmit()).toBe(true);
    expect(await flow.submit()).toBe(true);
    expect(flow.screen).toEqual({ kind: "direct", index: 1 });
  });

  it("requires exactly one choice on indirect questions", async () => {
    const service = new FakeService({ directCount: 0 });
    const flow = makeFlow(service);
    await flow.start();
    flow.beginQuestions();
    expect(flow.screen).toEqual({ kind: "indirect", index: 0 });
    expect(await flow.submit()).toBe(false);
    expect(flow.message).toMatch(/pick one/);
    flow.selectChoice("id2");
    expect(await flow.submit()).toBe(true);
    expect(flow.screen).toEqual({ kind: "indirect", index: 1 });
  });

  it("completes after all 33 answers and reports progress", async () => {
    const service = new FakeService();
    const flow = makeFlow(service);
    await flow.start();
    flow.beginQuestions();
    for (let i = 0; i < 18; i++) {
      flow.selectRelatedness(3);
      flow.selectSimilarity(4);
      expect(await flow.submit()).toBe(true);
    }
    expect(flow.screen).toEqual({ kind: "indirect", index: 0 });
    expect(flow.progress()).toEqual({ answered: 18, total: 33 });
    for (let i = 0; i < 15; i++) {
      flow.selectChoice(i % 2 === 0 ? "id1" : "id2");
      expect(await flow.submit()).toBe(true);
    }
    expect(flow.screen).toEqual({ kind: "done" });
    expect(flow.session?.state).toBe("complete");
  });

  it("buffers the answer across a network failure and retries", async () => {
    const service = new FakeService();
    const flow = makeFlow(service);
    await flow.start();
    flow.beginQuestions();
    flow.selectRelatedness(5);
    flow.selectSimilarity(1);

    service.failures = 1;
    expect(await flow.submit()).toBe(false);
    expect(flow.message).toMatch(/saved locally/);
    expect(flow.relatedness).toBe(5);
    expect(flow.similarity).toBe(1);

    expect(await flow.submit()).toBe(true);
    expect(flow.screen).toEqual({ kind: "direct", index: 1 });
    const stored = service.sessions.get(flow.session!.session_id)!;
    expect(stored.directAnswers[0]).toEqual({ relatedness: 5, similarity: 1 });
  });

  it("treats an already-answered conflict as progress", async () => {
    const service = new FakeService();
    const flow = makeFlow(service);
    await flow.start();
    flow.beginQuestions();
    // Answer out-of-band, as if a previous tab had submitted it.
    await service.fetch(`http://fake/sessions/${flow.session!.session_id}/direct/0`, {
      method: "POST",
      body: JSON.stringify({ relatedness: 2, similarity: 2 }),
    });
    flow.selectRelatedness(4);
    flow.selectSimilarity(4);
    expect(await flow.submit()).toBe(true);
    expect(flow.screen).toEqual({ kind: "direct", index: 1 });
  });

  it("resumes mid-session from server state", async () => {
    const service = new FakeService();
    const first = makeFlow(service);
    await first.start();
    first.beginQuestions();
    for (let i = 0; i < 5; i++) {
      first.selectRelatedness(3);
      first.selectSimilarity(3);
      await first.submit();
    }

    const resumed = makeFlow(service);
    await resumed.start(first.session!.session_id);
    expect(resumed.session?.session_id).toBe(first.session!.session_id);
    expect(resumed.screen).toEqual({ kind: "direct", index: 5 });
  });

  it("falls back to a new session when the stored id is unknown", async () => {
    const service = new FakeService();
    const flow = makeFlow(service);
    await flow.start("no-such-session");
    expect(flow.session).not.toBeNull();
    expect(flow.screen).toEqual({ kind: "instructions" });
  });

  it("surfaces validation errors inline without advancing", async () => {
    const service = new FakeService();
    const flow = makeFlow(service);
    await flow.start();
    flow.beginQuestions();
    // Bypass the local guard to exercise the server-side rejection path.
    flow.selectRelatedness(3);
    flow.similarity = 99 as unknown as number;
    expect(await flow.submit()).toBe(false);
    expect(flow.message).toMatch(/outside 1\.\.5/);
    expect(flow.screen).toEqual({ kind: "direct", index: 0 });
  });

  it("randomizes indirect choice order per question", async () => {
    const service = new FakeService({ directCount: 0 });
    const values = [0.9, 0.1, 0.9];
    const client = new SurveyClient("http://fake", service.fetch);
    const flow = new SessionFlow(client, "tester", {
      random: () => values.shift() ?? 0.5,
    });
    await flow.start();
    flow.beginQuestions();
    expect(flow.choiceOrder).toEqual(["id2", "id1"]);
    flow.selectChoice("id1");
    await flow.submit();
    expect(flow.choiceOrder).toEqual(["id1", "id2"]);
  });
});

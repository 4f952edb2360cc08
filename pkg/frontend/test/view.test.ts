import { describe, expect, it } from "vitest";

import { ServerMessage } from "../src/protocol.js";
import { applyServer, emptyView, foldStream } from "../src/view.js";

const started: ServerMessage = {
  type: "session_started",
  session_id: "abc123",
  story: "detective",
  title: "The Harrowgate Necklace",
  policy: "high",
  seed: 7,
};

function stateUpdate(partial: Partial<Extract<ServerMessage, { type: "state_update" }>> = {}): ServerMessage {
  return {
    type: "state_update",
    seq: 0,
    t: 0,
    node: "d1",
    impression: { e: 1.5, p: 1.5, a: 1.0 },
    emotion: { e: 1.0, p: 0.0, a: 2.0 },
    label: "Anger",
    similarity: 0.832,
    done: false,
    ...partial,
  };
}

describe("applyServer", () => {
  it("starts from a blank view", () => {
    const view = emptyView();
    expect(view.transcript).toEqual([]);
    expect(view.pending).toBeNull();
    expect(view.avatar).toEqual({ eyeColor: "White", animation: null, label: "Neutral" });
    expect(view.done).toBe(false);
  });

  it("session_started resets everything and records the header", () => {
    let view = emptyView();
    view = applyServer(view, { type: "narration", seq: 0, t: 0, node: "x", sentence: "old" });
    view = applyServer(view, started);
    expect(view.transcript).toEqual([]);
    expect(view.sessionId).toBe("abc123");
    expect(view.title).toBe("The Harrowgate Necklace");
    expect(view.policy).toBe("high");
    expect(view.seed).toBe(7);
  });

  it("narration appends to the transcript in order", () => {
    let view = applyServer(emptyView(), started);
    view = applyServer(view, { type: "narration", seq: 1, t: 0, node: "intro", sentence: "one" });
    view = applyServer(view, { type: "narration", seq: 1, t: 0, node: "intro", sentence: "two" });
    expect(view.transcript).toEqual(["one", "two"]);
  });

  it("decision_request makes options pending; nothing else does", () => {
    let view = applyServer(emptyView(), started);
    expect(view.pending).toBeNull();
    view = applyServer(view, {
      type: "decision_request",
      seq: 2,
      t: 0,
      node: "d1",
      prompt: "What now?",
      options: [
        { id: "go", text: "Go" },
        { id: "stay", text: "Stay" },
      ],
    });
    expect(view.pending?.node).toBe("d1");
    expect(view.pending?.options.map((o) => o.id)).toEqual(["go", "stay"]);
  });

  it("expression_cue drives the avatar, color straight from the cue", () => {
    let view = applyServer(emptyView(), started);
    view = applyServer(view, {
      type: "expression_cue",
      seq: 3,
      t: 100,
      trigger: "ChoiceMade",
      label: "Fear",
      eye_color: "Black",
      animation: "Fear1",
    });
    expect(view.avatar).toEqual({ eyeColor: "Black", animation: "Fear1", label: "Fear" });
    view = applyServer(view, {
      type: "expression_cue",
      seq: 4,
      t: 200,
      trigger: "SentenceSpoken",
      label: "Happiness",
      eye_color: "Green",
      animation: null,
    });
    expect(view.avatar.eyeColor).toBe("Green");
    expect(view.avatar.animation).toBeNull();
  });

  it("state_update extends both series and tracks the label", () => {
    let view = applyServer(emptyView(), started);
    view = applyServer(view, stateUpdate({ t: 500 }));
    view = applyServer(view, stateUpdate({ t: 900, label: "Fear", similarity: 0.91 }));
    expect(view.impressionSeries.length).toBe(2);
    expect(view.emotionSeries[0]).toEqual({ t: 500, e: 1.0, p: 0.0, a: 2.0 });
    expect(view.label).toBe("Fear");
    expect(view.similarity).toBe(0.91);
  });

  it("pending clears when the cursor moves on or the story ends", () => {
    let view = applyServer(emptyView(), started);
    const request: ServerMessage = {
      type: "decision_request",
      seq: 2,
      t: 0,
      node: "d1",
      prompt: null,
      options: [{ id: "go", text: "Go" }],
    };
    view = applyServer(view, request);
    // Same node: perception updates while the user thinks, stays pending.
    view = applyServer(view, stateUpdate({ node: "d1" }));
    expect(view.pending).not.toBeNull();
    view = applyServer(view, stateUpdate({ node: "d2" }));
    expect(view.pending).toBeNull();

    view = applyServer(view, request);
    view = applyServer(view, stateUpdate({ node: "d1", done: true }));
    expect(view.pending).toBeNull();
    expect(view.done).toBe(true);
  });

  it("errors land in lastError without touching the rest", () => {
    let view = applyServer(emptyView(), started);
    const before = view.transcript.length;
    view = applyServer(view, { type: "error", code: "not_at_decision", message: "no" });
    expect(view.lastError).toBe("not_at_decision: no");
    expect(view.transcript.length).toBe(before);
  });

  it("folding the same stream twice gives identical views", () => {
    const stream: ServerMessage[] = [
      started,
      { type: "narration", seq: 1, t: 0, node: "intro", sentence: "It begins." },
      {
        type: "expression_cue",
        seq: 1,
        t: 0,
        trigger: "SentenceSpoken",
        label: "Anger",
        eye_color: "Red",
        animation: "Anger2",
      },
      stateUpdate({ t: 0 }),
      {
        type: "decision_request",
        seq: 1,
        t: 0,
        node: "d1",
        prompt: "Choose",
        options: [
          { id: "a", text: "A" },
          { id: "b", text: "B" },
        ],
      },
      stateUpdate({ t: 10 }),
    ];
    expect(foldStream(stream)).toEqual(foldStream(stream));
    // Restart mid-stream: replaying from the header reproduces the view.
    const resumed = foldStream([...stream, ...stream]);
    expect(resumed).toEqual(foldStream(stream));
  });
});

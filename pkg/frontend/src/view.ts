// Pure view model. The client keeps no game logic of its own: the whole
// view is a fold over the server message stream, so replaying the stream
// after a reconnect rebuilds exactly the same object.

import {
  DecisionOption,
  ServerMessage,
} from "./protocol.js";

export interface EpaSample {
  t: number;
  e: number;
  p: number;
  a: number;
}

export interface PendingDecision {
  node: string;
  prompt: string | null;
  options: DecisionOption[];
}

export interface AvatarState {
  eyeColor: string;
  animation: string | null;
  label: string;
}

export interface SessionView {
  sessionId: string | null;
  story: string | null;
  title: string | null;
  policy: string | null;
  seed: number | null;
  transcript: string[];
  pending: PendingDecision | null;
  avatar: AvatarState;
  impressionSeries: EpaSample[];
  emotionSeries: EpaSample[];
  label: string;
  similarity: number | null;
  done: boolean;
  lastError: string | null;
}

export function emptyView(): SessionView {
  return {
    sessionId: null,
    story: null,
    title: null,
    policy: null,
    seed: null,
    transcript: [],
    pending: null,
    avatar: { eyeColor: "White", animation: null, label: "Neutral" },
    impressionSeries: [],
    emotionSeries: [],
    label: "Neutral",
    similarity: null,
    done: false,
    lastError: null,
  };
}

export function applyServer(view: SessionView, msg: ServerMessage): SessionView {
  switch (msg.type) {
    case "session_started":
      // A started (or resumed) session begins a fresh fold; resume
      // replays the whole backlog right after this message.
      return {
        ...emptyView(),
        sessionId: msg.session_id,
        story: msg.story,
        title: msg.title,
        policy: msg.policy,
        seed: msg.seed,
      };
    case "narration":
      return { ...view, transcript: [...view.transcript, msg.sentence] };
    case "decision_request":
      return {
        ...view,
        pending: { node: msg.node, prompt: msg.prompt, options: msg.options },
      };
    case "expression_cue":
      return {
        ...view,
        avatar: {
          eyeColor: msg.eye_color,
          animation: msg.animation,
          label: msg.label,
        },
      };
    case "state_update": {
      const sample = { t: msg.t };
      const pendingOver =
        view.pending !== null && (msg.done || msg.node !== view.pending.node);
      return {
        ...view,
        pending: pendingOver ? null : view.pending,
        impressionSeries: [...view.impressionSeries, { ...sample, ...msg.impression }],
        emotionSeries: [...view.emotionSeries, { ...sample, ...msg.emotion }],
        label: msg.label,
        similarity: msg.similarity,
        done: msg.done,
      };
    }
    case "error":
      return { ...view, lastError: `${msg.code}: ${msg.message}` };
  }
}

export function foldStream(lines: ServerMessage[]): SessionView {
  let view = emptyView();
  for (const msg of lines) {
    view = applyServer(view, msg);
  }
  return view;
}

// Wire types for the story session protocol. One JSON object per line
// (or per WebSocket frame); every message carries v: 1.

export const PROTOCOL_VERSION = 1;

export interface Epa {
  e: number;
  p: number;
  a: number;
}

export interface DecisionOption {
  id: string;
  text: string;
}

export interface SessionStarted {
  type: "session_started";
  session_id: string;
  story: string;
  title: string;
  policy: string;
  seed: number;
}

export interface Narration {
  type: "narration";
  seq: number;
  t: number;
  node: string;
  sentence: string;
}

export interface DecisionRequest {
  type: "decision_request";
  seq: number;
  t: number;
  node: string;
  prompt: string | null;
  options: DecisionOption[];
}

export interface ExpressionCue {
  type: "expression_cue";
  seq: number;
  t: number;
  trigger: "SentenceSpoken" | "ChoiceMade";
  label: string;
  eye_color: string;
  animation: string | null;
}

export interface StateUpdate {
  type: "state_update";
  seq: number;
  t: number;
  node: string | null;
  impression: Epa;
  emotion: Epa;
  label: string;
  similarity: number | null;
  done: boolean;
}

export interface ErrorMessage {
  type: "error";
  code: string;
  message: string;
}

export type ServerMessage =
  | SessionStarted
  | Narration
  | DecisionRequest
  | ExpressionCue
  | StateUpdate
  | ErrorMessage;

export type ClientMessage =
  | { type: "start_session"; story: string; policy?: string; seed?: number }
  | { type: "resume"; session_id: string }
  | { type: "choice"; option: string; t?: number }
  | {
      type: "perception";
      kind: "user_emotion" | "gaze" | "proximity";
      valence?: number;
      on_agent?: boolean;
      distance_m?: number;
      t?: number;
    }
  | { type: "tick"; t: number };

const SERVER_TYPES = new Set([
  "session_started",
  "narration",
  "decision_request",
  "expression_cue",
  "state_update",
  "error",
]);

export function parseServer(line: string): ServerMessage {
  const data = JSON.parse(line);
  if (typeof data !== "object" || data === null || Array.isArray(data)) {
    throw new Error("server line is not an object");
  }
  if (data.v !== PROTOCOL_VERSION) {
    throw new Error(`unsupported protocol version ${data.v}`);
  }
  if (!SERVER_TYPES.has(data.type)) {
    throw new Error(`unknown server message type ${data.type}`);
  }
  return data as ServerMessage;
}

export function encodeClient(msg: ClientMessage): string {
  return JSON.stringify({ v: PROTOCOL_VERSION, ...msg });
}

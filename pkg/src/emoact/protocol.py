"""One-line JSON wire protocol.

Every message, in either direction, is a single line of JSON carrying a
"v" protocol version and a "type". The same records travel over a live
socket, sit in script files fed to the CLI, and make up the event lines
of a recorded trace, so there is exactly one parser and one encoder for
all three. Encoding is canonical (sorted keys, no whitespace) so that
replaying a session reproduces its trace byte for byte.

Client to server: start_session, resume, choice, perception, tick.
Server to client: session_started, narration, decision_request,
expression_cue, state_update, error.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

PROTOCOL_VERSION = 1

VALENCE_MIN = -1.0
VALENCE_MAX = 1.0


class ProtocolError(ValueError):
    """A message that cannot be accepted, with a machine-readable code."""

    def __init__(self, code: str, message: str) -> None:
        super().__init__(message)
        self.code = code
        self.message = message


def encode_line(record: dict) -> str:
    """Canonical one-line encoding; stamps the protocol version."""
    record = {**record, "v": PROTOCOL_VERSION}
    return json.dumps(record, separators=(",", ":"), sort_keys=True)


def decode_line(line: str) -> dict:
    """Parse one wire line and check the envelope."""
    try:
        data = json.loads(line)
    except json.JSONDecodeError as exc:
        raise ProtocolError("bad_json", f"not valid JSON: {exc}") from exc
    if not isinstance(data, dict):
        raise ProtocolError("bad_message", "message must be a JSON object")
    if data.get("v") != PROTOCOL_VERSION:
        raise ProtocolError("bad_version", f"unsupported protocol version {data.get('v')!r}")
    if not isinstance(data.get("type"), str):
        raise ProtocolError("bad_message", "message needs a string 'type'")
    return data


# ---------------------------------------------------------------------------
# Client messages as typed values.


@dataclass(frozen=True)
class StartSession:
    story: str
    policy: str | None = None
    seed: int | None = None


@dataclass(frozen=True)
class Resume:
    session_id: str


@dataclass(frozen=True)
class Choice:
    option: str
    t: int | None = None


@dataclass(frozen=True)
class Perception:
    kind: str
    valence: float | None = None
    on_agent: bool | None = None
    distance_m: float | None = None
    t: int | None = None


@dataclass(frozen=True)
class Tick:
    t: int


ClientMessage = StartSession | Resume | Choice | Perception | Tick

PERCEPTION_KINDS = ("user_emotion", "gaze", "proximity")


def _require(data: dict, field: str, kind: type, where: str):
    if field not in data:
        raise ProtocolError("missing_field", f"{where} needs {field!r}")
    value = data[field]
    if kind is float:
        if isinstance(value, bool) or not isinstance(value, (int, float)) or not math.isfinite(value):
            raise ProtocolError("bad_field", f"{where}.{field} must be a finite number")
        return float(value)
    if kind is int:
        if isinstance(value, bool) or not isinstance(value, int):
            raise ProtocolError("bad_field", f"{where}.{field} must be an integer")
        return value
    if not isinstance(value, kind):
        raise ProtocolError("bad_field", f"{where}.{field} must be {kind.__name__}")
    return value


def _optional_t(data: dict, where: str) -> int | None:
    if "t" not in data or data["t"] is None:
        return None
    t = _require(data, "t", int, where)
    if t < 0:
        raise ProtocolError("bad_field", f"{where}.t must be non-negative")
    return t


def parse_client(data: dict) -> ClientMessage:
    """Turn a decoded wire record into a typed client message.

    Unknown extra fields (such as the seq/t stamps on trace event lines)
    are ignored so the one parser serves scripts, traces and sockets.
    """
    msg_type = data["type"]
    if msg_type == "start_session":
        story = _require(data, "story", str, "start_session")
        policy = data.get("policy")
        if policy is not None and policy not in ("low", "high"):
            raise ProtocolError("bad_field", "start_session.policy must be 'low' or 'high'")
        seed = None
        if data.get("seed") is not None:
            seed = _require(data, "seed", int, "start_session")
        return StartSession(story=story, policy=policy, seed=seed)
    if msg_type == "resume":
        return Resume(session_id=_require(data, "session_id", str, "resume"))
    if msg_type == "choice":
        return Choice(
            option=_require(data, "option", str, "choice"),
            t=_optional_t(data, "choice"),
        )
    if msg_type == "perception":
        kind = _require(data, "kind", str, "perception")
        if kind not in PERCEPTION_KINDS:
            raise ProtocolError(
                "bad_field",
                f"perception.kind must be one of {', '.join(PERCEPTION_KINDS)}",
            )
        t = _optional_t(data, "perception")
        if kind == "user_emotion":
            valence = _require(data, "valence", float, "perception")
            if not (VALENCE_MIN <= valence <= VALENCE_MAX):
                raise ProtocolError(
                    "bad_field",
                    f"perception.valence must be within [{VALENCE_MIN}, {VALENCE_MAX}]",
                )
            return Perception(kind=kind, valence=valence, t=t)
        if kind == "gaze":
            on_agent = _require(data, "on_agent", bool, "perception")
            return Perception(kind=kind, on_agent=on_agent, t=t)
        distance = _require(data, "distance_m", float, "perception")
        if distance < 0:
            raise ProtocolError("bad_field", "perception.distance_m must be non-negative")
        return Perception(kind=kind, distance_m=distance, t=t)
    if msg_type == "tick":
        t = _require(data, "t", int, "tick")
        if t < 0:
            raise ProtocolError("bad_field", "tick.t must be non-negative")
        return Tick(t=t)
    raise ProtocolError("unknown_type", f"unknown message type {msg_type!r}")


def client_message_to_dict(msg: ClientMessage) -> dict:
    """The wire form of a typed client message (no envelope fields)."""
    if isinstance(msg, StartSession):
        out: dict = {"type": "start_session", "story": msg.story}
        if msg.policy is not None:
            out["policy"] = msg.policy
        if msg.seed is not None:
            out["seed"] = msg.seed
        return out
    if isinstance(msg, Resume):
        return {"type": "resume", "session_id": msg.session_id}
    if isinstance(msg, Choice):
        out = {"type": "choice", "option": msg.option}
        if msg.t is not None:
            out["t"] = msg.t
        return out
    if isinstance(msg, Perception):
        out = {"type": "perception", "kind": msg.kind}
        if msg.kind == "user_emotion":
            out["valence"] = msg.valence
        elif msg.kind == "gaze":
            out["on_agent"] = msg.on_agent
        else:
            out["distance_m"] = msg.distance_m
        if msg.t is not None:
            out["t"] = msg.t
        return out
    if isinstance(msg, Tick):
        return {"type": "tick", "t": msg.t}
    raise TypeError(f"not a client message: {msg!r}")


# ---------------------------------------------------------------------------
# Server message builders. Each returns a dict ready for encode_line.


def session_started_msg(session_id: str, story: str, title: str, policy: str, seed: int) -> dict:
    return {
        "type": "session_started",
        "session_id": session_id,
        "story": story,
        "title": title,
        "policy": policy,
        "seed": seed,
    }


def narration_msg(seq: int, t: int, node: str, sentence: str) -> dict:
    return {"type": "narration", "seq": seq, "t": t, "node": node, "sentence": sentence}


def decision_request_msg(seq: int, t: int, node: str, prompt: str | None, options: list[dict]) -> dict:
    return {
        "type": "decision_request",
        "seq": seq,
        "t": t,
        "node": node,
        "prompt": prompt,
        "options": options,
    }


def expression_cue_msg(seq: int, t: int, cue_fields: dict) -> dict:
    return {"type": "expression_cue", "seq": seq, "t": t, **cue_fields}


def state_update_msg(
    seq: int,
    t: int,
    node: str | None,
    impression: dict,
    emotion: dict,
    label: str,
    similarity: float | None,
    done: bool,
) -> dict:
    return {
        "type": "state_update",
        "seq": seq,
        "t": t,
        "node": node,
        "impression": impression,
        "emotion": emotion,
        "label": label,
        "similarity": similarity,
        "done": done,
    }


def error_msg(code: str, message: str) -> dict:
    return {"type": "error", "code": code, "message": message}

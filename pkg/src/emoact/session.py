"""Event-sourced story session.

A session is a fold over client events. Each accepted event gets the
next sequence number and a logical timestamp in milliseconds, updates
the affective state and the story cursor, and yields an ordered list of
server messages stamped with that same seq/t. Identical event streams
therefore produce identical output streams, byte for byte: the only
randomness is the animation draw, and its generator is seeded from
configuration.

Narration is emitted in bursts (a whole beat at once). The client paces
its display and reports progress with tick events; the engine treats
every tick as "a sentence just landed at time t", which is what drives
high-frequency cues and the animation cooldown between choices. Forced
story beats apply their signs before their narration, so the prose of a
dark turn is already colored by it.

The trace format is NDJSON: one header line carrying the resolved
configuration and story id, then for every event its wire record
followed by a snapshot of the resulting state and cues. Replaying the
events behind a recorded trace must regenerate it exactly; the first
field that disagrees is reported as a divergence.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Callable, Iterable, TextIO

from .config import EngineConfig, policy_from_name, policy_name
from .emotion import generate_emotion
from .epa import EmotionLabel, EpaVector, label_emotion
from .expression import CueTrigger, ExpressionSelector
from .impression import (
    ImpressionState,
    apply_choice,
    apply_gaze,
    apply_proximity,
    apply_user_emotion,
    initial_state,
)
from .protocol import (
    Choice,
    ClientMessage,
    Perception,
    ProtocolError,
    Resume,
    StartSession,
    Tick,
    decision_request_msg,
    decode_line,
    encode_line,
    expression_cue_msg,
    narration_msg,
    parse_client,
    state_update_msg,
)
from .story import NodeKind, StoryGraph

TRACE_EXTENSION = ".emoact-trace"
TRACE_SCHEMA_VERSION = 1


class Session:
    """One story playthrough driven by protocol events."""

    def __init__(self, story: StoryGraph, config: EngineConfig) -> None:
        self.story = story
        self.config = config
        self.started = False
        self.done = False
        self.cursor = story.start
        self.next_seq = 0
        self.clock = 0
        self.state: ImpressionState = initial_state(config.identity)
        self._selector: ExpressionSelector | None = None
        self._emotion: EpaVector = generate_emotion(
            config.identity, self.state.impression, config.activity_coupling
        )
        self._label, self._similarity = label_emotion(self._emotion, config.catalog)
        self.events: list[dict] = []
        self.snapshots: list[dict] = []

    # -- public surface ----------------------------------------------------

    @property
    def label(self) -> EmotionLabel:
        return self._label

    @property
    def emotion(self) -> EpaVector:
        return self._emotion

    @property
    def similarity(self) -> float | None:
        return self._similarity

    def apply_wire(self, data: dict) -> list[dict]:
        """Parse one decoded wire record and apply it."""
        msg = parse_client(data)
        t = data.get("t") if isinstance(data.get("t"), int) else None
        return self.apply(msg, t=t)

    def apply(self, msg: ClientMessage, t: int | None = None) -> list[dict]:
        """Apply one event; returns the server messages it produced.

        Validation happens before any state changes, so a rejected event
        leaves the session exactly as it was.
        """
        if isinstance(msg, Resume):
            raise ProtocolError("bad_message", "resume is handled by the server, not a session")

        event_t = self._resolve_t(msg, t)
        if isinstance(msg, StartSession):
            self._validate_start(msg)
        else:
            if not self.started:
                raise ProtocolError("not_started", "first event must be start_session")
            if isinstance(msg, Choice):
                self._validate_choice(msg)

        seq = self.next_seq
        outputs: list[dict] = []
        cues: list[dict] = []

        if isinstance(msg, StartSession):
            self._do_start(msg, seq, event_t, outputs, cues)
        elif isinstance(msg, Choice):
            self._do_choice(msg, seq, event_t, outputs, cues)
        elif isinstance(msg, Perception):
            self._do_perception(msg)
        elif isinstance(msg, Tick):
            self._do_tick(seq, event_t, outputs, cues)
        else:
            raise ProtocolError("unknown_type", f"cannot apply {type(msg).__name__}")

        outputs.append(self._state_update(seq, event_t))
        self.next_seq = seq + 1
        self.clock = event_t
        self.events.append(self._event_record(msg, seq, event_t))
        self.snapshots.append(self._snapshot(seq, event_t, cues))
        return outputs

    # -- validation --------------------------------------------------------

    def _resolve_t(self, msg: ClientMessage, t: int | None) -> int:
        supplied = getattr(msg, "t", None)
        if supplied is None:
            supplied = t
        if supplied is None:
            return self.clock
        if supplied < self.clock:
            raise ProtocolError(
                "time_backwards",
                f"event time {supplied} is before the session clock {self.clock}",
            )
        return supplied

    def _validate_start(self, msg: StartSession) -> None:
        if self.started:
            raise ProtocolError("already_started", "session already started")
        if msg.story != self.story.id:
            raise ProtocolError(
                "wrong_story",
                f"session holds story {self.story.id!r}, start asked for {msg.story!r}",
            )

    def _validate_choice(self, msg: Choice) -> None:
        if self.done:
            raise ProtocolError("session_done", "the story has ended")
        node = self.story.nodes[self.cursor]
        if node.kind is not NodeKind.DECISION:
            raise ProtocolError("not_at_decision", "no decision is pending")
        if all(opt.id != msg.option for opt in node.options):
            raise ProtocolError("unknown_option", f"node {node.id!r} has no option {msg.option!r}")

    # -- event handlers ----------------------------------------------------

    def _do_start(
        self, msg: StartSession, seq: int, t: int, outputs: list[dict], cues: list[dict]
    ) -> None:
        if msg.policy is not None:
            self.config = self.config.replace(policy=policy_from_name(msg.policy))
        if msg.seed is not None:
            self.config = self.config.replace(seed=msg.seed)
        self._selector = ExpressionSelector(
            policy=self.config.policy,
            rng=random.Random(self.config.seed),
            eye_colors=self.config.eye_colors,
            animations=self.config.animations,
            cooldown_ms=self.config.cooldown_ms,
        )
        self.started = True
        self._drain(seq, t, outputs, cues)

    def _do_choice(self, msg: Choice, seq: int, t: int, outputs: list[dict], cues: list[dict]) -> None:
        option = self.story.option(self.cursor, msg.option)
        self.cursor = option.next
        self.state = apply_choice(self.state, option.signs, self.config.gains)
        self._refresh_emotion()
        self._cue(CueTrigger.CHOICE_MADE, seq, t, outputs, cues)
        self._drain(seq, t, outputs, cues)

    def _do_perception(self, msg: Perception) -> None:
        # Perception shifts the impression quietly; the shift becomes
        # visible at the next sentence or choice, never immediately.
        if msg.kind == "user_emotion":
            assert msg.valence is not None
            self.state = apply_user_emotion(self.state, msg.valence, self.config.gains)
        elif msg.kind == "gaze":
            assert msg.on_agent is not None
            self.state = apply_gaze(self.state, msg.on_agent, self.config.gains)
        else:
            assert msg.distance_m is not None
            self.state = apply_proximity(self.state, msg.distance_m, self.config.gains)
        self._refresh_emotion()

    def _do_tick(self, seq: int, t: int, outputs: list[dict], cues: list[dict]) -> None:
        # A tick reports narration progress: one sentence landed at t.
        self._cue(CueTrigger.SENTENCE_SPOKEN, seq, t, outputs, cues)

    # -- internals ----------------------------------------------------------

    def _refresh_emotion(self) -> None:
        self._emotion = generate_emotion(
            self.config.identity, self.state.impression, self.config.activity_coupling
        )
        self._label, self._similarity = label_emotion(self._emotion, self.config.catalog)

    def _cue(self, trigger: CueTrigger, seq: int, t: int, outputs: list[dict], cues: list[dict]) -> None:
        assert self._selector is not None
        cue = self._selector.select(self._label, trigger, t)
        if cue is not None:
            fields = cue.to_dict()
            outputs.append(expression_cue_msg(seq, t, fields))
            cues.append(fields)

    def _drain(self, seq: int, t: int, outputs: list[dict], cues: list[dict]) -> None:
        """Walk linear beats until a decision or the ending."""
        while True:
            node = self.story.nodes[self.cursor]
            if node.kind is NodeKind.LINEAR:
                if node.signs is not None:
                    self.state = apply_choice(self.state, node.signs, self.config.gains)
                    self._refresh_emotion()
                self._narrate(node, seq, t, outputs, cues)
                assert node.next is not None
                self.cursor = node.next
            elif node.kind is NodeKind.DECISION:
                self._narrate(node, seq, t, outputs, cues)
                outputs.append(
                    decision_request_msg(
                        seq, t, node.id, node.prompt,
                        [{"id": opt.id, "text": opt.text} for opt in node.options],
                    )
                )
                return
            else:
                self._narrate(node, seq, t, outputs, cues)
                self.done = True
                return

    def _narrate(self, node, seq: int, t: int, outputs: list[dict], cues: list[dict]) -> None:
        for sentence in node.narration:
            outputs.append(narration_msg(seq, t, node.id, sentence))
            self._cue(CueTrigger.SENTENCE_SPOKEN, seq, t, outputs, cues)

    def _state_update(self, seq: int, t: int) -> dict:
        return state_update_msg(
            seq=seq,
            t=t,
            node=self.cursor,
            impression=self.state.impression.as_dict(),
            emotion=self._emotion.as_dict(),
            label=self._label.value,
            similarity=self._similarity,
            done=self.done,
        )

    def _event_record(self, msg: ClientMessage, seq: int, t: int) -> dict:
        from .protocol import client_message_to_dict

        record = client_message_to_dict(msg)
        record["seq"] = seq
        record["t"] = t
        return record

    def _snapshot(self, seq: int, t: int, cues: list[dict]) -> dict:
        return {
            "type": "snapshot",
            "seq": seq,
            "t": t,
            "cursor": self.cursor,
            "done": self.done,
            "impression": self.state.to_dict(),
            "emotion": self._emotion.as_dict(),
            "label": self._label.value,
            "similarity": self._similarity,
            "cues": cues,
        }


# ---------------------------------------------------------------------------
# Traces.


def trace_header(config: EngineConfig, story_id: str) -> dict:
    return {
        "type": "trace_header",
        "schema": TRACE_SCHEMA_VERSION,
        "story": story_id,
        "config": config.to_dict(),
    }


def session_trace_lines(session: Session) -> list[str]:
    """The complete trace of a session as encoded NDJSON lines."""
    lines = [encode_line(trace_header(session.config, session.story.id))]
    for event, snapshot in zip(session.events, session.snapshots):
        lines.append(encode_line(event))
        lines.append(encode_line(snapshot))
    return lines


class TraceWriter:
    """Incremental trace writer for live or scripted runs."""

    def __init__(self, fh: TextIO, config: EngineConfig, story_id: str) -> None:
        self._fh = fh
        self._header_written = False
        self._config = config
        self._story_id = story_id

    def record(self, session: Session) -> None:
        """Write the latest event/snapshot pair (header first if needed).

        Called once per accepted event; the start event resolves policy
        and seed overrides, so the header is written from the session's
        post-start configuration.
        """
        if not self._header_written:
            self._fh.write(encode_line(trace_header(session.config, self._story_id)) + "\n")
            self._header_written = True
        self._fh.write(encode_line(session.events[-1]) + "\n")
        self._fh.write(encode_line(session.snapshots[-1]) + "\n")


@dataclass(frozen=True)
class Divergence:
    seq: int
    field: str
    recorded: object
    replayed: object


@dataclass(frozen=True)
class ReplayReport:
    ok: bool
    events: int
    divergence: Divergence | None
    regenerated: list[str]

    def describe(self) -> str:
        if self.ok:
            return f"replay ok: {self.events} events, no divergence"
        d = self.divergence
        assert d is not None
        return (
            f"replay diverged at seq {d.seq} field {d.field!r}: "
            f"recorded {d.recorded!r}, replayed {d.replayed!r}"
        )


def _first_field_difference(recorded: dict, replayed: dict) -> tuple[str, object, object] | None:
    for key in sorted(set(recorded) | set(replayed)):
        if recorded.get(key) != replayed.get(key):
            return key, recorded.get(key), replayed.get(key)
    return None


def replay_trace(
    lines: Iterable[str],
    story_loader: Callable[[str], StoryGraph],
) -> ReplayReport:
    """Re-run the events of a recorded trace and diff the snapshots.

    The report carries the regenerated trace lines so callers can also
    check byte-level equality with the original file.
    """
    it = iter(line for line in (raw.strip() for raw in lines) if line)
    try:
        header = decode_line(next(it))
    except StopIteration:
        raise ProtocolError("bad_trace", "trace is empty") from None
    if header.get("type") != "trace_header":
        raise ProtocolError("bad_trace", "first trace line must be the header")
    if header.get("schema") != TRACE_SCHEMA_VERSION:
        raise ProtocolError("bad_trace", f"unsupported trace schema {header.get('schema')!r}")

    config = EngineConfig.from_dict(header["config"])
    story = story_loader(header["story"])
    session = Session(story, config)

    events = 0
    divergence: Divergence | None = None
    for event_line in it:
        try:
            snapshot_line = next(it)
        except StopIteration:
            raise ProtocolError("bad_trace", "trace ends with an event missing its snapshot") from None
        event = decode_line(event_line)
        recorded = decode_line(snapshot_line)
        if recorded.get("type") != "snapshot":
            raise ProtocolError("bad_trace", f"expected snapshot line, got {recorded.get('type')!r}")
        session.apply_wire(event)
        events += 1
        replayed = {**session.snapshots[-1], "v": 1}
        diff = _first_field_difference(recorded, replayed)
        if diff is not None:
            field, rec, rep = diff
            divergence = Divergence(seq=int(event.get("seq", events - 1)), field=field, recorded=rec, replayed=rep)
            break

    regenerated = session_trace_lines(session)
    return ReplayReport(ok=divergence is None, events=events, divergence=divergence, regenerated=regenerated)

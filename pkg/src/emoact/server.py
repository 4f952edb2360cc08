"""Socket service wrapping sessions for interactive clients.

Each WebSocket frame is one protocol line. A connection starts a fresh
session with start_session (the server answers session_started carrying
the assigned id) or reattaches to an existing one with resume, which
replays every server message the session has produced so far so the
client can rebuild its view after a disconnect. Sessions live in the
server registry and survive their connection.

Bad input never kills the connection: protocol violations come back as
error messages and the session stays exactly as it was.
"""

from __future__ import annotations

import asyncio
import uuid
from typing import Callable

import websockets
from websockets.asyncio.server import ServerConnection, serve

from .config import EngineConfig, policy_name
from .protocol import (
    ProtocolError,
    Resume,
    StartSession,
    decode_line,
    encode_line,
    error_msg,
    parse_client,
    session_started_msg,
)
from .session import Session
from .story import StoryError, load_story


class _SessionRecord:
    def __init__(self, session_id: str, session: Session) -> None:
        self.session_id = session_id
        self.session = session
        self.backlog: list[str] = []


class StoryServer:
    """Session registry plus the per-connection protocol loop."""

    def __init__(
        self,
        config: EngineConfig,
        story_loader: Callable[[str], object] = load_story,
    ) -> None:
        self.config = config
        self._story_loader = story_loader
        self._sessions: dict[str, _SessionRecord] = {}

    # -- protocol handling ---------------------------------------------------

    async def handle(self, ws: ServerConnection) -> None:
        record: _SessionRecord | None = None
        try:
            async for raw in ws:
                if isinstance(raw, bytes):
                    raw = raw.decode("utf-8", errors="replace")
                try:
                    record = await self._handle_line(ws, raw, record)
                except ProtocolError as exc:
                    await ws.send(encode_line(error_msg(exc.code, exc.message)))
        except websockets.ConnectionClosed:
            pass

    async def _handle_line(
        self, ws: ServerConnection, raw: str, record: _SessionRecord | None
    ) -> _SessionRecord | None:
        data = decode_line(raw)
        msg = parse_client(data)

        if isinstance(msg, StartSession):
            new_record = self._create_session(msg)
            # Apply before announcing so session_started reports the
            # policy and seed actually in effect.
            outputs = new_record.session.apply(msg)
            await ws.send(encode_line(self._started_msg(new_record)))
            await self._send_outputs(ws, new_record, outputs)
            return new_record

        if isinstance(msg, Resume):
            existing = self._sessions.get(msg.session_id)
            if existing is None:
                raise ProtocolError("unknown_session", f"no session {msg.session_id!r}")
            await ws.send(encode_line(self._started_msg(existing)))
            for line in existing.backlog:
                await ws.send(line)
            return existing

        if record is None:
            raise ProtocolError("not_started", "start or resume a session first")
        outputs = record.session.apply_wire(data)
        await self._send_outputs(ws, record, outputs)
        return record

    # -- session management ----------------------------------------------------

    def _create_session(self, msg: StartSession) -> _SessionRecord:
        try:
            story = self._story_loader(msg.story)
        except FileNotFoundError:
            raise ProtocolError("story_not_found", f"story not found: {msg.story}") from None
        except StoryError as exc:
            raise ProtocolError("bad_story", str(exc)) from exc
        session = Session(story, self.config)
        session_id = uuid.uuid4().hex[:12]
        record = _SessionRecord(session_id, session)
        self._sessions[session_id] = record
        return record

    def _started_msg(self, record: _SessionRecord) -> dict:
        session = record.session
        return session_started_msg(
            session_id=record.session_id,
            story=session.story.id,
            title=session.story.title,
            policy=policy_name(session.config.policy),
            seed=session.config.seed,
        )

    async def _send_outputs(self, ws: ServerConnection, record: _SessionRecord, outputs: list[dict]) -> None:
        for out in outputs:
            line = encode_line(out)
            record.backlog.append(line)
            await ws.send(line)


async def run_server(
    config: EngineConfig, host: str = "127.0.0.1", port: int = 8765
) -> None:
    """Serve until cancelled. Binds the port before announcing it."""
    server = StoryServer(config)
    async with serve(server.handle, host, port) as ws_server:
        bound = ws_server.sockets[0].getsockname()
        print(f"listening on ws://{bound[0]}:{bound[1]}", flush=True)
        await asyncio.get_running_loop().create_future()

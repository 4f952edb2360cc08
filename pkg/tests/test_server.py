import asyncio
import json

import pytest
from websockets.asyncio.client import connect
from websockets.asyncio.server import serve

from emoact.config import EngineConfig
from emoact.server import StoryServer


def run(coro):
    return asyncio.run(asyncio.wait_for(coro, timeout=20))


async def with_server(fn):
    story_server = StoryServer(EngineConfig())
    async with serve(story_server.handle, "127.0.0.1", 0) as server:
        port = server.sockets[0].getsockname()[1]
        return await fn(f"ws://127.0.0.1:{port}")


def send(ws, record):
    return ws.send(json.dumps({"v": 1, **record}))


async def recv(ws):
    return json.loads(await ws.recv())


async def collect_event(ws, sink):
    # One event's outputs end with its state_update.
    while True:
        msg = await recv(ws)
        sink.append(msg)
        if msg["type"] == "state_update":
            return


def test_start_session_announces_resolved_settings():
    async def scenario(url):
        async with connect(url) as ws:
            await send(ws, {"type": "start_session", "story": "wizard", "policy": "low", "seed": 6})
            startup = await recv(ws)
            assert startup["type"] == "session_started"
            assert startup["story"] == "wizard"
            assert startup["title"] == "The Moonpetal Errand"
            assert startup["policy"] == "low"
            assert startup["seed"] == 6
            assert startup["session_id"]
            burst = []
            await collect_event(ws, burst)
            assert burst[0]["type"] == "narration"
            assert any(m["type"] == "decision_request" for m in burst)

    run(with_server(scenario))


def test_unknown_story_yields_error_not_disconnect():
    async def scenario(url):
        async with connect(url) as ws:
            await send(ws, {"type": "start_session", "story": "atlantis"})
            reply = await recv(ws)
            assert reply["type"] == "error"
            assert reply["code"] == "story_not_found"
            # The connection is still usable.
            await send(ws, {"type": "start_session", "story": "detective"})
            startup = await recv(ws)
            assert startup["type"] == "session_started"

    run(with_server(scenario))


def test_events_without_session_rejected():
    async def scenario(url):
        async with connect(url) as ws:
            await send(ws, {"type": "tick", "t": 5})
            reply = await recv(ws)
            assert reply["type"] == "error"
            assert reply["code"] == "not_started"

    run(with_server(scenario))


def test_malformed_json_yields_error():
    async def scenario(url):
        async with connect(url) as ws:
            await ws.send("{broken")
            reply = await recv(ws)
            assert reply["type"] == "error"
            assert reply["code"] == "bad_json"

    run(with_server(scenario))


def test_bad_choice_leaves_session_playable():
    async def scenario(url):
        async with connect(url) as ws:
            await send(ws, {"type": "start_session", "story": "detective", "policy": "low"})
            burst = [await recv(ws)]
            await collect_event(ws, burst)
            await send(ws, {"type": "choice", "option": "swim"})
            err = await recv(ws)
            assert err["type"] == "error"
            assert err["code"] == "unknown_option"
            await send(ws, {"type": "choice", "option": "go"})
            event = []
            await collect_event(ws, event)
            assert any(m["type"] == "expression_cue" for m in event)

    run(with_server(scenario))


def test_resume_replays_the_whole_stream():
    async def scenario(url):
        async with connect(url) as ws:
            await send(ws, {"type": "start_session", "story": "detective", "policy": "high", "seed": 2})
            startup = await recv(ws)
            session_id = startup["session_id"]
            seen = []
            await collect_event(ws, seen)
            await send(ws, {"type": "choice", "option": "shortcut", "t": 3000})
            await collect_event(ws, seen)
            await send(ws, {"type": "tick", "t": 8000})
            await collect_event(ws, seen)

        async with connect(url) as ws2:
            await send(ws2, {"type": "resume", "session_id": session_id})
            startup2 = await recv(ws2)
            assert startup2["type"] == "session_started"
            assert startup2["session_id"] == session_id
            assert startup2["policy"] == "high"
            replayed = []
            for _ in seen:
                replayed.append(await recv(ws2))
            assert replayed == seen
            # And the resumed connection can keep playing.
            await send(ws2, {"type": "choice", "option": "let", "t": 9000})
            event = []
            await collect_event(ws2, event)
            assert any(m["type"] == "decision_request" for m in event)

    run(with_server(scenario))


def test_resume_unknown_session_errors():
    async def scenario(url):
        async with connect(url) as ws:
            await send(ws, {"type": "resume", "session_id": "missing"})
            reply = await recv(ws)
            assert reply["type"] == "error"
            assert reply["code"] == "unknown_session"

    run(with_server(scenario))


def test_two_sessions_are_independent():
    async def scenario(url):
        async with connect(url) as a, connect(url) as b:
            await send(a, {"type": "start_session", "story": "detective", "policy": "low"})
            await send(b, {"type": "start_session", "story": "wizard", "policy": "low"})
            a_start, b_start = await recv(a), await recv(b)
            assert a_start["session_id"] != b_start["session_id"]
            a_msgs, b_msgs = [], []
            await collect_event(a, a_msgs)
            await collect_event(b, b_msgs)
            await send(a, {"type": "choice", "option": "shortcut"})
            a_event = []
            await collect_event(a, a_event)
            # B's story is untouched by A's choice.
            await send(b, {"type": "choice", "option": "go"})
            b_event = []
            await collect_event(b, b_event)
            a_state = a_event[-1]
            b_state = b_event[-1]
            assert a_state["label"] == "Sadness"
            assert b_state["label"] == "Happiness"

    run(with_server(scenario))

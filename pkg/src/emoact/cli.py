"""Command line front end.

Subcommands:

  run       play a story; scripted, piped or interactive
  replay    re-run a recorded trace and report any divergence
  validate  check a story's structure and emotional coverage
  export    write the built-in config or a packaged story to JSON
  serve     run the socket service for live clients

Exit codes: 0 success, 1 failure, 2 when the requested story does not
exist. The run input (script file or piped stdin) uses the same one-line
JSON records as the socket protocol.
"""

from __future__ import annotations

import argparse
import asyncio
import json
import sys
from pathlib import Path

from .config import ConfigError, EngineConfig, load_config, policy_from_name, policy_name
from .protocol import ProtocolError, StartSession, decode_line, parse_client
from .session import TRACE_EXTENSION, Session, TraceWriter, replay_trace
from .story import StoryError, load_story, packaged_story_ids, path_label, simulate_path


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="emoact",
        description="Synthetic-emotion engine for branching stories.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    run_p = sub.add_parser("run", help="play a story on the terminal")
    run_p.add_argument("--story", default="detective", help="packaged story id or JSON path")
    run_p.add_argument("--script", type=Path, help="NDJSON file of protocol events to apply")
    run_p.add_argument("--config", type=Path, help="engine config JSON")
    run_p.add_argument("--seed", type=int, help="animation RNG seed override")
    run_p.add_argument("--policy", choices=["low", "high"], help="display policy override")
    run_p.add_argument("--out", type=Path, help=f"write a {TRACE_EXTENSION} trace here")

    replay_p = sub.add_parser("replay", help="re-run a recorded trace")
    replay_p.add_argument("trace", type=Path, help=f"a {TRACE_EXTENSION} file")
    replay_p.add_argument("--story", help="load the story from this path instead of by id")

    validate_p = sub.add_parser("validate", help="check a story file")
    validate_p.add_argument("--story", required=True, help="packaged story id or JSON path")
    validate_p.add_argument("--config", type=Path, help="engine config JSON")

    export_p = sub.add_parser("export", help="write built-in data for customization")
    export_p.add_argument("what", choices=["config", "story"], help="what to export")
    export_p.add_argument("--story", help="packaged story id (for 'story')")
    export_p.add_argument("--out", type=Path, help="output path (default stdout)")

    serve_p = sub.add_parser("serve", help="run the socket service")
    serve_p.add_argument("--host", default="127.0.0.1")
    serve_p.add_argument("--port", type=int, default=8765)
    serve_p.add_argument("--config", type=Path, help="engine config JSON")
    serve_p.add_argument("--seed", type=int, help="default animation RNG seed")
    serve_p.add_argument("--policy", choices=["low", "high"], help="default display policy")

    return parser


def _resolve_config(args: argparse.Namespace) -> EngineConfig:
    config = load_config(getattr(args, "config", None))
    if getattr(args, "policy", None):
        config = config.replace(policy=policy_from_name(args.policy))
    if getattr(args, "seed", None) is not None:
        config = config.replace(seed=args.seed)
    return config


class _Renderer:
    """Human-readable view of the server message stream."""

    def __init__(self, out) -> None:
        self._out = out
        self._last_label: str | None = None

    def show(self, outputs: list[dict]) -> None:
        for msg in outputs:
            kind = msg["type"]
            if kind == "narration":
                print(msg["sentence"], file=self._out)
            elif kind == "decision_request":
                if msg.get("prompt"):
                    print(f"?? {msg['prompt']}", file=self._out)
                for opt in msg["options"]:
                    print(f"   [{opt['id']}] {opt['text']}", file=self._out)
            elif kind == "expression_cue":
                anim = f" anim={msg['animation']}" if msg.get("animation") else ""
                print(
                    f"[cue] {msg['trigger']} {msg['label']} eyes={msg['eye_color']}{anim}",
                    file=self._out,
                )
            elif kind == "state_update":
                if msg["label"] != self._last_label:
                    self._last_label = msg["label"]
                    sim = msg.get("similarity")
                    detail = f" ({sim:.3f})" if isinstance(sim, float) else ""
                    print(f"[feeling] {msg['label']}{detail}", file=self._out)
                if msg.get("done"):
                    print("[the end]", file=self._out)


def cmd_run(args: argparse.Namespace) -> int:
    try:
        config = _resolve_config(args)
        story = load_story(args.story)
    except FileNotFoundError as exc:
        print(f"{exc} (packaged: {', '.join(packaged_story_ids())})", file=sys.stderr)
        return 2
    except (ConfigError, StoryError) as exc:
        print(exc, file=sys.stderr)
        return 1
    if args.script is not None and not args.script.is_file():
        print(f"script not found: {args.script}", file=sys.stderr)
        return 1

    session = Session(story, config)
    renderer = _Renderer(sys.stdout)
    trace_fh = None
    writer = None
    if args.out is not None:
        trace_fh = open(args.out, "w", encoding="utf-8", newline="\n")
        writer = TraceWriter(trace_fh, config, story.id)

    def step(data_or_msg) -> list[dict]:
        if isinstance(data_or_msg, dict):
            outputs = session.apply_wire(data_or_msg)
        else:
            outputs = session.apply(data_or_msg)
        if writer is not None:
            writer.record(session)
        renderer.show(outputs)
        return outputs

    try:
        step(StartSession(story=story.id, policy=policy_name(config.policy), seed=config.seed))
        if args.script is not None:
            with open(args.script, "r", encoding="utf-8") as fh:
                for raw in fh:
                    raw = raw.strip()
                    if not raw:
                        continue
                    data = decode_line(raw)
                    if data["type"] == "start_session":
                        raise ProtocolError(
                            "bad_message", "scripts cannot start sessions; pass --story instead"
                        )
                    step(data)
        elif sys.stdin.isatty():
            _interactive_loop(session, step)
        else:
            for raw in sys.stdin:
                raw = raw.strip()
                if not raw:
                    continue
                data = decode_line(raw)
                if data["type"] == "start_session":
                    raise ProtocolError(
                        "bad_message", "scripts cannot start sessions; pass --story instead"
                    )
                step(data)
    except FileNotFoundError as exc:
        print(exc, file=sys.stderr)
        return 2
    except ProtocolError as exc:
        print(f"protocol error [{exc.code}]: {exc.message}", file=sys.stderr)
        return 1
    finally:
        if trace_fh is not None:
            trace_fh.close()
    return 0


def _interactive_loop(session: Session, step) -> None:
    from .protocol import Choice
    from .story import NodeKind

    while not session.done:
        node = session.story.nodes[session.cursor]
        if node.kind is not NodeKind.DECISION:
            break
        option_ids = [opt.id for opt in node.options]
        try:
            answer = input(f"choose [{'/'.join(option_ids)}]> ").strip()
        except EOFError:
            break
        if not answer:
            continue
        try:
            step(Choice(option=answer))
        except ProtocolError as exc:
            print(f"({exc.message})", file=sys.stderr)


def cmd_replay(args: argparse.Namespace) -> int:
    trace_path: Path = args.trace
    if not trace_path.is_file():
        print(f"trace not found: {trace_path}", file=sys.stderr)
        return 1

    def loader(story_id: str):
        return load_story(args.story if args.story else story_id)

    original = trace_path.read_text(encoding="utf-8")
    try:
        report = replay_trace(original.splitlines(), loader)
    except FileNotFoundError as exc:
        print(exc, file=sys.stderr)
        return 2
    except (ProtocolError, StoryError, ConfigError) as exc:
        print(f"cannot replay: {exc}", file=sys.stderr)
        return 1

    print(report.describe())
    if not report.ok:
        return 1
    regenerated = "".join(line + "\n" for line in report.regenerated)
    if regenerated == original:
        print("trace bytes identical")
        return 0
    print("replayed state matches but trace bytes differ", file=sys.stderr)
    return 1


def cmd_validate(args: argparse.Namespace) -> int:
    try:
        config = _resolve_config(args)
        story = load_story(args.story)
    except FileNotFoundError as exc:
        print(exc, file=sys.stderr)
        return 2
    except ConfigError as exc:
        print(exc, file=sys.stderr)
        return 1
    except StoryError as exc:
        print(f"invalid story: {exc}", file=sys.stderr)
        return 1

    paths = story.complete_paths()
    print(f"story {story.id}: {story.title}")
    print(f"{len(story.nodes)} nodes, {len(paths)} complete paths")
    for path in paths:
        print(f"path {path_label(path)}:")
        for row in simulate_path(
            story, path, config.identity, config.gains, config.activity_coupling, config.catalog
        ):
            where = row.node_id + (f"/{row.option_id}" if row.option_id else "")
            sim = f" ({row.similarity:.3f})" if row.similarity is not None else ""
            print(f"  {where}: expected {row.expected.value}, plays {row.computed.value}{sim}")

    from .story import coverage_problems

    problems = coverage_problems(
        story, config.identity, config.gains, config.activity_coupling, config.catalog
    )
    if problems:
        for problem in problems:
            print(problem, file=sys.stderr)
        return 1
    print("ok: coverage guarantees hold on all paths")
    return 0


def cmd_export(args: argparse.Namespace) -> int:
    if args.what == "config":
        payload = json.dumps(EngineConfig().to_dict(), indent=2, sort_keys=True) + "\n"
    else:
        story_id = args.story or "detective"
        try:
            story = load_story(story_id)
        except FileNotFoundError as exc:
            print(exc, file=sys.stderr)
            return 2
        # Re-emit from the parsed graph so exports are always loadable.
        nodes: dict = {}
        for node_id, node in story.nodes.items():
            raw: dict = {"kind": node.kind.value, "narration": list(node.narration)}
            if node.next is not None:
                raw["next"] = node.next
            if node.prompt is not None:
                raw["prompt"] = node.prompt
            if node.options:
                raw["options"] = [opt.to_dict() for opt in node.options]
            if node.signs is not None and node.expected_emotion is not None:
                raw["signs"] = list(node.signs)
                raw["expected_emotion"] = node.expected_emotion.value
            nodes[node_id] = raw
        payload = json.dumps(
            {"v": 1, "id": story.id, "title": story.title, "start": story.start, "nodes": nodes},
            indent=2,
        ) + "\n"

    if args.out is not None:
        args.out.write_text(payload, encoding="utf-8")
    else:
        sys.stdout.write(payload)
    return 0


def cmd_serve(args: argparse.Namespace) -> int:
    from .server import run_server

    try:
        config = _resolve_config(args)
    except ConfigError as exc:
        print(exc, file=sys.stderr)
        return 1
    try:
        asyncio.run(run_server(config, host=args.host, port=args.port))
    except KeyboardInterrupt:
        pass
    return 0


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    handlers = {
        "run": cmd_run,
        "replay": cmd_replay,
        "validate": cmd_validate,
        "export": cmd_export,
        "serve": cmd_serve,
    }
    return handlers[args.command](args)


if __name__ == "__main__":
    sys.exit(main())

"""Branching story graphs and the checks that keep them honest.

A story is a directed acyclic graph of nodes: linear beats that just
narrate (optionally carrying a forced emotional turn as sign
annotations), decision points offering exactly two options, and terminal
endings. Options and forced beats are annotated with per-dimension signs
(-1/0/+1) describing how the choice should move the agent's impression,
plus the emotion label the author expects that move to produce.

Beyond structural validation (dangling references, cycles, option
arity), this module can enumerate every complete path and simulate the
impression/emotion pipeline along it, so authored annotations can be
checked against what the math actually yields.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from enum import Enum
from importlib import resources
from pathlib import Path

from .emotion import DEFAULT_ACTIVITY_COUPLING, generate_emotion
from .epa import DEFAULT_CATALOG, EmotionCatalog, EmotionLabel, EpaVector, label_emotion
from .impression import DEFAULT_GAINS, ImpressionGains, apply_choice, initial_state

STORY_SCHEMA_VERSION = 1
REQUIRED_DECISIONS_PER_PATH = 4
OPTIONS_PER_DECISION = 2


class StoryError(ValueError):
    """The story file is structurally unusable."""


class NodeKind(str, Enum):
    LINEAR = "linear"
    DECISION = "decision"
    TERMINAL = "terminal"


Signs = tuple[int, int, int]


def _parse_signs(raw: object, where: str) -> Signs:
    if not isinstance(raw, (list, tuple)) or len(raw) != 3:
        raise StoryError(f"{where}: signs must be three values, got {raw!r}")
    out = []
    for v in raw:
        if v not in (-1, 0, 1):
            raise StoryError(f"{where}: signs entries must be -1, 0 or +1, got {v!r}")
        out.append(int(v))
    return (out[0], out[1], out[2])


def _parse_label(raw: object, where: str) -> EmotionLabel:
    try:
        label = EmotionLabel(raw)
    except ValueError:
        raise StoryError(f"{where}: unknown expected_emotion {raw!r}") from None
    if label is EmotionLabel.NEUTRAL:
        raise StoryError(f"{where}: expected_emotion must be a catalog label, not Neutral")
    return label


@dataclass(frozen=True)
class StoryOption:
    id: str
    text: str
    signs: Signs
    expected_emotion: EmotionLabel
    next: str

    def to_dict(self) -> dict:
        return {
            "id": self.id,
            "text": self.text,
            "signs": list(self.signs),
            "expected_emotion": self.expected_emotion.value,
            "next": self.next,
        }


@dataclass(frozen=True)
class StoryNode:
    id: str
    kind: NodeKind
    narration: tuple[str, ...]
    next: str | None = None
    prompt: str | None = None
    options: tuple[StoryOption, ...] = ()
    signs: Signs | None = None
    expected_emotion: EmotionLabel | None = None


@dataclass(frozen=True)
class PathStep:
    """One traversal step: the node visited and, at a decision, which
    option id was taken to leave it."""

    node_id: str
    option_id: str | None = None


@dataclass(frozen=True)
class StoryGraph:
    id: str
    title: str
    start: str
    nodes: dict[str, StoryNode]

    @classmethod
    def from_dict(cls, data: dict) -> "StoryGraph":
        if not isinstance(data, dict):
            raise StoryError("story file must be a JSON object")
        if data.get("v") != STORY_SCHEMA_VERSION:
            raise StoryError(f"unsupported story schema version {data.get('v')!r}")
        for field in ("id", "title", "start", "nodes"):
            if field not in data:
                raise StoryError(f"story is missing required field {field!r}")
        raw_nodes = data["nodes"]
        if not isinstance(raw_nodes, dict) or not raw_nodes:
            raise StoryError("story nodes must be a non-empty object")
        nodes: dict[str, StoryNode] = {}
        for node_id, raw in raw_nodes.items():
            nodes[node_id] = cls._parse_node(node_id, raw)
        graph = cls(
            id=str(data["id"]),
            title=str(data["title"]),
            start=str(data["start"]),
            nodes=nodes,
        )
        graph.validate()
        return graph

    @staticmethod
    def _parse_node(node_id: str, raw: object) -> StoryNode:
        where = f"node {node_id!r}"
        if not isinstance(raw, dict):
            raise StoryError(f"{where}: must be an object")
        try:
            kind = NodeKind(raw.get("kind"))
        except ValueError:
            raise StoryError(f"{where}: unknown kind {raw.get('kind')!r}") from None
        narration_raw = raw.get("narration", [])
        if not isinstance(narration_raw, list) or any(
            not isinstance(s, str) or not s.strip() for s in narration_raw
        ):
            raise StoryError(f"{where}: narration must be a list of non-empty strings")
        narration = tuple(narration_raw)

        signs: Signs | None = None
        expected: EmotionLabel | None = None
        if "signs" in raw or "expected_emotion" in raw:
            if kind is not NodeKind.LINEAR:
                raise StoryError(f"{where}: only linear nodes may carry forced signs")
            if "signs" not in raw or "expected_emotion" not in raw:
                raise StoryError(f"{where}: forced beats need both signs and expected_emotion")
            signs = _parse_signs(raw["signs"], where)
            expected = _parse_label(raw["expected_emotion"], where)

        if kind is NodeKind.TERMINAL:
            if "next" in raw or "options" in raw:
                raise StoryError(f"{where}: terminal nodes cannot continue anywhere")
            return StoryNode(id=node_id, kind=kind, narration=narration)

        if kind is NodeKind.LINEAR:
            nxt = raw.get("next")
            if not isinstance(nxt, str):
                raise StoryError(f"{where}: linear nodes need a next node id")
            if "options" in raw:
                raise StoryError(f"{where}: linear nodes cannot have options")
            return StoryNode(
                id=node_id, kind=kind, narration=narration, next=nxt,
                signs=signs, expected_emotion=expected,
            )

        # Decision node.
        if "next" in raw:
            raise StoryError(f"{where}: decision nodes continue via their options, not next")
        raw_options = raw.get("options")
        if not isinstance(raw_options, list):
            raise StoryError(f"{where}: decision nodes need an options list")
        if len(raw_options) != OPTIONS_PER_DECISION:
            raise StoryError(
                f"{where}: option-arity violation, expected {OPTIONS_PER_DECISION} options, found {len(raw_options)}"
            )
        options = []
        seen_ids: set[str] = set()
        for raw_opt in raw_options:
            if not isinstance(raw_opt, dict):
                raise StoryError(f"{where}: options must be objects")
            for field in ("id", "text", "signs", "expected_emotion", "next"):
                if field not in raw_opt:
                    raise StoryError(f"{where}: option is missing {field!r}")
            opt_id = str(raw_opt["id"])
            if opt_id in seen_ids:
                raise StoryError(f"{where}: duplicate option id {opt_id!r}")
            seen_ids.add(opt_id)
            opt_where = f"{where} option {opt_id!r}"
            options.append(
                StoryOption(
                    id=opt_id,
                    text=str(raw_opt["text"]),
                    signs=_parse_signs(raw_opt["signs"], opt_where),
                    expected_emotion=_parse_label(raw_opt["expected_emotion"], opt_where),
                    next=str(raw_opt["next"]),
                )
            )
        prompt = raw.get("prompt")
        if prompt is not None and not isinstance(prompt, str):
            raise StoryError(f"{where}: prompt must be a string")
        return StoryNode(
            id=node_id, kind=kind, narration=narration,
            prompt=prompt, options=tuple(options),
        )

    @classmethod
    def load(cls, path: str | Path) -> "StoryGraph":
        with open(path, "r", encoding="utf-8") as fh:
            return cls.from_dict(json.load(fh))

    def node(self, node_id: str) -> StoryNode:
        return self.nodes[node_id]

    def option(self, node_id: str, option_id: str) -> StoryOption:
        node = self.nodes[node_id]
        for opt in node.options:
            if opt.id == option_id:
                return opt
        raise KeyError(f"node {node_id!r} has no option {option_id!r}")

    def _successors(self, node: StoryNode) -> list[str]:
        if node.kind is NodeKind.TERMINAL:
            return []
        if node.kind is NodeKind.LINEAR:
            assert node.next is not None
            return [node.next]
        return [opt.next for opt in node.options]

    def validate(self) -> None:
        """Raise StoryError on any structural problem."""
        if self.start not in self.nodes:
            raise StoryError(f"start node {self.start!r} does not exist")
        for node in self.nodes.values():
            for succ in self._successors(node):
                if succ not in self.nodes:
                    raise StoryError(f"node {node.id!r} points at missing node {succ!r}")

        # Cycle check: iterative DFS with white/grey/black coloring.
        WHITE, GREY, BLACK = 0, 1, 2
        color = {node_id: WHITE for node_id in self.nodes}
        stack: list[tuple[str, int]] = [(self.start, 0)]
        color[self.start] = GREY
        while stack:
            node_id, idx = stack[-1]
            succs = self._successors(self.nodes[node_id])
            if idx < len(succs):
                stack[-1] = (node_id, idx + 1)
                nxt = succs[idx]
                if color[nxt] == GREY:
                    raise StoryError(f"cycle detected through node {nxt!r}")
                if color[nxt] == WHITE:
                    color[nxt] = GREY
                    stack.append((nxt, 0))
            else:
                color[node_id] = BLACK
                stack.pop()

        unreachable = sorted(n for n, c in color.items() if c == WHITE)
        if unreachable:
            raise StoryError(f"unreachable nodes: {', '.join(unreachable)}")
        if not any(n.kind is NodeKind.TERMINAL for n in self.nodes.values()):
            raise StoryError("story has no terminal node")

        for path in self.complete_paths():
            decisions = sum(1 for step in path if step.option_id is not None)
            if decisions != REQUIRED_DECISIONS_PER_PATH:
                raise StoryError(
                    f"path {path_label(path)!r} has {decisions} decisions, "
                    f"expected {REQUIRED_DECISIONS_PER_PATH}"
                )

    def complete_paths(self) -> list[list[PathStep]]:
        """Every start-to-terminal traversal, in option order."""
        paths: list[list[PathStep]] = []

        def walk(node_id: str, acc: list[PathStep]) -> None:
            node = self.nodes[node_id]
            if node.kind is NodeKind.TERMINAL:
                paths.append(acc + [PathStep(node_id)])
                return
            if node.kind is NodeKind.LINEAR:
                assert node.next is not None
                walk(node.next, acc + [PathStep(node_id)])
                return
            for opt in node.options:
                walk(opt.next, acc + [PathStep(node_id, opt.id)])

        walk(self.start, [])
        return paths


def path_label(path: list[PathStep]) -> str:
    """Compact human-readable path id: the chosen option ids joined."""
    return ">".join(step.option_id for step in path if step.option_id is not None)


def packaged_story_ids() -> list[str]:
    """Ids of the stories shipped inside the package."""
    root = resources.files("emoact") / "stories"
    return sorted(p.name[: -len(".json")] for p in root.iterdir() if p.name.endswith(".json"))


def load_story(ref: str | Path) -> StoryGraph:
    """Load a story by packaged id or by file path.

    A ref that exists on disk is read as a file; anything else is looked
    up among the packaged stories. Raises FileNotFoundError when neither
    works, StoryError when the content is bad.
    """
    path = Path(ref)
    if path.is_file():
        return StoryGraph.load(path)
    candidate = resources.files("emoact") / "stories" / f"{ref}.json"
    if candidate.is_file():
        return StoryGraph.from_dict(json.loads(candidate.read_text(encoding="utf-8")))
    raise FileNotFoundError(f"story not found: {ref}")


@dataclass(frozen=True)
class AnnotationCheck:
    """One annotated beat on a simulated path, with what the math said."""

    node_id: str
    option_id: str | None
    expected: EmotionLabel
    computed: EmotionLabel
    similarity: float | None

    @property
    def ok(self) -> bool:
        return self.expected is self.computed


def simulate_path(
    graph: StoryGraph,
    path: list[PathStep],
    identity: EpaVector,
    gains: ImpressionGains = DEFAULT_GAINS,
    activity_coupling: float = DEFAULT_ACTIVITY_COUPLING,
    catalog: EmotionCatalog = DEFAULT_CATALOG,
) -> list[AnnotationCheck]:
    """Run the impression/emotion pipeline along one path.

    Only choice updates are applied (no live perception), so the result
    is the story's intrinsic emotional arc. Returns a check row for every
    annotated beat in path order.
    """
    state = initial_state(identity)
    rows: list[AnnotationCheck] = []

    def apply_and_check(signs: Signs, expected: EmotionLabel, node_id: str, option_id: str | None):
        nonlocal state
        state = apply_choice(state, signs, gains)
        emotion = generate_emotion(identity, state.impression, activity_coupling)
        computed, sim = label_emotion(emotion, catalog)
        rows.append(AnnotationCheck(node_id, option_id, expected, computed, sim))

    for step in path:
        node = graph.nodes[step.node_id]
        if node.kind is NodeKind.DECISION:
            assert step.option_id is not None
            opt = graph.option(node.id, step.option_id)
            apply_and_check(opt.signs, opt.expected_emotion, node.id, opt.id)
        elif node.signs is not None:
            assert node.expected_emotion is not None
            apply_and_check(node.signs, node.expected_emotion, node.id, None)
    return rows


def coverage_problems(
    graph: StoryGraph,
    identity: EpaVector,
    gains: ImpressionGains = DEFAULT_GAINS,
    activity_coupling: float = DEFAULT_ACTIVITY_COUPLING,
    catalog: EmotionCatalog = DEFAULT_CATALOG,
) -> list[str]:
    """Emotional-coverage problems, as human-readable messages.

    Checks, in order: anger and fear annotated on every complete path;
    all four catalog labels annotated somewhere; every option's signs,
    applied alone from the identity start, producing the annotated
    label. Annotations are not re-checked in mid-path context: the same
    option lands differently depending on the impression it meets, which
    is the model working as intended, and simulate_path exists to show
    exactly how each path actually plays. Forced beats are checked in
    path context, though, since the author controls every state that can
    reach them. An empty list means the story keeps all its promises.
    """
    problems: list[str] = []
    paths = graph.complete_paths()

    seen_labels: set[EmotionLabel] = set()
    for path in paths:
        labels_on_path: set[EmotionLabel] = set()
        for step in path:
            node = graph.nodes[step.node_id]
            if step.option_id is not None:
                labels_on_path.add(graph.option(node.id, step.option_id).expected_emotion)
            elif node.expected_emotion is not None:
                labels_on_path.add(node.expected_emotion)
        seen_labels |= labels_on_path
        for needed in (EmotionLabel.ANGER, EmotionLabel.FEAR):
            if needed not in labels_on_path:
                problems.append(f"{needed.value.lower()} unreachable on path {path_label(path)}")

    for label in (EmotionLabel.ANGER, EmotionLabel.FEAR, EmotionLabel.HAPPINESS, EmotionLabel.SADNESS):
        if label not in seen_labels:
            problems.append(f"{label.value.lower()} never appears as expected_emotion")

    for node in graph.nodes.values():
        for opt in node.options:
            state = apply_choice(initial_state(identity), opt.signs, gains)
            emotion = generate_emotion(identity, state.impression, activity_coupling)
            computed, _ = label_emotion(emotion, catalog)
            if computed is not opt.expected_emotion:
                problems.append(
                    f"node {node.id} option {opt.id}: signs {list(opt.signs)} produce "
                    f"{computed.value} from the start state, annotated {opt.expected_emotion.value}"
                )

    for path in paths:
        for row in simulate_path(graph, path, identity, gains, activity_coupling, catalog):
            if row.option_id is None and not row.ok:
                problems.append(
                    f"path {path_label(path)}: forced beat {row.node_id} annotated "
                    f"{row.expected.value} but plays as {row.computed.value}"
                )
    return problems

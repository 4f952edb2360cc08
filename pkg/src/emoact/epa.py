"""EPA-space primitives shared by the whole engine.

Everything affective in this package lives in a three-dimensional space:
Evaluation (good/bad), Potency (powerful/powerless) and Activity
(active/quiet), each axis spanning -4 to +4.  This module owns the vector
type, clamping, cosine similarity and the nearest-prototype emotion
labeler with its built-in catalog of reference vectors.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

EPA_MIN = -4.0
EPA_MAX = 4.0

# Accept a prototype match at exactly the threshold; boundary is inclusive
# so a reference vector scaled onto the threshold still labels itself.
DEFAULT_SIMILARITY_THRESHOLD = 0.6


class EpaDomainError(ValueError):
    """A value left the domain the affect pipeline can represent."""


class EmotionLabel(str, Enum):
    ANGER = "Anger"
    FEAR = "Fear"
    HAPPINESS = "Happiness"
    SADNESS = "Sadness"
    NEUTRAL = "Neutral"


@dataclass(frozen=True)
class EpaVector:
    """A point in EPA space. Components must be finite; range is enforced
    by clamp_epa at pipeline boundaries, not by the type itself."""

    e: float
    p: float
    a: float

    def __post_init__(self) -> None:
        for name in ("e", "p", "a"):
            v = getattr(self, name)
            if not isinstance(v, (int, float)) or isinstance(v, bool) or not math.isfinite(v):
                raise EpaDomainError(f"non-finite EPA component {name}={v!r}")
            object.__setattr__(self, name, float(v))

    def as_tuple(self) -> tuple[float, float, float]:
        return (self.e, self.p, self.a)

    def as_dict(self) -> dict[str, float]:
        return {"e": self.e, "p": self.p, "a": self.a}

    def magnitude(self) -> float:
        return math.sqrt(self.e * self.e + self.p * self.p + self.a * self.a)

    def add(self, de: float = 0.0, dp: float = 0.0, da: float = 0.0) -> "EpaVector":
        return EpaVector(self.e + de, self.p + dp, self.a + da)

    @classmethod
    def from_dict(cls, data: dict) -> "EpaVector":
        return cls(float(data["e"]), float(data["p"]), float(data["a"]))


ZERO = EpaVector(0.0, 0.0, 0.0)


def clamp_epa(v: EpaVector) -> EpaVector:
    """Clip each component to [-4, +4]. Idempotent."""
    return EpaVector(
        min(max(v.e, EPA_MIN), EPA_MAX),
        min(max(v.p, EPA_MIN), EPA_MAX),
        min(max(v.a, EPA_MIN), EPA_MAX),
    )


def cosine_similarity(u: EpaVector, v: EpaVector) -> float | None:
    """dot(u,v) / (|u||v|), or None when either magnitude is zero.

    None means "similarity undefined"; callers treat it as no-match.
    """
    mu = u.magnitude()
    mv = v.magnitude()
    if mu == 0.0 or mv == 0.0:
        return None
    dot = u.e * v.e + u.p * v.p + u.a * v.a
    return dot / (mu * mv)


@dataclass(frozen=True)
class EmotionCatalog:
    """The four labeled prototypes and the acceptance threshold.

    Entry order is fixed (Anger, Fear, Happiness, Sadness) and doubles as
    the deterministic tie-break order for the labeler.
    """

    entries: tuple[tuple[EmotionLabel, EpaVector], ...]
    threshold: float = DEFAULT_SIMILARITY_THRESHOLD

    _ORDER = (EmotionLabel.ANGER, EmotionLabel.FEAR, EmotionLabel.HAPPINESS, EmotionLabel.SADNESS)

    def __post_init__(self) -> None:
        labels = tuple(label for label, _ in self.entries)
        if labels != self._ORDER:
            raise ValueError(f"catalog entries must be exactly {[l.value for l in self._ORDER]} in order, got {[l.value for l in labels]}")
        for label, ref in self.entries:
            if ref.magnitude() == 0.0:
                raise ValueError(f"catalog reference for {label.value} is the zero vector")
        if not (0.0 < self.threshold <= 1.0):
            raise ValueError(f"threshold must be in (0, 1], got {self.threshold}")

    def to_dict(self) -> dict:
        return {
            "threshold": self.threshold,
            "entries": [
                {"label": label.value, **ref.as_dict()} for label, ref in self.entries
            ],
        }

    @classmethod
    def from_dict(cls, data: dict) -> "EmotionCatalog":
        entries = tuple(
            (EmotionLabel(item["label"]), EpaVector(item["e"], item["p"], item["a"]))
            for item in data["entries"]
        )
        return cls(entries=entries, threshold=float(data.get("threshold", DEFAULT_SIMILARITY_THRESHOLD)))


DEFAULT_CATALOG = EmotionCatalog(
    entries=(
        (EmotionLabel.ANGER, EpaVector(1.95, 1.34, 1.78)),
        (EmotionLabel.FEAR, EpaVector(-2.04, -0.94, -0.70)),
        (EmotionLabel.HAPPINESS, EpaVector(3.54, 2.53, 1.28)),
        (EmotionLabel.SADNESS, EpaVector(-2.52, -2.29, -2.21)),
    ),
)


def label_emotion(
    emotion: EpaVector, catalog: EmotionCatalog = DEFAULT_CATALOG
) -> tuple[EmotionLabel, float | None]:
    """Map an EPA emotion vector to the closest catalog label.

    Returns the label with the highest cosine similarity when that maximum
    reaches the catalog threshold, else (Neutral, None). A zero emotion
    vector has no direction, so it is Neutral as well. Ties keep the
    earliest catalog entry.
    """
    best_label: EmotionLabel | None = None
    best_sim: float | None = None
    for label, ref in catalog.entries:
        sim = cosine_similarity(emotion, ref)
        if sim is None:
            return (EmotionLabel.NEUTRAL, None)
        if best_sim is None or sim > best_sim:
            best_label, best_sim = label, sim
    assert best_label is not None and best_sim is not None
    if best_sim < catalog.threshold:
        return (EmotionLabel.NEUTRAL, None)
    return (best_label, best_sim)

"""Synthetic-emotion engine for branching stories.

The pipeline: interaction signals and story choices move a transient
impression of the agent through EPA space; the gap between that
impression and the agent's fixed identity yields an emotion vector; the
vector is labeled against a small catalog and rendered as eye-color and
animation cues under a display policy. Sessions are event-sourced and
replayable, and a socket service exposes them to live clients.
"""

from .config import EngineConfig, load_config
from .emotion import confirmation_baseline, generate_emotion, generate_emotion_raw
from .epa import (
    DEFAULT_CATALOG,
    EmotionCatalog,
    EmotionLabel,
    EpaVector,
    clamp_epa,
    cosine_similarity,
    label_emotion,
)
from .expression import CueTrigger, DisplayPolicy, ExpressionCue, ExpressionSelector
from .impression import (
    ImpressionGains,
    ImpressionState,
    apply_choice,
    apply_gaze,
    apply_proximity,
    apply_user_emotion,
    initial_state,
)
from .session import Session, replay_trace
from .story import StoryGraph, load_story

__version__ = "0.1.0"

__all__ = [
    "DEFAULT_CATALOG",
    "CueTrigger",
    "DisplayPolicy",
    "EmotionCatalog",
    "EmotionLabel",
    "EngineConfig",
    "EpaVector",
    "ExpressionCue",
    "ExpressionSelector",
    "ImpressionGains",
    "ImpressionState",
    "Session",
    "StoryGraph",
    "apply_choice",
    "apply_gaze",
    "apply_proximity",
    "apply_user_emotion",
    "clamp_epa",
    "confirmation_baseline",
    "cosine_similarity",
    "generate_emotion",
    "generate_emotion_raw",
    "initial_state",
    "label_emotion",
    "load_config",
    "load_story",
    "replay_trace",
]

"""Expression cue selection: eye colors, body animations, display policy.

A labeled emotion becomes visible through two channels. The eye color is
a pure lookup and always rides along with a cue. Animations are rationed:
the selector draws uniformly from the label's animation set (never
repeating the immediately preceding animation id, across labels), and in
high-frequency mode a 30 second cooldown downgrades would-be animations
to color-only cues so the avatar does not thrash. Low-frequency mode
only ever cues on a story choice and always animates there. Neutral is
displayable as a color but never animates in either mode.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from enum import Enum

from .epa import EmotionLabel

ANIMATION_COOLDOWN_MS = 30_000


class DisplayPolicy(str, Enum):
    LOW_FREQUENCY = "LowFrequency"
    HIGH_FREQUENCY = "HighFrequency"


class CueTrigger(str, Enum):
    SENTENCE_SPOKEN = "SentenceSpoken"
    CHOICE_MADE = "ChoiceMade"


DEFAULT_EYE_COLORS: dict[EmotionLabel, str] = {
    EmotionLabel.ANGER: "Red",
    EmotionLabel.FEAR: "Black",
    EmotionLabel.HAPPINESS: "Green",
    EmotionLabel.SADNESS: "DarkBlue",
    EmotionLabel.NEUTRAL: "White",
}

DEFAULT_ANIMATIONS: dict[EmotionLabel, tuple[str, ...]] = {
    EmotionLabel.ANGER: ("Anger2", "Anger4"),
    EmotionLabel.FEAR: ("Fear1", "Fear2"),
    EmotionLabel.HAPPINESS: ("Happy1", "Happy2"),
    EmotionLabel.SADNESS: ("Sad1", "Sad2"),
}


@dataclass(frozen=True)
class ExpressionCue:
    """One visible avatar update. animation is None for color-only cues."""

    trigger: CueTrigger
    label: EmotionLabel
    eye_color: str
    animation: str | None

    def to_dict(self) -> dict:
        return {
            "trigger": self.trigger.value,
            "label": self.label.value,
            "eye_color": self.eye_color,
            "animation": self.animation,
        }


def validate_expression_tables(
    eye_colors: dict[EmotionLabel, str], animations: dict[EmotionLabel, tuple[str, ...]]
) -> None:
    for label in EmotionLabel:
        if label not in eye_colors:
            raise ValueError(f"no eye color configured for {label.value}")
    for label in EmotionLabel:
        if label is EmotionLabel.NEUTRAL:
            continue
        ids = animations.get(label, ())
        if not ids:
            raise ValueError(f"no animations configured for {label.value}")
        if len(set(ids)) != len(ids):
            raise ValueError(f"duplicate animation ids for {label.value}: {ids}")


class ExpressionSelector:
    """Stateful cue picker.

    Owns the animation RNG stream, the global last-animation memory and
    the cooldown clock. Timestamps are logical milliseconds supplied by
    the caller; the selector never reads a wall clock.
    """

    def __init__(
        self,
        policy: DisplayPolicy,
        rng: random.Random,
        eye_colors: dict[EmotionLabel, str] | None = None,
        animations: dict[EmotionLabel, tuple[str, ...]] | None = None,
        cooldown_ms: int = ANIMATION_COOLDOWN_MS,
    ) -> None:
        self.policy = policy
        self._rng = rng
        self._eye_colors = dict(eye_colors or DEFAULT_EYE_COLORS)
        self._animations = dict(animations or DEFAULT_ANIMATIONS)
        validate_expression_tables(self._eye_colors, self._animations)
        self._cooldown_ms = int(cooldown_ms)
        self._last_animation: str | None = None
        self._last_animation_t: int | None = None

    def select(self, label: EmotionLabel, trigger: CueTrigger, now_ms: int) -> ExpressionCue | None:
        """Decide what, if anything, the avatar shows for this trigger."""
        if self.policy is DisplayPolicy.LOW_FREQUENCY:
            if trigger is not CueTrigger.CHOICE_MADE:
                return None
            return self._cue(label, trigger, now_ms, allow_animation=True)
        # High frequency cues on every trigger; the cooldown only gates
        # the animation channel, never the color channel.
        in_cooldown = (
            self._last_animation_t is not None
            and now_ms - self._last_animation_t < self._cooldown_ms
        )
        return self._cue(label, trigger, now_ms, allow_animation=not in_cooldown)

    def _cue(
        self, label: EmotionLabel, trigger: CueTrigger, now_ms: int, allow_animation: bool
    ) -> ExpressionCue:
        animation: str | None = None
        if allow_animation and label is not EmotionLabel.NEUTRAL:
            animation = self._draw_animation(label)
            self._last_animation = animation
            self._last_animation_t = now_ms
        return ExpressionCue(
            trigger=trigger,
            label=label,
            eye_color=self._eye_colors[label],
            animation=animation,
        )

    def _draw_animation(self, label: EmotionLabel) -> str:
        options = self._animations[label]
        candidates = [a for a in options if a != self._last_animation]
        if not candidates:
            candidates = list(options)
        return self._rng.choice(candidates)

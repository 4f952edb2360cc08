"""Transient impression state and the rules that move it.

The agent keeps a running impression of itself in EPA space. Interaction
signals nudge it: the user's displayed emotion shifts Evaluation
(attribution flips sign when the user is looking away), gaze shifts
Potency, approach/retreat shifts Evaluation and Activity together, and a
story choice pulls each dimension in the direction of that option's sign
annotation. Every rule clamps back into [-4, +4]; history beyond the
last observation is deliberately not kept.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

from .epa import EpaVector, clamp_epa


@dataclass(frozen=True)
class ImpressionGains:
    """Tuning constants for the impression update rules."""

    k_valence: float = 0.5
    gaze_attrib_on: float = 1.0
    gaze_attrib_off: float = -0.5
    k_gaze_potency: float = 0.1
    k_proximity: float = 0.3
    choice_step: float = 0.5
    choice_base: float = 1.0

    def to_dict(self) -> dict[str, float]:
        return {
            "k_valence": self.k_valence,
            "gaze_attrib_on": self.gaze_attrib_on,
            "gaze_attrib_off": self.gaze_attrib_off,
            "k_gaze_potency": self.k_gaze_potency,
            "k_proximity": self.k_proximity,
            "choice_step": self.choice_step,
            "choice_base": self.choice_base,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "ImpressionGains":
        known = {f: float(data[f]) for f in cls.__dataclass_fields__ if f in data}
        return cls(**known)


DEFAULT_GAINS = ImpressionGains()


@dataclass(frozen=True)
class ImpressionState:
    """Current impression plus the minimal perception memory the rules need."""

    impression: EpaVector
    last_valence: float | None = None
    last_distance_m: float | None = None
    gaze_on_agent: bool | None = None

    def to_dict(self) -> dict:
        return {
            "impression": self.impression.as_dict(),
            "last_valence": self.last_valence,
            "last_distance_m": self.last_distance_m,
            "gaze_on_agent": self.gaze_on_agent,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "ImpressionState":
        return cls(
            impression=EpaVector.from_dict(data["impression"]),
            last_valence=data.get("last_valence"),
            last_distance_m=data.get("last_distance_m"),
            gaze_on_agent=data.get("gaze_on_agent"),
        )


def initial_state(identity: EpaVector) -> ImpressionState:
    """A fresh session starts with the impression confirming the identity."""
    return ImpressionState(impression=identity)


def apply_user_emotion(
    state: ImpressionState, valence: float, gains: ImpressionGains = DEFAULT_GAINS
) -> ImpressionState:
    """Shift Evaluation by the change in the user's displayed valence.

    The shift is attributed to the agent at full weight while the user is
    looking at it (or gaze is unknown), and at the negative off-gaze
    weight otherwise: a user who brightens while looking away reads as
    bad news for the agent. The first valence reading sets the baseline
    without moving anything.
    """
    if state.last_valence is None:
        return replace(state, last_valence=float(valence))
    delta = float(valence) - state.last_valence
    attrib = gains.gaze_attrib_on if state.gaze_on_agent in (True, None) else gains.gaze_attrib_off
    imp = clamp_epa(state.impression.add(de=gains.k_valence * delta * attrib))
    return replace(state, impression=imp, last_valence=float(valence))


def apply_gaze(
    state: ImpressionState, on_agent: bool, gains: ImpressionGains = DEFAULT_GAINS
) -> ImpressionState:
    """Being looked at raises Potency a little; being ignored lowers it."""
    dp = gains.k_gaze_potency if on_agent else -gains.k_gaze_potency
    imp = clamp_epa(state.impression.add(dp=dp))
    return replace(state, impression=imp, gaze_on_agent=bool(on_agent))


def apply_proximity(
    state: ImpressionState, distance_m: float, gains: ImpressionGains = DEFAULT_GAINS
) -> ImpressionState:
    """Approach (distance shrinking) lifts Evaluation and Activity together;
    retreat lowers both. The first reading only sets the baseline."""
    if state.last_distance_m is None:
        return replace(state, last_distance_m=float(distance_m))
    closing = state.last_distance_m - float(distance_m)
    shift = gains.k_proximity * closing
    imp = clamp_epa(state.impression.add(de=shift, da=shift))
    return replace(state, impression=imp, last_distance_m=float(distance_m))


def apply_choice(
    state: ImpressionState,
    signs: tuple[int, int, int],
    gains: ImpressionGains = DEFAULT_GAINS,
) -> ImpressionState:
    """Pull the impression toward a choice's per-dimension signs.

    Per dimension: sign 0 leaves it alone; if the current value already
    agrees in sign (zero counts as agreeing) it steps further the same
    way; a disagreeing value snaps to the signed base level.
    """
    values = list(state.impression.as_tuple())
    for i, s in enumerate(signs):
        if s == 0:
            continue
        if s not in (-1, 1):
            raise ValueError(f"choice sign must be -1, 0 or +1, got {s!r}")
        cur = values[i]
        if cur == 0.0 or (cur > 0.0) == (s > 0):
            values[i] = cur + s * gains.choice_step
        else:
            values[i] = s * gains.choice_base
    imp = clamp_epa(EpaVector(*values))
    return replace(state, impression=imp)

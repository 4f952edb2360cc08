"""Emotion generation from identity/impression discrepancy.

The characteristic emotion is a deterministic, stateless function of the
fixed identity and the current impression:

    emotion.E = (impression.E - identity.E + 1) + (impression.A - identity.A) * delta
    emotion.P = (impression.P - identity.P) - (impression.A - identity.A)
    emotion.A =  impression.A + identity.A

with every component clamped to [-4, +4] afterwards. When the impression
exactly confirms the identity this reduces to (1, 0, 2 * identity.A): a
mildly positive, calm baseline whose energy scales with how lively the
identity itself is. The raw (pre-clamp) form is exposed separately so
analytical checks can work with the unclipped algebra.
"""

from __future__ import annotations

from .epa import EpaVector, clamp_epa

DEFAULT_ACTIVITY_COUPLING = 0.5


def generate_emotion_raw(
    identity: EpaVector,
    impression: EpaVector,
    activity_coupling: float = DEFAULT_ACTIVITY_COUPLING,
) -> EpaVector:
    """The emotion equations without range clipping."""
    diff_a = impression.a - identity.a
    return EpaVector(
        (impression.e - identity.e + 1.0) + diff_a * activity_coupling,
        (impression.p - identity.p) - diff_a,
        impression.a + identity.a,
    )


def generate_emotion(
    identity: EpaVector,
    impression: EpaVector,
    activity_coupling: float = DEFAULT_ACTIVITY_COUPLING,
) -> EpaVector:
    """The emotion equations, clamped into displayable EPA range."""
    return clamp_epa(generate_emotion_raw(identity, impression, activity_coupling))


def confirmation_baseline(identity: EpaVector) -> EpaVector:
    """Closed form of generate_emotion_raw(identity, identity)."""
    return EpaVector(1.0, 0.0, 2.0 * identity.a)

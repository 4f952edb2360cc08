import random

import pytest

from emoact.epa import EmotionLabel
from emoact.expression import (
    ANIMATION_COOLDOWN_MS,
    DEFAULT_ANIMATIONS,
    DEFAULT_EYE_COLORS,
    CueTrigger,
    DisplayPolicy,
    ExpressionSelector,
    validate_expression_tables,
)


def make_selector(policy, seed=0, **kwargs):
    return ExpressionSelector(policy=policy, rng=random.Random(seed), **kwargs)


def test_eye_color_table_matches_the_ledger():
    assert DEFAULT_EYE_COLORS[EmotionLabel.ANGER] == "Red"
    assert DEFAULT_EYE_COLORS[EmotionLabel.FEAR] == "Black"
    assert DEFAULT_EYE_COLORS[EmotionLabel.HAPPINESS] == "Green"
    assert DEFAULT_EYE_COLORS[EmotionLabel.SADNESS] == "DarkBlue"
    assert DEFAULT_EYE_COLORS[EmotionLabel.NEUTRAL] == "White"


def test_every_label_has_two_animations_except_neutral():
    for label, ids in DEFAULT_ANIMATIONS.items():
        assert label is not EmotionLabel.NEUTRAL
        assert len(ids) == 2
    assert EmotionLabel.NEUTRAL not in DEFAULT_ANIMATIONS


def test_table_validation_catches_missing_color():
    colors = dict(DEFAULT_EYE_COLORS)
    colors.pop(EmotionLabel.SADNESS)
    with pytest.raises(ValueError):
        validate_expression_tables(colors, DEFAULT_ANIMATIONS)


def test_table_validation_catches_missing_animations():
    animations = dict(DEFAULT_ANIMATIONS)
    animations[EmotionLabel.FEAR] = ()
    with pytest.raises(ValueError):
        validate_expression_tables(DEFAULT_EYE_COLORS, animations)


def test_low_frequency_ignores_sentence_triggers():
    sel = make_selector(DisplayPolicy.LOW_FREQUENCY)
    assert sel.select(EmotionLabel.HAPPINESS, CueTrigger.SENTENCE_SPOKEN, 0) is None
    assert sel.select(EmotionLabel.ANGER, CueTrigger.SENTENCE_SPOKEN, 99999) is None


def test_low_frequency_always_animates_choices():
    sel = make_selector(DisplayPolicy.LOW_FREQUENCY)
    # Back-to-back choices, far inside any cooldown window.
    for t in (0, 10, 20):
        cue = sel.select(EmotionLabel.HAPPINESS, CueTrigger.CHOICE_MADE, t)
        assert cue is not None
        assert cue.animation in DEFAULT_ANIMATIONS[EmotionLabel.HAPPINESS]
        assert cue.eye_color == "Green"


def test_high_frequency_cues_every_trigger():
    sel = make_selector(DisplayPolicy.HIGH_FREQUENCY)
    first = sel.select(EmotionLabel.FEAR, CueTrigger.SENTENCE_SPOKEN, 0)
    assert first is not None and first.animation is not None
    second = sel.select(EmotionLabel.FEAR, CueTrigger.SENTENCE_SPOKEN, 1000)
    assert second is not None
    assert second.animation is None
    assert second.eye_color == "Black"


def test_high_frequency_cooldown_boundary_is_inclusive():
    sel = make_selector(DisplayPolicy.HIGH_FREQUENCY)
    assert sel.select(EmotionLabel.ANGER, CueTrigger.SENTENCE_SPOKEN, 0).animation is not None
    at_edge = sel.select(EmotionLabel.ANGER, CueTrigger.SENTENCE_SPOKEN, ANIMATION_COOLDOWN_MS - 1)
    assert at_edge.animation is None
    past_edge = sel.select(EmotionLabel.ANGER, CueTrigger.SENTENCE_SPOKEN, ANIMATION_COOLDOWN_MS)
    assert past_edge.animation is not None


def test_cooldown_clock_only_moves_when_an_animation_plays():
    sel = make_selector(DisplayPolicy.HIGH_FREQUENCY)
    sel.select(EmotionLabel.ANGER, CueTrigger.SENTENCE_SPOKEN, 0)
    # Color-only cues inside the window must not push the window forward.
    for t in (10_000, 20_000, 29_999):
        assert sel.select(EmotionLabel.ANGER, CueTrigger.SENTENCE_SPOKEN, t).animation is None
    assert sel.select(EmotionLabel.ANGER, CueTrigger.SENTENCE_SPOKEN, 30_000).animation is not None


def test_choice_cues_respect_cooldown_in_high_frequency():
    sel = make_selector(DisplayPolicy.HIGH_FREQUENCY)
    assert sel.select(EmotionLabel.SADNESS, CueTrigger.CHOICE_MADE, 0).animation is not None
    assert sel.select(EmotionLabel.SADNESS, CueTrigger.CHOICE_MADE, 500).animation is None


def test_neutral_never_animates():
    for policy in (DisplayPolicy.LOW_FREQUENCY, DisplayPolicy.HIGH_FREQUENCY):
        sel = make_selector(policy)
        cue = sel.select(EmotionLabel.NEUTRAL, CueTrigger.CHOICE_MADE, 0)
        assert cue is not None
        assert cue.animation is None
        assert cue.eye_color == "White"
        if policy is DisplayPolicy.HIGH_FREQUENCY:
            later = sel.select(EmotionLabel.NEUTRAL, CueTrigger.SENTENCE_SPOKEN, 100_000)
            assert later.animation is None


def test_no_immediate_animation_repeat_within_a_label():
    sel = make_selector(DisplayPolicy.LOW_FREQUENCY, seed=4)
    last = None
    for i in range(50):
        cue = sel.select(EmotionLabel.ANGER, CueTrigger.CHOICE_MADE, i)
        assert cue.animation != last
        last = cue.animation


def test_no_immediate_repeat_is_global_across_labels():
    # Custom tables where two labels share an animation id.
    animations = dict(DEFAULT_ANIMATIONS)
    animations[EmotionLabel.ANGER] = ("Shared", "AngerOnly")
    animations[EmotionLabel.FEAR] = ("Shared", "FearOnly")
    sel = make_selector(DisplayPolicy.LOW_FREQUENCY, seed=1, animations=animations)
    seen_fear = set()
    for i in range(40):
        anger = sel.select(EmotionLabel.ANGER, CueTrigger.CHOICE_MADE, 2 * i)
        fear = sel.select(EmotionLabel.FEAR, CueTrigger.CHOICE_MADE, 2 * i + 1)
        assert fear.animation != anger.animation
        seen_fear.add(fear.animation)
    assert "Shared" in seen_fear or seen_fear == {"FearOnly"}


def test_single_animation_label_falls_back_to_repeat():
    animations = dict(DEFAULT_ANIMATIONS)
    animations[EmotionLabel.FEAR] = ("OnlyOne",)
    sel = make_selector(DisplayPolicy.LOW_FREQUENCY, animations=animations)
    a = sel.select(EmotionLabel.FEAR, CueTrigger.CHOICE_MADE, 0)
    b = sel.select(EmotionLabel.FEAR, CueTrigger.CHOICE_MADE, 1)
    assert a.animation == b.animation == "OnlyOne"


def test_same_seed_same_draws():
    def draws(seed):
        sel = make_selector(DisplayPolicy.LOW_FREQUENCY, seed=seed)
        return [
            sel.select(EmotionLabel.HAPPINESS, CueTrigger.CHOICE_MADE, i).animation
            for i in range(30)
        ]

    assert draws(42) == draws(42)


def test_custom_cooldown_window():
    sel = make_selector(DisplayPolicy.HIGH_FREQUENCY, cooldown_ms=100)
    assert sel.select(EmotionLabel.ANGER, CueTrigger.SENTENCE_SPOKEN, 0).animation is not None
    assert sel.select(EmotionLabel.ANGER, CueTrigger.SENTENCE_SPOKEN, 50).animation is None
    assert sel.select(EmotionLabel.ANGER, CueTrigger.SENTENCE_SPOKEN, 100).animation is not None

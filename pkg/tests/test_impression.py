import random

import pytest

from emoact.epa import EpaVector
from emoact.impression import (
    DEFAULT_GAINS,
    ImpressionGains,
    ImpressionState,
    apply_choice,
    apply_gaze,
    apply_proximity,
    apply_user_emotion,
    initial_state,
)

IDENTITY = EpaVector(1.5, 1.5, 1.0)


def test_initial_state_confirms_identity():
    state = initial_state(IDENTITY)
    assert state.impression == IDENTITY
    assert state.last_valence is None
    assert state.last_distance_m is None
    assert state.gaze_on_agent is None


def test_default_gains_values():
    g = DEFAULT_GAINS
    assert (g.k_valence, g.gaze_attrib_on, g.gaze_attrib_off) == (0.5, 1.0, -0.5)
    assert (g.k_gaze_potency, g.k_proximity) == (0.1, 0.3)
    assert (g.choice_step, g.choice_base) == (0.5, 1.0)


def test_first_valence_reading_only_sets_baseline():
    state = apply_user_emotion(initial_state(IDENTITY), 0.8)
    assert state.impression == IDENTITY
    assert state.last_valence == 0.8


def test_valence_rise_while_looking_lifts_evaluation():
    state = initial_state(IDENTITY)
    state = apply_gaze(state, True)
    state = apply_user_emotion(state, 0.0)
    state = apply_user_emotion(state, 0.6)
    # potency moved by the gaze, evaluation by k_valence * delta * attrib_on
    assert state.impression.e == pytest.approx(1.5 + 0.5 * 0.6 * 1.0)
    assert state.impression.a == 1.0


def test_valence_rise_while_looking_away_reads_negative():
    state = initial_state(IDENTITY)
    state = apply_gaze(state, False)
    state = apply_user_emotion(state, 0.0)
    state = apply_user_emotion(state, 0.6)
    assert state.impression.e == pytest.approx(1.5 + 0.5 * 0.6 * -0.5)


def test_unknown_gaze_attributes_at_full_weight():
    state = initial_state(IDENTITY)
    state = apply_user_emotion(state, -0.5)
    state = apply_user_emotion(state, 0.5)
    assert state.gaze_on_agent is None
    assert state.impression.e == pytest.approx(1.5 + 0.5 * 1.0 * 1.0)


def test_gaze_shifts_potency_both_ways():
    on = apply_gaze(initial_state(IDENTITY), True)
    assert on.impression.p == pytest.approx(1.6)
    assert on.gaze_on_agent is True
    off = apply_gaze(on, False)
    assert off.impression.p == pytest.approx(1.5)
    assert off.gaze_on_agent is False


def test_first_distance_reading_only_sets_baseline():
    state = apply_proximity(initial_state(IDENTITY), 2.0)
    assert state.impression == IDENTITY
    assert state.last_distance_m == 2.0


def test_approach_lifts_evaluation_and_activity_together():
    state = apply_proximity(initial_state(IDENTITY), 2.0)
    state = apply_proximity(state, 1.0)
    # closed by 1 m: both shift by k_proximity * 1
    assert state.impression.e == pytest.approx(1.8)
    assert state.impression.a == pytest.approx(1.3)
    assert state.impression.p == 1.5


def test_retreat_lowers_evaluation_and_activity():
    state = apply_proximity(initial_state(IDENTITY), 1.0)
    state = apply_proximity(state, 3.0)
    assert state.impression.e == pytest.approx(1.5 - 0.6)
    assert state.impression.a == pytest.approx(1.0 - 0.6)


def test_choice_zero_sign_leaves_dimension_alone():
    state = apply_choice(initial_state(IDENTITY), (0, 0, 0))
    assert state.impression == IDENTITY


def test_choice_matching_sign_steps_further():
    state = apply_choice(initial_state(IDENTITY), (1, 1, 1))
    assert state.impression.as_tuple() == (2.0, 2.0, 1.5)


def test_choice_opposing_sign_snaps_to_base():
    state = apply_choice(initial_state(IDENTITY), (-1, -1, -1))
    assert state.impression.as_tuple() == (-1.0, -1.0, -1.0)


def test_choice_zero_value_counts_as_agreeing():
    zeroed = ImpressionState(impression=EpaVector(0.0, 0.0, 0.0))
    up = apply_choice(zeroed, (1, 0, -1))
    assert up.impression.as_tuple() == (0.5, 0.0, -0.5)


def test_choice_rejects_bad_sign():
    with pytest.raises(ValueError):
        apply_choice(initial_state(IDENTITY), (2, 0, 0))


def test_choice_clamps_at_range_edge():
    state = ImpressionState(impression=EpaVector(3.8, -3.8, 0.0))
    state = apply_choice(state, (1, -1, 0))
    assert state.impression.as_tuple() == (4.0, -4.0, 0.0)


def test_updates_never_leave_range():
    rng = random.Random(5)
    state = initial_state(IDENTITY)
    for _ in range(500):
        roll = rng.randrange(4)
        if roll == 0:
            state = apply_user_emotion(state, rng.uniform(-1, 1))
        elif roll == 1:
            state = apply_gaze(state, rng.random() < 0.5)
        elif roll == 2:
            state = apply_proximity(state, rng.uniform(0, 5))
        else:
            signs = (rng.choice((-1, 0, 1)), rng.choice((-1, 0, 1)), rng.choice((-1, 0, 1)))
            state = apply_choice(state, signs)
        assert all(-4.0 <= c <= 4.0 for c in state.impression.as_tuple())


def test_custom_gains_scale_the_rules():
    gains = ImpressionGains(k_gaze_potency=1.0)
    state = apply_gaze(initial_state(IDENTITY), True, gains)
    assert state.impression.p == pytest.approx(2.5)


def test_gains_round_trip_through_dict():
    gains = ImpressionGains(k_valence=0.7, choice_base=2.0)
    assert ImpressionGains.from_dict(gains.to_dict()) == gains


def test_state_round_trips_through_dict():
    state = ImpressionState(
        impression=EpaVector(0.5, -1.0, 2.0),
        last_valence=0.3,
        last_distance_m=1.2,
        gaze_on_agent=False,
    )
    assert ImpressionState.from_dict(state.to_dict()) == state

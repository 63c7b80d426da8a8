"""Urn models: step laws, exact drift/noise closed forms, reductions, serialization.

Closed forms are checked against ``cond_moments_oracle``, which computes the
same conditional moments by direct enumeration of the outcome distribution
and shares no code with the formulas under test.
"""

import json
import random
from fractions import Fraction

import pytest

from polyurn.ratpoly import RatPoly
from polyurn.urns import (
    ONE_DRAW,
    TWO_DRAW,
    WITH_REPLACEMENT,
    WITHOUT_REPLACEMENT,
    AttainableInterval,
    OneDrawMatrix,
    TwoDrawMatrix,
    UrnModel,
    UrnState,
    attainable_interval,
    bias_bound,
    black_count_diverges_at_one,
    cond_iv_closed_form_one,
    cond_iv_closed_form_two,
    cond_iv_polys,
    cond_iv_remainders,
    cond_moments_oracle,
    degenerate_case_id,
    degenerate_identity_gap,
    degenerate_map_back,
    degenerate_reduce,
    drift_for,
    drift_one,
    drift_one_degenerate,
    drift_two,
    error_for,
    error_one,
    error_two,
    load_model,
    mean_noise_residual_two,
    model_from_dict,
    model_meta,
    model_to_dict,
    one_draw_model,
    step_distribution,
    two_draw_model,
    white_count_diverges_at_zero,
)

F = Fraction


def P(*coeffs):
    return RatPoly([F(c) for c in coeffs])


def random_entry(rng):
    return F(rng.randint(0, 9), rng.randint(1, 3))


def random_one_matrix(rng):
    return OneDrawMatrix.from_entries([random_entry(rng) for _ in range(4)])


def random_two_matrix(rng):
    return TwoDrawMatrix.from_entries([random_entry(rng) for _ in range(6)])


def random_state(rng):
    return UrnState(F(rng.randint(4, 60), rng.randint(1, 2)),
                    F(rng.randint(4, 60), rng.randint(1, 2)), 0)


# ---------------------------------------------------------------------------
# Matrices and models
# ---------------------------------------------------------------------------

def test_matrix_entry_validation():
    with pytest.raises(ValueError):
        OneDrawMatrix.from_entries([1, -1, 0, 0])
    with pytest.raises(ValueError):
        TwoDrawMatrix.from_entries([1, 2, 3])
    with pytest.raises(ValueError):
        OneDrawMatrix.from_entries([1, 2, 3])


def test_row_sums():
    assert TwoDrawMatrix.from_entries([15, 3, 4, 1, 3, 21]).row_sums == (18, 5, 24)
    assert OneDrawMatrix.from_entries([3, 2, 2, 3]).row_sums == (5, 5)


def test_color_swap_involution():
    m = TwoDrawMatrix.from_entries([15, 3, 4, 1, 3, 21])
    assert m.color_swap().entries == (21, 3, 1, 4, 3, 15)
    assert m.color_swap().color_swap() == m
    one = OneDrawMatrix.from_entries([3, 2, 0, 1])
    assert one.color_swap().entries == (1, 0, 2, 3)


def test_one_draw_forces_with_replacement():
    model = one_draw_model([1, 0, 0, 1], 1, 1)
    assert model.sampling == WITH_REPLACEMENT


def test_model_start_validation():
    with pytest.raises(ValueError):
        one_draw_model([1, 0, 0, 1], -1, 1)
    with pytest.raises(ValueError):
        one_draw_model([1, 0, 0, 1], 0, 0)  # empty urn cannot be drawn from
    two_draw_model([1, 1, 1, 1, 1, 1], 2, 2).validate_for_simulation()
    with pytest.raises(ValueError):
        two_draw_model([1, 1, 1, 1, 1, 1], 1, 5).validate_for_simulation()


# ---------------------------------------------------------------------------
# Step distributions
# ---------------------------------------------------------------------------

def test_single_draw_distribution():
    model = one_draw_model([3, 2, 2, 3], 1, 1)
    outcomes = step_distribution(UrnState(F(1), F(2), 0), model)
    assert [(o.probability, o.add_white, o.add_black) for o in outcomes] == [
        (F(1, 3), F(3), F(2)),
        (F(2, 3), F(2), F(3)),
    ]


def test_pair_draw_without_replacement_distribution():
    model = two_draw_model([15, 3, 4, 1, 3, 21], 2, 2)
    outcomes = step_distribution(UrnState(F(2), F(3), 0), model)
    assert [o.probability for o in outcomes] == [F(1, 10), F(3, 5), F(3, 10)]
    assert [(o.add_white, o.add_black) for o in outcomes] == [
        (F(15), F(3)),
        (F(4), F(1)),
        (F(3), F(21)),
    ]


def test_pair_draw_with_replacement_distribution():
    model = two_draw_model([15, 3, 4, 1, 3, 21], 2, 2, sampling=WITH_REPLACEMENT)
    outcomes = step_distribution(UrnState(F(2), F(3), 0), model)
    assert [o.probability for o in outcomes] == [F(4, 25), F(12, 25), F(9, 25)]


def test_probabilities_sum_to_one_randomly():
    rng = random.Random(11)
    for _ in range(60):
        state = random_state(rng)
        for model in (
            UrnModel(ONE_DRAW, random_one_matrix(rng), F(1), F(1), WITH_REPLACEMENT),
            UrnModel(TWO_DRAW, random_two_matrix(rng), F(2), F(2), WITHOUT_REPLACEMENT),
            UrnModel(TWO_DRAW, random_two_matrix(rng), F(2), F(2), WITH_REPLACEMENT),
        ):
            outcomes = step_distribution(state, model)
            assert sum(o.probability for o in outcomes) == 1
            assert all(o.probability >= 0 for o in outcomes)


def test_fractional_pair_draw_below_one_rejected():
    model = two_draw_model([1, 1, 1, 1, 1, 1], 2, 2)
    with pytest.raises(ValueError):
        step_distribution(UrnState(F(1, 2), F(5), 0), model)


def test_pair_draw_needs_two_balls():
    model = two_draw_model([1, 1, 1, 1, 1, 1], 2, 2)
    with pytest.raises(ValueError):
        step_distribution(UrnState(F(1), F(0), 0), model)


# ---------------------------------------------------------------------------
# Drift
# ---------------------------------------------------------------------------

def test_drift_one_coefficients():
    # add-white row (a, b), add-black row (c, d):
    # constant c, linear a - 2c - d, quadratic c + d - a - b
    assert drift_one(OneDrawMatrix.from_entries([2, 0, 0, 1])) == P(0, 1, -1)
    assert drift_one(OneDrawMatrix.from_entries([1, 0, 0, 1])) == P(0)
    assert drift_one(OneDrawMatrix.from_entries([1, 1, 1, 1])) == P(1, -2)


def test_drift_two_fixture():
    assert drift_two(TwoDrawMatrix.from_entries([9, 1, 2, 3, 1, 7])) == P(1, -6, 12, -8)


def test_drift_matches_oracle_mean():
    rng = random.Random(13)
    for _ in range(80):
        state = random_state(rng)
        z = state.proportion_white
        m1 = UrnModel(ONE_DRAW, random_one_matrix(rng), F(1), F(1), WITH_REPLACEMENT)
        assert drift_for(m1).evaluate(z) == cond_moments_oracle(state, m1).mean_y
        for sampling in (WITHOUT_REPLACEMENT, WITH_REPLACEMENT):
            m2 = UrnModel(TWO_DRAW, random_two_matrix(rng), F(2), F(2), sampling)
            moments = cond_moments_oracle(state, m2)
            expected = drift_for(m2).evaluate(z) + (
                moments.mean_u if sampling == WITHOUT_REPLACEMENT else 0
            )
            assert moments.mean_y == expected


# ---------------------------------------------------------------------------
# Noise
# ---------------------------------------------------------------------------

def test_error_one_gap_and_error():
    noise = error_one(OneDrawMatrix.from_entries([2, 0, 0, 1]))
    assert noise.gap == P(2, -1)
    x, one = P(0, 1), P(1)
    assert noise.error == x * (one - x) * noise.gap * noise.gap


def test_error_one_matches_oracle_variance():
    rng = random.Random(17)
    for _ in range(80):
        state = random_state(rng)
        model = UrnModel(ONE_DRAW, random_one_matrix(rng), F(1), F(1), WITH_REPLACEMENT)
        moments = cond_moments_oracle(state, model)
        assert moments.mean_u == 0
        assert error_for(model).evaluate(state.proportion_white) == moments.mean_u_sq


def test_error_two_matches_oracle_variance_with_replacement():
    rng = random.Random(19)
    for _ in range(80):
        state = random_state(rng)
        model = UrnModel(TWO_DRAW, random_two_matrix(rng), F(2), F(2), WITH_REPLACEMENT)
        moments = cond_moments_oracle(state, model)
        assert moments.mean_u == 0
        assert error_for(model).evaluate(state.proportion_white) == moments.mean_u_sq


def test_error_two_decomposition_structure():
    rng = random.Random(23)
    x, one = P(0, 1), P(1)
    for _ in range(60):
        noise = error_two(random_two_matrix(rng))
        assert noise.second_diff == noise.diff_ww_bb - 2 * noise.diff_wb_bb
        quartic = (
            2 * x * x * (noise.second_diff + noise.diff_wb_bb) ** 2
            + x * (one - x) * noise.diff_ww_bb ** 2
            + 2 * (one - x) ** 2 * noise.diff_wb_bb ** 2
        )
        assert noise.variance_factor == quartic
        assert noise.error == x * (one - x) * quartic


def test_error_two_fixture_value():
    noise = error_two(TwoDrawMatrix.from_entries([15, 3, 4, 1, 3, 21]))
    assert noise.error.evaluate(F(1, 2)) == F(243, 8)


# ---------------------------------------------------------------------------
# Per-step bias closed forms
# ---------------------------------------------------------------------------

def test_single_draw_bias_closed_form_matches_oracle():
    rng = random.Random(29)
    for _ in range(150):
        m = random_one_matrix(rng)
        state = random_state(rng)
        model = UrnModel(ONE_DRAW, m, F(1), F(1), WITH_REPLACEMENT)
        assert cond_iv_closed_form_one(state, m) == cond_moments_oracle(state, model).mean_u_over_next_t


def test_pair_bias_numerators_cancel():
    rng = random.Random(31)
    for _ in range(100):
        p1, p2, p3 = cond_iv_polys(random_two_matrix(rng))
        assert (p1 + p2 + p3).is_zero


def test_pair_bias_closed_form_matches_oracle():
    rng = random.Random(37)
    for _ in range(120):
        m = random_two_matrix(rng)
        state = random_state(rng)
        for sampling in (WITHOUT_REPLACEMENT, WITH_REPLACEMENT):
            model = UrnModel(TWO_DRAW, m, F(2), F(2), sampling)
            moments = cond_moments_oracle(state, model)
            assert cond_iv_closed_form_two(state, m, sampling) == moments.mean_u_over_next_t


def test_pair_mean_residual_matches_oracle():
    rng = random.Random(41)
    for _ in range(120):
        m = random_two_matrix(rng)
        state = random_state(rng)
        without = UrnModel(TWO_DRAW, m, F(2), F(2), WITHOUT_REPLACEMENT)
        assert mean_noise_residual_two(state, m) == cond_moments_oracle(state, without).mean_u
        with_repl = UrnModel(TWO_DRAW, m, F(2), F(2), WITH_REPLACEMENT)
        assert cond_moments_oracle(state, with_repl).mean_u == 0


def test_pair_remainders_need_two_balls():
    m = TwoDrawMatrix.from_entries([1, 1, 1, 1, 1, 1])
    with pytest.raises(ValueError):
        cond_iv_remainders(UrnState(F(1, 2), F(1, 2), 0), m)


def test_bias_bound_dominates_exact_bias():
    rng = random.Random(43)
    for _ in range(100):
        state = random_state(rng)
        t = state.total
        m1 = UrnModel(ONE_DRAW, random_one_matrix(rng), F(1), F(1), WITH_REPLACEMENT)
        bias = cond_moments_oracle(state, m1).mean_u_over_next_t
        assert abs(bias) * t * t <= bias_bound(m1)
        for sampling in (WITHOUT_REPLACEMENT, WITH_REPLACEMENT):
            m2 = UrnModel(TWO_DRAW, random_two_matrix(rng), F(2), F(2), sampling)
            bias = cond_moments_oracle(state, m2).mean_u_over_next_t
            assert abs(bias) * t * t <= bias_bound(m2)


# ---------------------------------------------------------------------------
# Attainable interval and divergence flags
# ---------------------------------------------------------------------------

def test_attainable_interval_pair_fixtures():
    interval = attainable_interval(two_draw_model([15, 3, 4, 1, 3, 21], 2, 2))
    assert (interval.lower, interval.upper, interval.closed_bounds) == (F(1, 8), F(5, 6), True)
    interval = attainable_interval(two_draw_model([35, 9, 1, 1, 3, 21], 2, 2))
    assert (interval.lower, interval.upper) == (F(1, 8), F(35, 44))


def test_attainable_interval_single_draw_is_open_unit():
    interval = attainable_interval(one_draw_model([1, 0, 0, 1], 1, 1))
    assert (interval.lower, interval.upper, interval.closed_bounds) == (F(0), F(1), False)
    assert not interval.contains_for_stable(F(0))
    assert interval.contains_for_stable(F(1, 2))


def test_count_divergence_flags():
    assert white_count_diverges_at_zero(one_draw_model([1, 0, 0, 1], 1, 1))
    assert not white_count_diverges_at_zero(one_draw_model([0, 1, 1, 0], 1, 1))
    # pair draws: mixed-row white additions keep the count growing near 0
    assert white_count_diverges_at_zero(two_draw_model([15, 3, 4, 1, 3, 21], 2, 2))
    # c = e = f = 0 but a > 0: only the (vanishing) white-white row adds white
    assert white_count_diverges_at_zero(two_draw_model([2, 1, 0, 1, 0, 0], 2, 2))
    assert not white_count_diverges_at_zero(two_draw_model([0, 1, 0, 1, 0, 1], 2, 2))
    assert black_count_diverges_at_one(two_draw_model([15, 3, 4, 1, 3, 21], 2, 2))


# ---------------------------------------------------------------------------
# Inactive-row (degenerate) machinery
# ---------------------------------------------------------------------------

def test_degenerate_case_ids():
    assert degenerate_case_id(two_draw_model([15, 3, 4, 1, 3, 21], 2, 2)) == 0
    assert degenerate_case_id(two_draw_model([2, 3, 0, 0, 0, 0], 2, 2)) == 1
    assert degenerate_case_id(two_draw_model([0, 0, 0, 0, 2, 3], 2, 2)) == 2
    assert degenerate_case_id(two_draw_model([0, 0, 2, 3, 0, 0], 2, 2)) == 3
    assert degenerate_case_id(two_draw_model([0, 0, 2, 3, 1, 4], 2, 2)) == 4
    assert degenerate_case_id(two_draw_model([2, 3, 1, 4, 0, 0], 2, 2)) == 5
    assert degenerate_case_id(two_draw_model([2, 3, 0, 0, 1, 4], 2, 2)) == 6
    assert degenerate_case_id(one_draw_model([1, 2, 0, 0], 1, 1)) == 1
    assert degenerate_case_id(one_draw_model([0, 0, 1, 2], 1, 1)) == 2


def test_single_active_row_fixed_limit():
    reduction = degenerate_reduce(two_draw_model([2, 3, 0, 0, 0, 0], 2, 2))
    assert reduction.case_id == 1 and reduction.fixed_limit == F(2, 5)
    reduction = degenerate_reduce(two_draw_model([0, 0, 0, 0, 2, 3], 2, 2))
    assert reduction.fixed_limit == F(2, 5)
    reduction = degenerate_reduce(two_draw_model([0, 0, 2, 3, 0, 0], 2, 2))
    assert reduction.fixed_limit == F(2, 5)


def test_case4_reduction_and_map_back():
    model = two_draw_model([0, 0, 1, 1, 1, 1], 2, 2)
    reduction = degenerate_reduce(model)
    assert reduction.case_id == 4
    assert reduction.reduced_drift == P(2, -3)
    # reduced-variable root 2/3 sits at original proportion 1/2
    assert degenerate_map_back(reduction, F(2, 3)) == F(1, 2)
    assert degenerate_map_back(reduction, F(0)) == F(0)
    assert degenerate_map_back(reduction, F(1)) == F(1)


def test_case6_reduction_weight():
    model = two_draw_model([2, 3, 0, 0, 1, 4], 2, 2)
    reduction = degenerate_reduce(model)
    assert reduction.case_id == 6
    assert reduction.weight_denominator == P(1, -2, 2)  # x^2 + (1-x)^2
    # embedded drift is reduced_drift / weight_denominator; the stored
    # numerator is the plain cubic drift, so signs and zeros coincide
    assert reduction.reduced_drift == drift_for(model)
    assert degenerate_map_back(reduction, F(1, 3)) == F(1, 3)


def test_degenerate_identity_gaps_zero():
    rng = random.Random(47)
    for zero_rows in ((0, 1), (4, 5), (2, 3)):
        for _ in range(20):
            entries = [random_entry(rng) + 1 for _ in range(6)]
            for idx in zero_rows:
                entries[idx] = F(0)
            model = two_draw_model(entries, 2, 2)
            for _ in range(10):
                x = F(rng.randint(1, 99), 100)
                assert degenerate_identity_gap(model, x) == 0


def test_single_draw_degenerate_limit():
    assert drift_one_degenerate(OneDrawMatrix.from_entries([3, 1, 0, 0])) == F(3, 4)
    assert drift_one_degenerate(OneDrawMatrix.from_entries([0, 0, 2, 3])) == F(2, 5)


def test_model_meta_fields():
    meta = model_meta(two_draw_model([15, 3, 4, 1, 3, 21], 2, 2))
    assert meta.kind == TWO_DRAW
    assert meta.t_min == 5 and meta.t_max == 24
    assert meta.degenerate_case == 0
    assert meta.white_count_diverges_at_zero and meta.black_count_diverges_at_one


# ---------------------------------------------------------------------------
# Serialization
# ---------------------------------------------------------------------------

def test_model_dict_round_trip():
    models = [
        one_draw_model([F(1, 2), 0, F(3, 4), 1], F(3, 2), 2),
        two_draw_model([15, 3, 4, 1, 3, 21], 5, 2),
        two_draw_model([1, 2, 3, 4, 5, 6], 2, 2, sampling=WITH_REPLACEMENT),
    ]
    for model in models:
        data = model_to_dict(model)
        json.dumps(data)  # JSON-serializable
        assert model_from_dict(data) == model


def test_load_model_file(tmp_path):
    model = two_draw_model([15, 3, 4, 1, 3, 21], 5, 2)
    path = tmp_path / "model.json"
    path.write_text(json.dumps(model_to_dict(model)))
    assert load_model(path) == model


def test_model_from_dict_rejects_bad_input():
    with pytest.raises((ValueError, KeyError, TypeError)):
        model_from_dict({"model": "three-draw"})
    with pytest.raises((ValueError, KeyError, TypeError)):
        model_from_dict({"model": "one-draw", "matrix": [["1", "2"]], "w0": "1", "b0": "1"})

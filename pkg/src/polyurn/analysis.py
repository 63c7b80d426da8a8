"""Whole-model analysis: from an urn specification to a limit prediction.

This module wires the exact building blocks together. Given a model it
derives the drift and noise polynomials, classifies the drift's equilibria,
applies the exclusion criteria, handles the families with special closed-form
answers (identically zero drift; matrices with inactive rows), and produces a
single :class:`~polyurn.stability.LimitPrediction` plus a JSON-ready report.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .ratpoly import (
    INTERIOR,
    LEFT_BOUNDARY,
    RIGHT_BOUNDARY,
    RatPoly,
    RootRecord,
    format_rational,
    parse_rational,
    refine_root,
)
from .stability import (
    THEOREM_BOUNDARY_EXCLUSION,
    THEOREM_LIMIT_EXISTS,
    THEOREM_NOISE_FLOOR_EXCLUSION,
    THEOREM_PAIR_FLAT_CONTINUOUS,
    THEOREM_SINGLE_DRAW_LAW,
    THEOREM_STABLE_ATTRACTION,
    THEOREM_TOUCHPOINT_POSSIBLE,
    VERDICT_POSITIVE_PROBABILITY,
    VERDICT_TOUCHPOINT,
    VERDICT_UNIQUE,
    VERDICT_UNKNOWN,
    Equilibrium,
    EquilibriumClass,
    ExcludedPoint,
    LimitPrediction,
    PredictedPoint,
    PredictionKind,
    SAConditions,
    check_boundary_exclusion,
    check_noise_floor,
    classify_all,
)
from .urns import (
    ONE_DRAW,
    TWO_DRAW,
    WITHOUT_REPLACEMENT,
    AttainableInterval,
    DegenerateReduction,
    ModelMeta,
    OneDrawNoise,
    TwoDrawNoise,
    UrnModel,
    attainable_interval,
    degenerate_map_back,
    degenerate_reduce,
    drift_for,
    error_for,
    error_one,
    error_two,
    model_meta,
    model_to_dict,
)

__all__ = [
    "ModelAnalysis",
    "analysis_to_dict",
    "analyze_model",
    "predict_limit",
    "sa_conditions_for",
]


def sa_conditions_for(model: UrnModel) -> SAConditions | None:
    """Scheme constants for the model, or None when a matrix row adds nothing."""
    meta = model_meta(model)
    if meta.t_min <= 0:
        return None
    return SAConditions.build(
        initial_total=model.w0 + model.b0,
        t_min=meta.t_min,
        t_max=meta.t_max,
        drift=drift_for(model),
        bias_constant=meta.bias_bound,
    )


# ---------------------------------------------------------------------------
# Exact interval membership for root records
# ---------------------------------------------------------------------------

def record_within(record: RootRecord, lower: Fraction, upper: Fraction, strict: bool) -> bool:
    """Exact membership of a located root in a rational-endpoint interval.

    Irrational roots are decided by shrinking their isolating interval until
    it is entirely inside or entirely outside; this terminates because an
    irrational root can never equal a rational endpoint.
    """
    if record.value is not None:
        v = record.value
        return lower < v < upper if strict else lower <= v <= upper
    rec = record
    while True:
        lo, hi = rec.interval
        if lower < lo and hi < upper:
            return True
        if hi <= lower or lo >= upper:
            return False
        rec = refine_root(rec, (hi - lo) / 2)


def _synth_record(value: Fraction) -> RootRecord:
    """A record for a point known in closed form (not from root isolation)."""
    v = Fraction(value)
    location = LEFT_BOUNDARY if v == 0 else RIGHT_BOUNDARY if v == 1 else INTERIOR
    return RootRecord(multiplicity=1, location=location, approx=float(v), value=v)


def _map_record(record: RootRecord, reduction: DegenerateReduction) -> RootRecord:
    """Send a reduced-coordinate root record back to the original proportion."""
    if reduction.case_id not in (4, 5):
        return record
    if record.value is not None:
        x = degenerate_map_back(reduction, record.value)
        location = LEFT_BOUNDARY if x == 0 else RIGHT_BOUNDARY if x == 1 else INTERIOR
        return RootRecord(
            multiplicity=record.multiplicity,
            location=location,
            approx=float(x),
            value=x,
        )
    lo, hi = record.interval
    a = degenerate_map_back(reduction, lo)
    b = degenerate_map_back(reduction, hi)
    lo_x, hi_x = (a, b) if a <= b else (b, a)
    return RootRecord(
        multiplicity=record.multiplicity,
        location=INTERIOR,
        approx=float((lo_x + hi_x) / 2),
        interval=(lo_x, hi_x),
    )


# ---------------------------------------------------------------------------
# Prediction
# ---------------------------------------------------------------------------

def predict_limit(model: UrnModel) -> LimitPrediction:
    """The strongest certified statement about the long-run white proportion."""
    meta = model_meta(model)
    if meta.degenerate_case != 0:
        return _predict_degenerate(model)
    drift = drift_for(model)
    if drift.is_zero:
        return _predict_flat(model)
    error_poly = error_for(model)
    attain = attainable_interval(model)
    equilibria = classify_all(drift)
    return _predict_from_equilibria(drift, error_poly, equilibria, attain, meta)


def _predict_from_equilibria(
    drift: RatPoly,
    error_poly: RatPoly,
    equilibria: list[Equilibrium],
    attain: AttainableInterval | None,
    meta: ModelMeta,
) -> LimitPrediction:
    points: list[PredictedPoint] = []
    excluded: list[ExcludedPoint] = []
    for eq in equilibria:
        rec = eq.root
        cls = eq.classification
        if cls is EquilibriumClass.STRICTLY_UNSTABLE:
            if rec.location == INTERIOR:
                if check_noise_floor(error_poly, rec):
                    excluded.append(ExcludedPoint(rec, cls, THEOREM_NOISE_FLOOR_EXCLUSION))
                    continue
            else:
                boundary = Fraction(0) if rec.location == LEFT_BOUNDARY else Fraction(1)
                diverges = (
                    meta.white_count_diverges_at_zero
                    if boundary == 0
                    else meta.black_count_diverges_at_one
                )
                if check_boundary_exclusion(drift, error_poly, boundary, diverges):
                    excluded.append(ExcludedPoint(rec, cls, THEOREM_BOUNDARY_EXCLUSION))
                    continue
            points.append(PredictedPoint(rec, cls, VERDICT_UNKNOWN, None))
        elif cls is EquilibriumClass.STABLE:
            if attain is not None and record_within(
                rec, attain.lower, attain.upper, strict=not attain.closed_bounds
            ):
                points.append(
                    PredictedPoint(rec, cls, VERDICT_POSITIVE_PROBABILITY, THEOREM_STABLE_ATTRACTION)
                )
            else:
                points.append(PredictedPoint(rec, cls, VERDICT_UNKNOWN, None))
        elif cls is EquilibriumClass.TOUCHPOINT:
            if attain is not None and record_within(rec, attain.lower, attain.upper, strict=True):
                points.append(
                    PredictedPoint(rec, cls, VERDICT_TOUCHPOINT, THEOREM_TOUCHPOINT_POSSIBLE)
                )
            else:
                points.append(PredictedPoint(rec, cls, VERDICT_UNKNOWN, None))
        else:
            points.append(PredictedPoint(rec, cls, VERDICT_UNKNOWN, None))
    if not points:
        return LimitPrediction(
            kind=PredictionKind.UNKNOWN,
            excluded=tuple(excluded),
            notes=("every drift root was excluded; no certified candidate remains",),
        )
    if len(points) == 1:
        only = points[0]
        points = [
            PredictedPoint(only.root, only.classification, VERDICT_UNIQUE, THEOREM_LIMIT_EXISTS)
        ]
    return LimitPrediction(
        kind=PredictionKind.POINT_MASS_SET,
        points=tuple(points),
        excluded=tuple(excluded),
    )


def _predict_flat(model: UrnModel) -> LimitPrediction:
    """Identically zero drift: the exchangeable reinforcement families."""
    if model.w0 == 0 or model.b0 == 0:
        fixed = Fraction(0) if model.w0 == 0 else Fraction(1)
        return LimitPrediction(
            kind=PredictionKind.POINT_MASS_SET,
            points=(PredictedPoint(_synth_record(fixed), None, VERDICT_UNIQUE, None),),
            notes=("one color is absent initially and is never added, so the proportion is frozen",),
        )
    if model.kind == ONE_DRAW:
        # Zero drift for single draws forces the rule "add s of the drawn
        # color" (the classical reinforcement urn); the limit law is Beta.
        s = model.matrix.w_add_white
        return LimitPrediction(
            kind=PredictionKind.BETA_DISTRIBUTION,
            beta_params=(model.w0 / s, model.b0 / s),
            theorem=THEOREM_SINGLE_DRAW_LAW,
        )
    if model.sampling == WITHOUT_REPLACEMENT:
        return LimitPrediction(
            kind=PredictionKind.CONTINUOUS_NO_ATOMS,
            theorem=THEOREM_PAIR_FLAT_CONTINUOUS,
            notes=("the proportion converges and its limit law has no interior point mass",),
        )
    return LimitPrediction(
        kind=PredictionKind.UNKNOWN,
        notes=(
            "zero-drift pair model sampled with replacement: the no-atoms result "
            "is established only for sampling without replacement",
        ),
    )


def _active_ratio_span(model: UrnModel) -> tuple[Fraction, Fraction]:
    """Closed span of white ratios of the matrix rows that add balls."""
    entries = model.matrix.entries
    ratios = []
    for i in range(0, len(entries), 2):
        add_w, add_b = entries[i], entries[i + 1]
        if add_w + add_b > 0:
            ratios.append(add_w / (add_w + add_b))
    return min(ratios), max(ratios)


def _predict_degenerate(model: UrnModel) -> LimitPrediction:
    """Models with inactive matrix rows (some draws change nothing)."""
    reduction = degenerate_reduce(model)
    if reduction.fixed_limit is not None:
        point = PredictedPoint(
            _synth_record(reduction.fixed_limit), None, VERDICT_UNIQUE, None
        )
        return LimitPrediction(
            kind=PredictionKind.POINT_MASS_SET,
            points=(point,),
            notes=("a single active matrix row pins the proportion to its white ratio",),
        )

    reduced = reduction.reduced_drift
    if reduced.is_zero:
        return LimitPrediction(
            kind=PredictionKind.UNKNOWN,
            notes=("the reduced drift is identically zero; no certified statement",),
        )

    meta = model_meta(model)
    lo_x, hi_x = _active_ratio_span(model)
    if reduction.case_id == 4:
        span = (2 * lo_x / (1 + lo_x), 2 * hi_x / (1 + hi_x))
    elif reduction.case_id == 5:
        span = (2 * (1 - hi_x) / (2 - hi_x), 2 * (1 - lo_x) / (2 - lo_x))
    else:
        span = (lo_x, hi_x)

    points: list[PredictedPoint] = []
    excluded: list[ExcludedPoint] = []
    borderline = False
    for eq in classify_all(reduced):
        rec = eq.root
        cls = eq.classification
        mapped = _map_record(rec, reduction)
        if reduction.case_id in (4, 5) and _case45_sign_uncertain(model, reduction, mapped):
            # Borderline boundary configuration: neither exclusion nor
            # retention is certified, whatever the exact local sign says.
            borderline = True
            points.append(PredictedPoint(mapped, cls, VERDICT_UNKNOWN, None))
            continue
        if (
            cls is EquilibriumClass.STRICTLY_UNSTABLE
            and mapped.location != INTERIOR
            and reduction.case_id in (4, 5)
        ):
            diverges = (
                meta.white_count_diverges_at_zero
                if mapped.location == LEFT_BOUNDARY
                else meta.black_count_diverges_at_one
            )
            if diverges:
                # The reduced noise curve vanishes at the boundary (it keeps
                # the proportion-times-complement factor), so the boundary
                # non-convergence criterion applies when the count diverges.
                excluded.append(ExcludedPoint(mapped, cls, THEOREM_BOUNDARY_EXCLUSION))
                continue
            points.append(PredictedPoint(mapped, cls, VERDICT_UNKNOWN, None))
        elif cls is EquilibriumClass.STABLE and record_within(rec, span[0], span[1], strict=False):
            points.append(
                PredictedPoint(mapped, cls, VERDICT_POSITIVE_PROBABILITY, THEOREM_STABLE_ATTRACTION)
            )
        else:
            points.append(PredictedPoint(mapped, cls, VERDICT_UNKNOWN, None))

    notes = (
        "inactive matrix rows: the analysis runs on the chain of effective draws "
        f"({reduction.variable_map})",
    )
    if borderline:
        # The borderline boundary also voids the guarantee that the chain of
        # effective draws runs forever, so no "limit lies in this set"
        # statement survives either.
        return LimitPrediction(
            kind=PredictionKind.UNKNOWN,
            points=tuple(points),
            excluded=tuple(excluded),
            notes=notes
            + ("a borderline boundary root leaves the long-run behaviour unsettled",),
        )
    if not points:
        return LimitPrediction(
            kind=PredictionKind.UNKNOWN, excluded=tuple(excluded), notes=notes
        )
    if len(points) == 1 and points[0].verdict != VERDICT_UNKNOWN:
        only = points[0]
        points = [
            PredictedPoint(only.root, only.classification, VERDICT_UNIQUE, THEOREM_LIMIT_EXISTS)
        ]
    return LimitPrediction(
        kind=PredictionKind.POINT_MASS_SET,
        points=tuple(points),
        excluded=tuple(excluded),
        notes=notes,
    )


def _case45_sign_uncertain(
    model: UrnModel, reduction: DegenerateReduction, mapped: RootRecord
) -> bool:
    """Borderline sub-case where no exclusion or retention is certified.

    With the white-white row inactive, a root of the reduced drift at the
    all-white boundary (which needs the mixed row to add no black) sits at a
    degenerate repeller/attractor transition exactly when twice the mixed
    row's white addition equals the black-black row's total; the available
    arguments do not settle that configuration. Mirrored for the
    black-black-inactive case.
    """
    m = model.matrix if reduction.case_id == 4 else model.matrix.color_swap()
    boundary_is_one = mapped.location == RIGHT_BOUNDARY
    if reduction.case_id == 5:
        boundary_is_one = mapped.location == LEFT_BOUNDARY
    if not boundary_is_one:
        return False
    a, b, c, d, e, f = m.entries
    return d == 0 and 2 * c == f


# ---------------------------------------------------------------------------
# Full analysis bundle
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ModelAnalysis:
    """Everything the exact pipeline can say about one model."""

    model: UrnModel
    meta: ModelMeta
    drift: RatPoly
    noise: OneDrawNoise | TwoDrawNoise
    attainable: AttainableInterval | None
    scheme: SAConditions | None
    equilibria: tuple[Equilibrium, ...]
    prediction: LimitPrediction
    degenerate: DegenerateReduction | None


def analyze_model(model: UrnModel) -> ModelAnalysis:
    meta = model_meta(model)
    drift = drift_for(model)
    noise = error_one(model.matrix) if model.kind == ONE_DRAW else error_two(model.matrix)
    degenerate = None
    attain = None
    scheme = None
    equilibria: tuple[Equilibrium, ...] = ()
    if meta.degenerate_case != 0:
        degenerate = degenerate_reduce(model)
        if degenerate.case_id == 6 and not drift.is_zero:
            equilibria = tuple(classify_all(drift))
    else:
        attain = attainable_interval(model)
        scheme = sa_conditions_for(model)
        if not drift.is_zero:
            equilibria = tuple(classify_all(drift))
    return ModelAnalysis(
        model=model,
        meta=meta,
        drift=drift,
        noise=noise,
        attainable=attain,
        scheme=scheme,
        equilibria=equilibria,
        prediction=predict_limit(model),
        degenerate=degenerate,
    )


# ---------------------------------------------------------------------------
# JSON rendering
# ---------------------------------------------------------------------------

def _record_to_dict(record: RootRecord) -> dict:
    out = {
        "point": format_rational(record.value) if record.value is not None else None,
        "interval": (
            [format_rational(record.interval[0]), format_rational(record.interval[1])]
            if record.interval is not None
            else None
        ),
        "approx": record.approx,
        "location": record.location,
        "multiplicity": record.multiplicity,
    }
    return out


def _equilibrium_to_dict(eq: Equilibrium) -> dict:
    out = _record_to_dict(eq.root)
    out["classification"] = eq.classification.value
    out["sign_left"] = eq.sign_left
    out["sign_right"] = eq.sign_right
    out["drift_derivative_sign"] = eq.drift_derivative_sign
    out["drift_derivative"] = (
        format_rational(eq.drift_derivative) if eq.drift_derivative is not None else None
    )
    return out


def prediction_to_dict(prediction: LimitPrediction) -> dict:
    points = []
    for p in prediction.points:
        entry = _record_to_dict(p.root)
        entry["classification"] = p.classification.value if p.classification else None
        entry["verdict"] = p.verdict
        entry["theorem"] = p.theorem
        points.append(entry)
    excluded = []
    for p in prediction.excluded:
        entry = _record_to_dict(p.root)
        entry["classification"] = p.classification.value if p.classification else None
        entry["theorem"] = p.theorem
        excluded.append(entry)
    return {
        "kind": prediction.kind.value,
        "beta_params": (
            [format_rational(prediction.beta_params[0]), format_rational(prediction.beta_params[1])]
            if prediction.beta_params
            else None
        ),
        "theorem": prediction.theorem,
        "points": points,
        "excluded": excluded,
        "notes": list(prediction.notes),
    }


def _record_from_dict(entry: dict) -> RootRecord:
    """Rebuild a point record from its serialized form.

    Exact rational points round-trip exactly; points serialized without an
    exact value come back as the (exact binary) fraction of their float
    approximation, which is all that downstream clustering consumes.
    """
    if entry.get("point") is not None:
        return _synth_record(parse_rational(entry["point"]))
    return _synth_record(Fraction(float(entry["approx"])))


def prediction_from_dict(data: dict) -> LimitPrediction:
    """Inverse of :func:`prediction_to_dict` (up to irrational-point records)."""
    kind = PredictionKind(data["kind"])
    points = tuple(
        PredictedPoint(
            root=_record_from_dict(entry),
            classification=(
                EquilibriumClass(entry["classification"])
                if entry.get("classification")
                else None
            ),
            verdict=entry["verdict"],
            theorem=entry.get("theorem"),
        )
        for entry in data.get("points", ())
    )
    excluded = tuple(
        ExcludedPoint(
            root=_record_from_dict(entry),
            classification=(
                EquilibriumClass(entry["classification"])
                if entry.get("classification")
                else None
            ),
            theorem=entry["theorem"],
        )
        for entry in data.get("excluded", ())
    )
    raw_beta = data.get("beta_params")
    beta_params = (
        (parse_rational(raw_beta[0]), parse_rational(raw_beta[1])) if raw_beta else None
    )
    return LimitPrediction(
        kind=kind,
        points=points,
        excluded=excluded,
        beta_params=beta_params,
        theorem=data.get("theorem"),
        notes=tuple(data.get("notes", ())),
    )


def analysis_to_dict(analysis: ModelAnalysis) -> dict:
    meta = analysis.meta
    noise = analysis.noise
    if isinstance(noise, OneDrawNoise):
        noise_dict = {
            "gap": noise.gap.coefficient_strings(),
            "error": noise.error.coefficient_strings(),
        }
    else:
        noise_dict = {
            "diff_ww_bb": noise.diff_ww_bb.coefficient_strings(),
            "diff_wb_bb": noise.diff_wb_bb.coefficient_strings(),
            "second_diff": noise.second_diff.coefficient_strings(),
            "variance_factor": noise.variance_factor.coefficient_strings(),
            "error": noise.error.coefficient_strings(),
        }
    scheme = analysis.scheme
    scheme_dict = None
    if scheme is not None:
        scheme_dict = {
            "initial_total": format_rational(scheme.initial_total),
            "t_min": format_rational(scheme.t_min),
            "t_max": format_rational(scheme.t_max),
            "lower_rate": format_rational(scheme.lower_rate),
            "upper_rate": format_rational(scheme.upper_rate),
            "drift_sup": format_rational(scheme.drift_sup),
            "noise_sup": format_rational(scheme.noise_sup),
            "increment_sup": format_rational(scheme.increment_sup),
            "bias_constant": format_rational(scheme.bias_constant),
        }
    degenerate = analysis.degenerate
    degenerate_dict = None
    if degenerate is not None:
        degenerate_dict = {
            "case": degenerate.case_id,
            "fixed_limit": (
                format_rational(degenerate.fixed_limit)
                if degenerate.fixed_limit is not None
                else None
            ),
            "reduced_drift": (
                degenerate.reduced_drift.coefficient_strings()
                if degenerate.reduced_drift is not None
                else None
            ),
            "weight_denominator": (
                degenerate.weight_denominator.coefficient_strings()
                if degenerate.weight_denominator is not None
                else None
            ),
            "variable_map": degenerate.variable_map,
        }
    return {
        "model": model_to_dict(analysis.model),
        "meta": {
            "kind": meta.kind,
            "sampling": meta.sampling,
            "t_min": format_rational(meta.t_min),
            "t_max": format_rational(meta.t_max),
            "bias_bound": format_rational(meta.bias_bound),
            "degenerate_case": meta.degenerate_case,
            "white_count_diverges_at_zero": meta.white_count_diverges_at_zero,
            "black_count_diverges_at_one": meta.black_count_diverges_at_one,
        },
        "drift": {
            "coefficients": analysis.drift.coefficient_strings(),
            "text": analysis.drift.to_text(),
        },
        "noise": noise_dict,
        "scheme_constants": scheme_dict,
        "attainable": (
            {
                "lower": format_rational(analysis.attainable.lower),
                "upper": format_rational(analysis.attainable.upper),
                "closed_bounds": analysis.attainable.closed_bounds,
            }
            if analysis.attainable is not None
            else None
        ),
        "equilibria": [_equilibrium_to_dict(eq) for eq in analysis.equilibria],
        "prediction": prediction_to_dict(analysis.prediction),
        "degenerate": degenerate_dict,
    }

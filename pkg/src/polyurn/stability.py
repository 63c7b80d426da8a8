"""Equilibrium classification and limit bookkeeping for proportion processes.

The white proportion of a reinforcement urn is a stochastic-approximation
scheme on [0, 1]: its conditional one-step mean movement is a polynomial
drift (up to exactly bounded remainders), and its long-run limits live in
the drift's zero set. This module classifies those zeros exactly by the
drift's sign pattern around them, checks the two exclusion criteria (a
noise floor at an interior repeller; vanishing noise with a diverging count
at a boundary repeller), packages the constants that certify the scheme is
well-behaved, and defines the prediction records consumed by simulation
verification.

All decisions here are exact: signs are evaluated in rational arithmetic,
including at irrational roots (via their isolating intervals).
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from fractions import Fraction

from .ratpoly import (
    INTERIOR,
    LEFT_BOUNDARY,
    RIGHT_BOUNDARY,
    RatPoly,
    RootRecord,
    roots_in_unit_interval,
    sign_at_root,
)

# Stable identifiers for the supporting results cited in reports. Downstream
# tools match on these exact strings.
THEOREM_LIMIT_EXISTS = "theorem:main"
THEOREM_NOISE_FLOOR_EXCLUSION = "theorem:pem"
THEOREM_BOUNDARY_EXCLUSION = "theorem:renlund"
THEOREM_STABLE_ATTRACTION = "theorem:stable"
THEOREM_TOUCHPOINT_POSSIBLE = "theorem:pem2"
THEOREM_SINGLE_DRAW_LAW = "theorem:h1"
THEOREM_PAIR_FLAT_CONTINUOUS = "theorem:2drag"

VERDICT_UNIQUE = "converges-a.s.-unique"
VERDICT_POSITIVE_PROBABILITY = "positive-probability"
VERDICT_TOUCHPOINT = "possible-touchpoint"
VERDICT_UNKNOWN = "unknown"


class EquilibriumClass(enum.Enum):
    """How the drift behaves around one of its roots in [0, 1].

    - ``STABLE``: the drift points toward the root on each side within the
      domain (attracting).
    - ``STRICTLY_UNSTABLE``: the drift points away from the root on each side
      within the domain (repelling).
    - ``TOUCHPOINT``: an interior root the drift touches without crossing
      (same strict sign on both sides; even multiplicity).
    - ``WEAKLY_UNSTABLE_BOUNDARY``: reserved for a boundary root repelling
      only weakly; a nonzero polynomial drift never produces it, but the
      category is kept so reports can represent it.
    - ``FLAT_DRIFT``: marker used when the drift is identically zero (no
      isolated equilibria exist; classification does not apply).
    """

    STABLE = "stable"
    STRICTLY_UNSTABLE = "strictly-unstable"
    TOUCHPOINT = "touchpoint"
    WEAKLY_UNSTABLE_BOUNDARY = "weakly-unstable-boundary"
    FLAT_DRIFT = "flat-drift"


@dataclass(frozen=True)
class Equilibrium:
    """A classified root of the drift.

    ``sign_left``/``sign_right`` are the exact drift signs strictly between
    this root and its neighbor root (or domain end) on each side; a boundary
    root has only its inward side. ``drift_derivative_sign`` is the exact
    sign of the drift's derivative at the root, and ``drift_derivative`` its
    exact value when the root is rational.
    """

    root: RootRecord
    classification: EquilibriumClass
    sign_left: int | None
    sign_right: int | None
    drift_derivative_sign: int
    drift_derivative: Fraction | None


def classify_all(drift: RatPoly) -> list[Equilibrium]:
    """Classify every root of ``drift`` in [0, 1], in increasing order.

    Raises ``ValueError`` for the identically zero drift, whose equilibria
    are not isolated points.
    """
    if drift.is_zero:
        raise ValueError("the zero drift has no isolated equilibria to classify")
    records = roots_in_unit_interval(drift)
    return [_classify_record(drift, records, i) for i in range(len(records))]


def classify(drift: RatPoly, root: RootRecord) -> Equilibrium:
    """Classify one root of ``drift`` (as produced by the root isolator)."""
    if drift.is_zero:
        raise ValueError("the zero drift has no isolated equilibria to classify")
    records = roots_in_unit_interval(drift)
    for i, rec in enumerate(records):
        if _same_root(rec, root):
            return _classify_record(drift, records, i)
    raise ValueError("the given point is not a root of the drift inside [0, 1]")


def _same_root(a: RootRecord, b: RootRecord) -> bool:
    if (a.value is None) != (b.value is None):
        return False
    if a.value is not None:
        return a.value == b.value
    a_lo, a_hi = a.interval
    b_lo, b_hi = b.interval
    return max(a_lo, b_lo) < min(a_hi, b_hi)


def _zone(record: RootRecord) -> tuple[Fraction, Fraction]:
    if record.value is not None:
        return record.value, record.value
    return record.interval


def _classify_record(drift: RatPoly, records: list[RootRecord], index: int) -> Equilibrium:
    record = records[index]
    lo, hi = _zone(record)

    left_probe = None
    if lo > 0:
        left_neighbor_hi = _zone(records[index - 1])[1] if index > 0 else Fraction(0)
        left_probe = (left_neighbor_hi + lo) / 2
    right_probe = None
    if hi < 1:
        right_neighbor_lo = _zone(records[index + 1])[0] if index + 1 < len(records) else Fraction(1)
        right_probe = (hi + right_neighbor_lo) / 2

    def probe_sign(x: Fraction | None) -> int | None:
        if x is None:
            return None
        v = drift.evaluate(x)
        if v == 0:
            raise ArithmeticError("probe point unexpectedly hit a root")
        return 1 if v > 0 else -1

    sign_left = probe_sign(left_probe)
    sign_right = probe_sign(right_probe)

    if record.location == LEFT_BOUNDARY:
        cls = (
            EquilibriumClass.STRICTLY_UNSTABLE
            if sign_right > 0
            else EquilibriumClass.STABLE
        )
    elif record.location == RIGHT_BOUNDARY:
        cls = (
            EquilibriumClass.STRICTLY_UNSTABLE
            if sign_left < 0
            else EquilibriumClass.STABLE
        )
    elif sign_left > 0 and sign_right < 0:
        cls = EquilibriumClass.STABLE
    elif sign_left < 0 and sign_right > 0:
        cls = EquilibriumClass.STRICTLY_UNSTABLE
    else:
        cls = EquilibriumClass.TOUCHPOINT

    if record.location == INTERIOR:
        crosses = sign_left != sign_right
        if crosses != (record.multiplicity % 2 == 1):
            raise ArithmeticError("sign pattern inconsistent with root multiplicity")

    deriv = drift.derivative()
    deriv_sign = sign_at_root(deriv, record)
    deriv_value = deriv.evaluate(record.value) if record.value is not None else None
    return Equilibrium(
        root=record,
        classification=cls,
        sign_left=sign_left,
        sign_right=sign_right,
        drift_derivative_sign=deriv_sign,
        drift_derivative=deriv_value,
    )


# ---------------------------------------------------------------------------
# Exclusion criteria
# ---------------------------------------------------------------------------

def check_noise_floor(error_poly: RatPoly, root: RootRecord) -> bool:
    """Whether the step-noise variance stays strictly positive at ``root``.

    A strict noise floor at an interior repelling root forbids convergence
    there. The sign is decided exactly, including at irrational roots.
    """
    return sign_at_root(error_poly, root) > 0


def check_boundary_exclusion(
    drift: RatPoly,
    error_poly: RatPoly,
    boundary: Fraction,
    count_diverges: bool,
) -> bool:
    """Whether a repelling boundary root can be excluded as a limit.

    Requirements: the boundary (0 or 1) is a root of the drift (checked);
    the noise variance curve vanishes there too, so both the squared drift
    and the noise shrink at least linearly in the distance to the boundary
    (automatic for polynomials once they vanish at the point); and the count
    of balls of the vanishing color grows without bound (supplied by the
    caller as a model fact).
    """
    boundary = Fraction(boundary)
    if boundary not in (Fraction(0), Fraction(1)):
        raise ValueError("boundary must be 0 or 1")
    if drift.evaluate(boundary) != 0:
        raise ValueError("the boundary point is not a root of the drift")
    return error_poly.evaluate(boundary) == 0 and count_diverges


# ---------------------------------------------------------------------------
# Scheme constants
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SAConditions:
    """Constants certifying the proportion process is a well-behaved scheme.

    With ``T_n`` the total after ``n`` steps and the step size ``1/T_n``:

    - ``lower_rate <= 1/(n T_n) ... `` more precisely the step size is
      squeezed between ``lower_rate / n`` and ``upper_rate / n``;
    - ``drift_sup`` bounds the drift's absolute value on [0, 1];
    - ``noise_sup`` bounds the absolute centered noise of one step;
    - ``increment_sup = upper_rate * (drift_sup + noise_sup)`` bounds the
      absolute one-step change of the proportion times ``n``;
    - ``bias_constant`` bounds ``|E[noise / T_next]|`` times ``T^2``.

    All constants are positive rationals and ``lower_rate <= upper_rate``.
    """

    initial_total: Fraction
    t_min: Fraction
    t_max: Fraction
    lower_rate: Fraction
    upper_rate: Fraction
    drift_sup: Fraction
    noise_sup: Fraction
    increment_sup: Fraction
    bias_constant: Fraction

    def __post_init__(self):
        values = (
            self.initial_total, self.t_min, self.t_max, self.lower_rate,
            self.upper_rate, self.drift_sup, self.noise_sup,
            self.increment_sup, self.bias_constant,
        )
        if any(v <= 0 for v in values):
            raise ValueError("scheme constants must all be positive")
        if self.lower_rate > self.upper_rate:
            raise ValueError("rate bounds are inverted")
        if self.increment_sup != self.upper_rate * (self.drift_sup + self.noise_sup):
            raise ValueError("increment bound must tie the rate and magnitude bounds")

    @staticmethod
    def build(
        initial_total: Fraction,
        t_min: Fraction,
        t_max: Fraction,
        drift: RatPoly,
        bias_constant: Fraction,
    ) -> "SAConditions":
        """Derive the constants from model facts.

        ``drift_sup`` is the coefficient-magnitude sum (an upper bound on
        [0, 1], floored at 1 for the zero drift so every constant stays
        positive); ``noise_sup`` adds the largest per-step total growth,
        since the centered white increment is at most that growth in size.
        """
        if t_min <= 0:
            raise ValueError("every matrix row must add at least one ball")
        drift_sup = sum(abs(c) for c in drift.coeffs)
        if drift_sup == 0:
            drift_sup = Fraction(1)
        noise_sup = t_max + drift_sup
        lower_rate = Fraction(1) / (initial_total + t_max)
        upper_rate = Fraction(1) / t_min
        return SAConditions(
            initial_total=Fraction(initial_total),
            t_min=Fraction(t_min),
            t_max=Fraction(t_max),
            lower_rate=lower_rate,
            upper_rate=upper_rate,
            drift_sup=drift_sup,
            noise_sup=noise_sup,
            increment_sup=upper_rate * (drift_sup + noise_sup),
            bias_constant=Fraction(bias_constant),
        )


# ---------------------------------------------------------------------------
# Limit predictions
# ---------------------------------------------------------------------------

class PredictionKind(enum.Enum):
    POINT_MASS_SET = "point-mass-set"
    BETA_DISTRIBUTION = "beta-distribution"
    CONTINUOUS_NO_ATOMS = "continuous-no-atoms"
    UNKNOWN = "unknown"


@dataclass(frozen=True)
class PredictedPoint:
    """A candidate limit point with the strongest verdict we can certify."""

    root: RootRecord
    classification: EquilibriumClass | None
    verdict: str
    theorem: str | None


@dataclass(frozen=True)
class ExcludedPoint:
    """A drift root ruled out as a limit, with the excluding result."""

    root: RootRecord
    classification: EquilibriumClass | None
    theorem: str


@dataclass(frozen=True)
class LimitPrediction:
    """What the analysis says about the long-run white proportion.

    ``POINT_MASS_SET``: the limit exists and lies among ``points`` (with
    per-point verdicts); ``excluded`` lists drift roots proven impossible.
    ``BETA_DISTRIBUTION``: the limit law is the Beta distribution with
    ``beta_params``. ``CONTINUOUS_NO_ATOMS``: a limit exists and its law has
    no interior point masses. ``UNKNOWN``: no certified statement.
    """

    kind: PredictionKind
    points: tuple[PredictedPoint, ...] = ()
    excluded: tuple[ExcludedPoint, ...] = ()
    beta_params: tuple[Fraction, Fraction] | None = None
    theorem: str | None = None
    notes: tuple[str, ...] = ()

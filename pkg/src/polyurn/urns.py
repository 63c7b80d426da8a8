"""Two-color reinforcement urn models with exact rational arithmetic.

An urn holds white and black balls (counts may be any nonnegative rationals).
Each step draws either one ball or an unordered pair (with or without
replacement), looks the outcome up in a nonnegative replacement matrix, and
adds the prescribed balls. Everything observable about a single step - the
outcome distribution, the conditional moments of the white-proportion
increment, and their closed forms - is computed here exactly.

Writing ``Z`` for the white proportion and ``T`` for the total count, one step
changes ``Z`` by ``(Y / T_next)`` where ``Y = dW - Z * dT`` is the centered
white increment. Its conditional mean is ``drift(Z)`` (a polynomial, plus an
exactly known ``O(1/T)`` remainder for pair draws without replacement), and
its conditional variance is ``error(Z) + O(1/T)`` for another polynomial
``error``. Those two polynomials drive all limit analysis downstream.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .ratpoly import RatPoly, format_rational, parse_rational

ONE_DRAW = "one-draw"
TWO_DRAW = "two-draw"
WITH_REPLACEMENT = "with"
WITHOUT_REPLACEMENT = "without"

_KINDS = (ONE_DRAW, TWO_DRAW)
_SAMPLINGS = (WITH_REPLACEMENT, WITHOUT_REPLACEMENT)


# ---------------------------------------------------------------------------
# Replacement matrices and models
# ---------------------------------------------------------------------------

def _check_entries(entries: Sequence[Fraction]) -> None:
    if any(v < 0 for v in entries):
        raise ValueError("replacement matrix entries must be nonnegative")
    if all(v == 0 for v in entries):
        raise ValueError("replacement matrix must have a positive entry")


@dataclass(frozen=True)
class OneDrawMatrix:
    """Replacement rule for single draws.

    Drawing a white ball adds ``w_add_white`` white and ``w_add_black`` black
    balls; drawing a black ball adds ``b_add_white`` white and ``b_add_black``
    black balls. Entries are nonnegative rationals, not all zero.
    """

    w_add_white: Fraction
    w_add_black: Fraction
    b_add_white: Fraction
    b_add_black: Fraction

    def __post_init__(self):
        for name in ("w_add_white", "w_add_black", "b_add_white", "b_add_black"):
            object.__setattr__(self, name, parse_rational(getattr(self, name)))
        _check_entries(self.entries)

    @property
    def entries(self) -> tuple[Fraction, ...]:
        return (self.w_add_white, self.w_add_black, self.b_add_white, self.b_add_black)

    @property
    def row_sums(self) -> tuple[Fraction, Fraction]:
        return (self.w_add_white + self.w_add_black, self.b_add_white + self.b_add_black)

    def color_swap(self) -> "OneDrawMatrix":
        """The same rule with the roles of white and black exchanged."""
        a, b, c, d = self.entries
        return OneDrawMatrix(d, c, b, a)

    @staticmethod
    def from_entries(entries: Sequence) -> "OneDrawMatrix":
        if len(entries) != 4:
            raise ValueError("a single-draw matrix needs exactly 4 entries")
        return OneDrawMatrix(*entries)


@dataclass(frozen=True)
class TwoDrawMatrix:
    """Replacement rule for unordered pair draws.

    The drawn pair is white-white, mixed, or black-black; the corresponding
    row says how many white and black balls to add. Entries are nonnegative
    rationals, not all zero.
    """

    ww_add_white: Fraction
    ww_add_black: Fraction
    wb_add_white: Fraction
    wb_add_black: Fraction
    bb_add_white: Fraction
    bb_add_black: Fraction

    def __post_init__(self):
        for name in (
            "ww_add_white", "ww_add_black", "wb_add_white",
            "wb_add_black", "bb_add_white", "bb_add_black",
        ):
            object.__setattr__(self, name, parse_rational(getattr(self, name)))
        _check_entries(self.entries)

    @property
    def entries(self) -> tuple[Fraction, ...]:
        return (
            self.ww_add_white, self.ww_add_black,
            self.wb_add_white, self.wb_add_black,
            self.bb_add_white, self.bb_add_black,
        )

    @property
    def row_sums(self) -> tuple[Fraction, Fraction, Fraction]:
        a, b, c, d, e, f = self.entries
        return (a + b, c + d, e + f)

    def color_swap(self) -> "TwoDrawMatrix":
        """The same rule with the roles of white and black exchanged."""
        a, b, c, d, e, f = self.entries
        return TwoDrawMatrix(f, e, d, c, b, a)

    @staticmethod
    def from_entries(entries: Sequence) -> "TwoDrawMatrix":
        if len(entries) != 6:
            raise ValueError("a pair-draw matrix needs exactly 6 entries")
        return TwoDrawMatrix(*entries)


@dataclass(frozen=True)
class UrnModel:
    """A complete urn specification: draw rule, replacement matrix, start.

    ``sampling`` selects pair draws with or without replacement; it is
    meaningful only for pair-draw models (single draws always return the
    drawn ball).
    """

    kind: str
    matrix: OneDrawMatrix | TwoDrawMatrix
    w0: Fraction
    b0: Fraction
    sampling: str = WITHOUT_REPLACEMENT

    def __post_init__(self):
        if self.kind not in _KINDS:
            raise ValueError(f"unknown model kind: {self.kind!r}")
        expected = OneDrawMatrix if self.kind == ONE_DRAW else TwoDrawMatrix
        if not isinstance(self.matrix, expected):
            raise ValueError(f"matrix type does not match model kind {self.kind!r}")
        object.__setattr__(self, "w0", parse_rational(self.w0))
        object.__setattr__(self, "b0", parse_rational(self.b0))
        if self.w0 < 0 or self.b0 < 0:
            raise ValueError("initial counts must be nonnegative")
        if self.w0 + self.b0 <= 0:
            raise ValueError("the urn must start nonempty")
        if self.sampling not in _SAMPLINGS:
            raise ValueError(f"unknown sampling mode: {self.sampling!r}")
        if self.kind == ONE_DRAW:
            object.__setattr__(self, "sampling", WITH_REPLACEMENT)

    @property
    def initial_state(self) -> "UrnState":
        return UrnState(self.w0, self.b0, 0)

    def color_swap(self) -> "UrnModel":
        return UrnModel(self.kind, self.matrix.color_swap(), self.b0, self.w0, self.sampling)

    def validate_for_simulation(self) -> None:
        """Checks required before stepping (not needed for pure analysis)."""
        if self.kind == TWO_DRAW and self.sampling == WITHOUT_REPLACEMENT:
            if self.w0 < 2 or self.b0 < 2:
                raise ValueError(
                    "pair draws without replacement need w0 >= 2 and b0 >= 2 "
                    "so every pair type is drawable from the start"
                )


def one_draw_model(entries: Sequence, w0=1, b0=1) -> UrnModel:
    return UrnModel(ONE_DRAW, OneDrawMatrix.from_entries(entries), w0, b0)


def two_draw_model(entries: Sequence, w0=2, b0=2, sampling=WITHOUT_REPLACEMENT) -> UrnModel:
    return UrnModel(TWO_DRAW, TwoDrawMatrix.from_entries(entries), w0, b0, sampling)


# ---------------------------------------------------------------------------
# States and one-step outcome distributions
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class UrnState:
    """Exact urn contents after ``step`` draws."""

    white: Fraction
    black: Fraction
    step: int = 0

    def __post_init__(self):
        object.__setattr__(self, "white", parse_rational(self.white))
        object.__setattr__(self, "black", parse_rational(self.black))
        if self.white < 0 or self.black < 0:
            raise ValueError("ball counts must be nonnegative")
        if self.white + self.black <= 0:
            raise ValueError("the urn must be nonempty")

    @property
    def total(self) -> Fraction:
        return self.white + self.black

    @property
    def proportion_white(self) -> Fraction:
        return self.white / self.total


@dataclass(frozen=True)
class StepOutcome:
    """One possible draw outcome with its exact probability and effect."""

    label: str  # "W" / "B" for single draws; "WW" / "WB" / "BB" for pairs
    probability: Fraction
    add_white: Fraction
    add_black: Fraction


def step_distribution(state: UrnState, model: UrnModel) -> tuple[StepOutcome, ...]:
    """Exact outcome distribution for one step from ``state``.

    Probabilities are nonnegative rationals summing to one. Pair draws
    without replacement require a total of at least 2 and enough balls of
    each present color for the pair counts to make sense.
    """
    w, b, t = state.white, state.black, state.total
    m = model.matrix
    if model.kind == ONE_DRAW:
        outcomes = (
            StepOutcome("W", w / t, m.w_add_white, m.w_add_black),
            StepOutcome("B", b / t, m.b_add_white, m.b_add_black),
        )
    elif model.sampling == WITH_REPLACEMENT:
        z = state.proportion_white
        outcomes = (
            StepOutcome("WW", z * z, m.ww_add_white, m.ww_add_black),
            StepOutcome("WB", 2 * z * (1 - z), m.wb_add_white, m.wb_add_black),
            StepOutcome("BB", (1 - z) * (1 - z), m.bb_add_white, m.bb_add_black),
        )
    else:
        if t < 2:
            raise ValueError("pair draws without replacement need a total of at least 2")
        denom = t * (t - 1)
        outcomes = (
            StepOutcome("WW", w * (w - 1) / denom, m.ww_add_white, m.ww_add_black),
            StepOutcome("WB", 2 * w * b / denom, m.wb_add_white, m.wb_add_black),
            StepOutcome("BB", b * (b - 1) / denom, m.bb_add_white, m.bb_add_black),
        )
    if any(o.probability < 0 for o in outcomes):
        raise ValueError(
            "pair draws without replacement are undefined for fractional counts below 1"
        )
    return outcomes


# ---------------------------------------------------------------------------
# Drift and noise closed forms
# ---------------------------------------------------------------------------

def drift_one(m: OneDrawMatrix) -> RatPoly:
    """Conditional mean of the centered white increment for single draws.

    As a polynomial in the white proportion ``x``:
    ``(c+d-a-b) x^2 + (a-2c-d) x + c`` with rows ``(a, b)`` on white and
    ``(c, d)`` on black. It is exact at every total (no remainder term).
    """
    a, b, c, d = m.entries
    return RatPoly([c, a - 2 * c - d, c + d - a - b])


def drift_two(m: TwoDrawMatrix) -> RatPoly:
    """Conditional mean of the centered white increment for pair draws.

    As a polynomial in the white proportion ``x`` it is the cubic
    ``alpha x^3 + beta x^2 + gamma x + e`` with::

        alpha = -a - b + 2c + 2d - e - f
        beta  = a - 4c - 2d + 3e + 2f
        gamma = 2c - 3e - f

    For pair draws *with* replacement this mean is exact; *without*
    replacement the exact mean is this polynomial plus the remainder
    returned by :func:`mean_noise_residual_two`.
    """
    a, b, c, d, e, f = m.entries
    alpha = -a - b + 2 * c + 2 * d - e - f
    beta = a - 4 * c - 2 * d + 3 * e + 2 * f
    gamma = 2 * c - 3 * e - f
    return RatPoly([e, gamma, beta, alpha])


def drift_for(model: UrnModel) -> RatPoly:
    return drift_one(model.matrix) if model.kind == ONE_DRAW else drift_two(model.matrix)


@dataclass(frozen=True)
class OneDrawNoise:
    """Noise structure of single draws.

    ``gap`` is the difference between the centered white increments of the
    two outcomes, ``y_white - y_black``, as a linear polynomial in the white
    proportion; the conditional variance of the step noise is exactly
    ``error(x) = x (1-x) gap(x)^2``.
    """

    gap: RatPoly
    error: RatPoly


def error_one(m: OneDrawMatrix) -> OneDrawNoise:
    a, b, c, d = m.entries
    gap = RatPoly([a - c, c + d - a - b])
    x_one_minus_x = RatPoly([0, 1, -1])
    return OneDrawNoise(gap=gap, error=x_one_minus_x * gap * gap)


@dataclass(frozen=True)
class TwoDrawNoise:
    """Noise structure of pair draws.

    Write ``y_ww``, ``y_wb``, ``y_bb`` for the centered white increments of
    the three outcomes (each linear in the white proportion ``x``). Then:

    - ``diff_ww_bb  = y_ww - y_bb``
    - ``diff_wb_bb  = y_wb - y_bb``
    - ``second_diff = y_ww - 2 y_wb + y_bb`` (= ``diff_ww_bb - 2 diff_wb_bb``)

    ``variance_factor`` is the quartic
    ``2 x^2 (second_diff + diff_wb_bb)^2 + x(1-x) diff_ww_bb^2
    + 2 (1-x)^2 diff_wb_bb^2`` and the leading-order conditional variance of
    the step noise is ``error(x) = x (1-x) variance_factor(x)`` (exact for
    sampling with replacement; plus O(1/total) without replacement).
    """

    diff_ww_bb: RatPoly
    diff_wb_bb: RatPoly
    second_diff: RatPoly
    variance_factor: RatPoly
    error: RatPoly


def error_two(m: TwoDrawMatrix) -> TwoDrawNoise:
    a, b, c, d, e, f = m.entries
    diff_ww_bb = RatPoly([a - e, e + f - a - b])
    diff_wb_bb = RatPoly([c - e, e + f - c - d])
    second_diff = diff_ww_bb - 2 * diff_wb_bb
    x = RatPoly([0, 1])
    one_minus_x = RatPoly([1, -1])
    mixed = second_diff + diff_wb_bb
    variance_factor = (
        2 * x * x * mixed * mixed
        + x * one_minus_x * diff_ww_bb * diff_ww_bb
        + 2 * one_minus_x * one_minus_x * diff_wb_bb * diff_wb_bb
    )
    return TwoDrawNoise(
        diff_ww_bb=diff_ww_bb,
        diff_wb_bb=diff_wb_bb,
        second_diff=second_diff,
        variance_factor=variance_factor,
        error=x * one_minus_x * variance_factor,
    )


def error_for(model: UrnModel) -> RatPoly:
    """The leading-order conditional variance polynomial of the step noise."""
    if model.kind == ONE_DRAW:
        return error_one(model.matrix).error
    return error_two(model.matrix).error


# ---------------------------------------------------------------------------
# Conditional-moment oracle (brute-force enumeration of outcomes)
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ExactMoments:
    """Exact conditional moments of one step from a given state.

    With ``Y = dW - Z dT`` the centered white increment, ``U`` the noise
    ``Y - drift(Z)``, and ``T_next`` the total after the step:

    - ``mean_dz``: expected change of the white proportion
    - ``mean_y``: expected ``Y``
    - ``mean_u``: expected ``U`` (zero for single draws and pair draws with
      replacement; an explicit O(1/T) remainder otherwise)
    - ``mean_u_sq``: expected ``U^2``
    - ``mean_u_over_next_t``: expected ``U / T_next`` (the per-step bias of
      the proportion increment around ``drift(Z)/T_next``)
    """

    mean_dz: Fraction
    mean_y: Fraction
    mean_u: Fraction
    mean_u_sq: Fraction
    mean_u_over_next_t: Fraction


def cond_moments_oracle(state: UrnState, model: UrnModel) -> ExactMoments:
    """Moments by direct enumeration of the outcome distribution (no closed forms)."""
    z = state.proportion_white
    t = state.total
    fz = drift_for(model).evaluate(z)
    mean_dz = Fraction(0)
    mean_y = Fraction(0)
    mean_u = Fraction(0)
    mean_u_sq = Fraction(0)
    mean_u_over_next_t = Fraction(0)
    for outcome in step_distribution(state, model):
        dt = outcome.add_white + outcome.add_black
        y = outcome.add_white - z * dt
        u = y - fz
        t_next = t + dt
        p = outcome.probability
        mean_dz += p * y / t_next
        mean_y += p * y
        mean_u += p * u
        mean_u_sq += p * u * u
        mean_u_over_next_t += p * u / t_next
    return ExactMoments(mean_dz, mean_y, mean_u, mean_u_sq, mean_u_over_next_t)


# ---------------------------------------------------------------------------
# Closed forms for the per-step bias E[U / T_next]
# ---------------------------------------------------------------------------

def cond_iv_closed_form_one(state: UrnState, m: OneDrawMatrix) -> Fraction:
    """Exact ``E[U / T_next]`` for single draws.

    Equals ``(C1 z + C2 z^2 + C3 z^3)(c+d-a-b) / ((T+a+b)(T+c+d))`` with
    ``C1 = a-c``, ``C2 = 2c+d-2a-b``, ``C3 = a+b-c-d``.
    """
    a, b, c, d = m.entries
    z, t = state.proportion_white, state.total
    c1 = a - c
    c2 = 2 * c + d - 2 * a - b
    c3 = a + b - c - d
    numerator = (c1 * z + c2 * z * z + c3 * z ** 3) * (c + d - a - b)
    return numerator / ((t + a + b) * (t + c + d))


def cond_iv_polys(m: TwoDrawMatrix) -> tuple[RatPoly, RatPoly, RatPoly]:
    """Per-outcome numerators of the pair-draw bias ``E[U / T_next]``.

    Splitting the expectation over the three pair outcomes gives exactly

    ``E[U/T_next] = p1(z)/(T+a+b) + p2(z)/(T+c+d) + p3(z)/(T+e+f)``

    (plus the remainder terms of :func:`cond_iv_remainders` when sampling
    without replacement). The three returned polynomials have degree at most
    five and their coefficients sum to zero power by power, which makes the
    whole bias collapse to ``O(1/T^2)``.
    """
    a, b, c, d, e, f = m.entries
    alpha = -a - b + 2 * c + 2 * d - e - f
    beta = a - 4 * c - 2 * d + 3 * e + 2 * f
    gamma = 2 * c - 3 * e - f
    p1 = RatPoly([
        0,
        0,
        a - e,
        -gamma - a - b,
        -beta,
        -alpha,
    ])
    p2 = RatPoly([
        0,
        2 * c - 2 * e,
        -2 * gamma - 4 * c - 2 * d + 2 * e,
        2 * gamma + 2 * c + 2 * d - 2 * beta,
        2 * beta - 2 * alpha,
        2 * alpha,
    ])
    p3 = RatPoly([
        0,
        -gamma - e - f,
        2 * gamma + 2 * e + 2 * f - beta,
        2 * beta - alpha - gamma - e - f,
        2 * alpha - beta,
        -alpha,
    ])
    return p1, p2, p3


def cond_iv_remainders(state: UrnState, m: TwoDrawMatrix) -> tuple[Fraction, Fraction, Fraction]:
    """Sampling-without-replacement corrections to the pair-draw bias.

    These are the exact extra terms (one per pair outcome, same denominators
    as in :func:`cond_iv_polys`) created by drawing the pair without
    replacement; each is ``O(1/T)`` with an explicit ``z(1-z)/(T-1)`` factor.
    """
    a, b, c, d, e, f = m.entries
    alpha = -a - b + 2 * c + 2 * d - e - f
    beta = a - 4 * c - 2 * d + 3 * e + 2 * f
    gamma = 2 * c - 3 * e - f
    z, t = state.proportion_white, state.total
    if t <= 1:
        raise ValueError("pair draws without replacement need a total above 1")
    scale = z * (1 - z) / (t - 1)
    r1 = scale * ((e - a) + (gamma + a + b) * z + beta * z * z + alpha * z ** 3)
    r2 = scale * 2 * ((c - e) - (gamma + c + d) * z - beta * z * z - alpha * z ** 3)
    r3 = scale * ((gamma + e + f) * z + beta * z * z + alpha * z ** 3)
    return r1, r2, r3


def cond_iv_closed_form_two(state: UrnState, m: TwoDrawMatrix, sampling: str) -> Fraction:
    """Exact ``E[U / T_next]`` for pair draws, by the split closed form."""
    p1, p2, p3 = cond_iv_polys(m)
    s1, s2, s3 = m.row_sums
    z, t = state.proportion_white, state.total
    parts = [p1.evaluate(z), p2.evaluate(z), p3.evaluate(z)]
    if sampling == WITHOUT_REPLACEMENT:
        r1, r2, r3 = cond_iv_remainders(state, m)
        parts = [parts[0] + r1, parts[1] + r2, parts[2] + r3]
    return parts[0] / (t + s1) + parts[1] / (t + s2) + parts[2] / (t + s3)


def mean_noise_residual_two(state: UrnState, m: TwoDrawMatrix) -> Fraction:
    """Exact ``E[U]`` for pair draws without replacement.

    Equals ``-z(1-z)(a - 2c + e + alpha z) / (T - 1)``; with replacement the
    noise has mean exactly zero.
    """
    a, b, c, d, e, f = m.entries
    alpha = -a - b + 2 * c + 2 * d - e - f
    z, t = state.proportion_white, state.total
    if t <= 1:
        raise ValueError("pair draws without replacement need a total above 1")
    return -z * (1 - z) * (a - 2 * c + e + alpha * z) / (t - 1)


def bias_bound(model: UrnModel) -> Fraction:
    """A constant ``K`` with ``|E[U / T_next]| <= K / T^2`` at every state.

    Single draws: combining the two outcome denominators over the common
    product gives numerator ``(c+d-a-b)(C1 z + C2 z^2 + C3 z^3)`` and
    denominator at least ``T^2``, so the coefficient-magnitude sum works.

    Pair draws: with the zero-column-sum property of the split numerators,
    combining the three denominators gives numerator ``sum_k (c1_k T + c2_k)
    z^k`` over a denominator of at least ``T^3``, whence the bound
    ``(sum|c1_k| + sum|c2_k|) / T^2`` for ``T >= 1``. Sampling without
    replacement adds remainder terms bounded by ``z(1-z) <= 1/4`` over
    ``(T-1)(T+s) >= T^2/2`` for ``T >= 2``. The result is floored at 1 so it
    is always a positive usable constant (noise-free rules give 0).
    """
    if model.kind == ONE_DRAW:
        a, b, c, d = model.matrix.entries
        scale = abs(c + d - a - b)
        total = scale * (abs(a - c) + abs(2 * c + d - 2 * a - b) + abs(a + b - c - d))
        return max(total, Fraction(1))
    m = model.matrix
    polys = cond_iv_polys(m)
    s = m.row_sums
    s_total = s[0] + s[1] + s[2]
    degree = max(p.degree for p in polys)
    total = Fraction(0)
    for k in range(degree + 1):
        coeffs = [p.coeff(k) for p in polys]
        c1_k = sum(cv * (s_total - sj) for cv, sj in zip(coeffs, s))
        prods = (s[1] * s[2], s[0] * s[2], s[0] * s[1])
        c2_k = sum(cv * pr for cv, pr in zip(coeffs, prods))
        total += abs(c1_k) + abs(c2_k)
    if model.sampling == WITHOUT_REPLACEMENT:
        a, b, c, d, e, f = m.entries
        alpha = -a - b + 2 * c + 2 * d - e - f
        beta = a - 4 * c - 2 * d + 3 * e + 2 * f
        gamma = 2 * c - 3 * e - f
        bracket_sums = (
            abs(e - a) + abs(gamma + a + b) + abs(beta) + abs(alpha),
            2 * (abs(c - e) + abs(gamma + c + d) + abs(beta) + abs(alpha)),
            abs(gamma + e + f) + abs(beta) + abs(alpha),
        )
        total += Fraction(1, 2) * sum(bracket_sums)
    return max(total, Fraction(1))


# ---------------------------------------------------------------------------
# Attainability and boundary-divergence flags
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class AttainableInterval:
    """Interval of proportions the process can approach in the long run.

    For pair draws this is the closed span of the per-outcome white ratios
    (added white over added total, per matrix row); for single draws every
    interior proportion is approachable, encoded as the open unit interval.
    ``closed_bounds`` records which reading applies.
    """

    lower: Fraction
    upper: Fraction
    closed_bounds: bool

    def contains_for_stable(self, x: Fraction) -> bool:
        if self.closed_bounds:
            return self.lower <= x <= self.upper
        return self.lower < x < self.upper

    def contains_strictly(self, x: Fraction) -> bool:
        return self.lower < x < self.upper


def attainable_interval(model: UrnModel) -> AttainableInterval:
    """Attainable-proportion interval; requires every row sum positive."""
    if min(model.matrix.row_sums) <= 0:
        raise ValueError("attainability needs every matrix row to add at least one ball")
    if model.kind == ONE_DRAW:
        return AttainableInterval(Fraction(0), Fraction(1), closed_bounds=False)
    a, b, c, d, e, f = model.matrix.entries
    ratios = (a / (a + b), c / (c + d), e / (e + f))
    return AttainableInterval(min(ratios), max(ratios), closed_bounds=True)


def white_count_diverges_at_zero(model: UrnModel) -> bool:
    """Whether the white count must grow without bound near proportion 0.

    Near zero almost every draw involves black balls, so white grows if those
    outcomes add white; failing that, for pair draws the total can only grow
    through white-involving outcomes, whose own white addition then feeds the
    count.
    """
    if model.kind == ONE_DRAW:
        return model.matrix.w_add_white > 0
    a, b, c, d, e, f = model.matrix.entries
    if c > 0:
        return True
    return c == 0 and e == 0 and f == 0 and a > 0


def black_count_diverges_at_one(model: UrnModel) -> bool:
    """Mirror flag at proportion 1, by the color-swap symmetry."""
    return white_count_diverges_at_zero(model.color_swap())


# ---------------------------------------------------------------------------
# Model metadata
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ModelMeta:
    """Summary constants used by the convergence framework.

    ``t_min``/``t_max`` bound the per-step growth of the total;
    ``bias_bound`` is the constant of :func:`bias_bound`;
    ``degenerate_case`` is 0 for fully supported models (every row sum
    positive) and otherwise identifies which rows are inactive (see
    :func:`degenerate_case_id`). The divergence flags feed the boundary
    non-convergence test.
    """

    kind: str
    sampling: str
    t_min: Fraction
    t_max: Fraction
    bias_bound: Fraction
    degenerate_case: int
    white_count_diverges_at_zero: bool
    black_count_diverges_at_one: bool


def degenerate_case_id(model: UrnModel) -> int:
    """Which rows of the matrix add no balls (0 when none).

    Pair draws: 1 = only the white-white row is active; 2 = only the
    black-black row; 3 = only the mixed row; 4 = the white-white row is
    inactive; 5 = the black-black row is inactive; 6 = the mixed row is
    inactive. Single draws reuse 1 (only the white row active) and 2 (only
    the black row active).
    """
    sums = model.matrix.row_sums
    if min(sums) > 0:
        return 0
    if model.kind == ONE_DRAW:
        return 1 if sums[1] == 0 else 2
    ww, wb, bb = (s == 0 for s in sums)
    if wb and bb:
        return 1
    if ww and wb:
        return 2
    if ww and bb:
        return 3
    if ww:
        return 4
    if bb:
        return 5
    return 6


def model_meta(model: UrnModel) -> ModelMeta:
    sums = model.matrix.row_sums
    return ModelMeta(
        kind=model.kind,
        sampling=model.sampling,
        t_min=min(sums),
        t_max=max(sums),
        bias_bound=bias_bound(model),
        degenerate_case=degenerate_case_id(model),
        white_count_diverges_at_zero=white_count_diverges_at_zero(model),
        black_count_diverges_at_one=black_count_diverges_at_one(model),
    )


# ---------------------------------------------------------------------------
# Reductions for models with an inactive row (degenerate cases)
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class DegenerateReduction:
    """Exact reduction of a model with inactive matrix rows.

    - Cases 1-3 (single active row): the proportion converges almost surely
      to ``fixed_limit``, the active row's white ratio.
    - Cases 4 and 5 (pair draws, white-white resp. black-black row inactive):
      steps that hit the inactive row change nothing, so the process embeds
      into a chain over the remaining outcomes. In the reparametrized
      coordinate the embedded drift is the quadratic ``reduced_drift`` in the
      variable ``y``, related to the original proportion by ``x = y/(2-y)``
      (case 4) or its color-swapped mirror (case 5).
    - Case 6 (mixed row inactive): the embedded drift is the original cubic
      divided by the positive weight ``weight_denominator`` (values
      ``x^2 + (1-x)^2``), so its zeros and signs in the unit interval match
      the cubic's.
    """

    case_id: int
    fixed_limit: Fraction | None = None
    reduced_drift: RatPoly | None = None
    weight_denominator: RatPoly | None = None
    variable_map: str = "identity"


def _case4_reduced_drift(m: TwoDrawMatrix) -> RatPoly:
    a, b, c, d, e, f = m.entries
    return RatPoly([2 * e, 2 * c - 4 * e - f, -2 * c - d + 2 * e + f])


def degenerate_reduce(model: UrnModel) -> DegenerateReduction:
    """Reduction for a model with at least one inactive row (raises otherwise)."""
    case = degenerate_case_id(model)
    if case == 0:
        raise ValueError("the model has no inactive matrix row; nothing to reduce")
    m = model.matrix
    if model.kind == ONE_DRAW:
        a, b, c, d = m.entries
        limit = a / (a + b) if case == 1 else c / (c + d)
        return DegenerateReduction(case_id=case, fixed_limit=limit)
    a, b, c, d, e, f = m.entries
    if case == 1:
        return DegenerateReduction(case_id=1, fixed_limit=a / (a + b))
    if case == 2:
        return DegenerateReduction(case_id=2, fixed_limit=e / (e + f))
    if case == 3:
        return DegenerateReduction(case_id=3, fixed_limit=c / (c + d))
    if case == 4:
        return DegenerateReduction(
            case_id=4,
            reduced_drift=_case4_reduced_drift(m),
            variable_map="x = y/(2-y)",
        )
    if case == 5:
        return DegenerateReduction(
            case_id=5,
            reduced_drift=_case4_reduced_drift(m.color_swap()),
            variable_map="x = 1 - y/(2-y)",
        )
    return DegenerateReduction(
        case_id=6,
        reduced_drift=drift_two(m),
        weight_denominator=RatPoly([1, -2, 2]),
        variable_map="identity",
    )


def degenerate_map_back(reduction: DegenerateReduction, y: Fraction) -> Fraction:
    """Map a reduced-coordinate value back to an original proportion."""
    if reduction.case_id == 4:
        return y / (2 - y)
    if reduction.case_id == 5:
        return 1 - y / (2 - y)
    return y


def degenerate_identity_gap(model: UrnModel, x: Fraction) -> Fraction:
    """Exact defect of the reduction identity at ``x`` (zero when correct).

    Cases 4/5 check that the reduced quadratic pulled back through the
    variable change reproduces the cubic drift:
    ``(1+x)^2/2 * reduced(2x/(1+x)) == drift(x)/(1-x)`` (mirrored for case
    5). The other cases check the outcome-weighted row identity
    ``drift(x) == x^2 y_ww(x) + 2x(1-x) y_wb(x) + (1-x)^2 y_bb(x)``.
    """
    reduction = degenerate_reduce(model)
    if model.kind != TWO_DRAW:
        raise ValueError("the identity check applies to pair-draw models")
    m = model.matrix
    if reduction.case_id in (4, 5):
        if reduction.case_id == 5:
            m = m.color_swap()
            x = 1 - x
        if x == 1:
            raise ValueError("the pullback identity is stated on [0, 1)")
        g = drift_two(m)
        y = 2 * x / (1 + x)
        lhs = Fraction(1, 2) * (1 + x) ** 2 * reduction.reduced_drift.evaluate(y)
        return lhs - g.evaluate(x) / (1 - x)
    a, b, c, d, e, f = m.entries
    y_ww = a - (a + b) * x
    y_wb = c - (c + d) * x
    y_bb = e - (e + f) * x
    weighted = x * x * y_ww + 2 * x * (1 - x) * y_wb + (1 - x) * (1 - x) * y_bb
    return drift_two(m).evaluate(x) - weighted


def drift_one_degenerate(m: OneDrawMatrix) -> Fraction:
    """Almost-sure limit of a single-draw model with an inactive row.

    With the black row inactive (``c = d = 0``) the drift collapses to
    ``-(a+b) x^2 + a x``, whose interior behavior drives the proportion to
    ``a/(a+b)`` almost surely; with the white row inactive the limit is
    ``c/(c+d)`` by the mirrored argument.
    """
    a, b, c, d = m.entries
    if c + d == 0 and a + b > 0:
        return a / (a + b)
    if a + b == 0 and c + d > 0:
        return c / (c + d)
    raise ValueError("the matrix has no inactive row")


# ---------------------------------------------------------------------------
# JSON model files
# ---------------------------------------------------------------------------

def model_to_dict(model: UrnModel) -> dict:
    """JSON-ready dict; every rational is a ``"p/q"`` string."""
    entries = model.matrix.entries
    rows = [
        [format_rational(entries[i]), format_rational(entries[i + 1])]
        for i in range(0, len(entries), 2)
    ]
    out = {
        "model": model.kind,
        "matrix": rows,
        "w0": format_rational(model.w0),
        "b0": format_rational(model.b0),
    }
    if model.kind == TWO_DRAW:
        out["sampling"] = model.sampling
    return out


def model_from_dict(data) -> UrnModel:
    """Parse and validate the JSON model schema (see :func:`model_to_dict`)."""
    if not isinstance(data, dict):
        raise ValueError("a model file must contain a JSON object")
    unknown = set(data) - {"model", "matrix", "w0", "b0", "sampling"}
    if unknown:
        raise ValueError(f"unknown model keys: {sorted(unknown)}")
    kind = data.get("model")
    if kind not in _KINDS:
        raise ValueError(f'"model" must be "{ONE_DRAW}" or "{TWO_DRAW}"')
    matrix = data.get("matrix")
    rows_needed = 2 if kind == ONE_DRAW else 3
    if (
        not isinstance(matrix, list)
        or len(matrix) != rows_needed
        or any(not isinstance(row, list) or len(row) != 2 for row in matrix)
    ):
        raise ValueError(f'"matrix" must be a list of {rows_needed} rows of 2 entries')
    entries = [parse_rational(v) for row in matrix for v in row]
    w0 = parse_rational(data.get("w0", 1 if kind == ONE_DRAW else 2))
    b0 = parse_rational(data.get("b0", 1 if kind == ONE_DRAW else 2))
    sampling = data.get("sampling", WITHOUT_REPLACEMENT)
    if sampling not in _SAMPLINGS:
        raise ValueError(f'"sampling" must be "{WITH_REPLACEMENT}" or "{WITHOUT_REPLACEMENT}"')
    if kind == ONE_DRAW:
        return one_draw_model(entries, w0, b0)
    return two_draw_model(entries, w0, b0, sampling)


def load_model(path) -> UrnModel:
    """Read a model from a JSON file path."""
    with open(path, "r", encoding="utf-8") as fh:
        try:
            data = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ValueError(f"invalid JSON in model file {path}: {exc}") from exc
    return model_from_dict(data)

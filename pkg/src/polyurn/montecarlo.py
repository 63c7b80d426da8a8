"""Deterministic simulation and verification of urn limit predictions.

Simulation is exact: each step compares one 53-bit uniform draw against the
exact rational outcome probabilities (by integer cross-multiplication, never
floating point), so a run is a pure function of ``(model, steps, seed,
replicate index)``. Replicates use independent streams derived by an
avalanche mix of the base seed and the replicate index, which makes results
independent of execution order and parallelism: running on one worker or
many yields byte-identical output.

Verification compares the empirical final proportions of many replicates
against a :class:`~polyurn.stability.LimitPrediction`: point predictions via
clustering around the predicted and excluded points, Beta-law predictions
via a Kolmogorov-Smirnov test with the exact Beta distribution function.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction

from .analysis import predict_limit, prediction_to_dict
from .stability import LimitPrediction, PredictionKind
from .urns import (
    ONE_DRAW,
    WITHOUT_REPLACEMENT,
    UrnModel,
    UrnState,
    step_distribution,
)
from .ratpoly import format_rational

import random

_MASK64 = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15
_UNIT_BITS = 53
_UNIT = 1 << _UNIT_BITS


def _mix64(x: int) -> int:
    """Avalanche mix of a 64-bit value (splitmix-style finalizer)."""
    x &= _MASK64
    x = ((x ^ (x >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    x = ((x ^ (x >> 27)) * 0x94D049BB133111EB) & _MASK64
    return x ^ (x >> 31)


def replicate_stream_seed(base_seed: int, replicate_index: int) -> int:
    """Seed of the independent random stream used by one replicate."""
    if replicate_index < 0:
        raise ValueError("replicate_index must be nonnegative")
    start = _mix64((base_seed & _MASK64) ^ _GOLDEN)
    return _mix64((start + (replicate_index + 1) * _GOLDEN) & _MASK64)


def replicate_rng(base_seed: int, replicate_index: int) -> random.Random:
    """The generator for one replicate (one 53-bit draw per step)."""
    return random.Random(replicate_stream_seed(base_seed, replicate_index))


# ---------------------------------------------------------------------------
# Stepping
# ---------------------------------------------------------------------------

def step(state: UrnState, model: UrnModel, rng: random.Random) -> UrnState:
    """Advance one step, consuming exactly one 53-bit draw from ``rng``.

    The draw ``u`` selects the outcome whose exact cumulative probability
    first exceeds ``u / 2**53``; the comparison is exact.
    """
    u = rng.getrandbits(_UNIT_BITS)
    cumulative = Fraction(0)
    for outcome in step_distribution(state, model):
        cumulative += outcome.probability
        if Fraction(u, _UNIT) < cumulative:
            return UrnState(
                state.white + outcome.add_white,
                state.black + outcome.add_black,
                state.step + 1,
            )
    raise ArithmeticError("outcome probabilities do not reach 1")


@dataclass(frozen=True)
class SimConfig:
    """A reproducible simulation request."""

    model: UrnModel
    steps: int
    replicates: int
    base_seed: int = 0
    record_trajectory: bool = False
    trajectory_stride: int = 100

    def __post_init__(self):
        if self.steps < 0:
            raise ValueError("steps must be nonnegative")
        if self.replicates < 0:
            raise ValueError("replicates must be nonnegative")
        if self.trajectory_stride <= 0:
            raise ValueError("trajectory_stride must be positive")


@dataclass(frozen=True)
class ReplicateResult:
    """Final state (and optional trajectory) of one replicate."""

    replicate_index: int
    steps: int
    final_white: Fraction
    final_black: Fraction
    trajectory: tuple[tuple[int, float], ...] | None = None

    @property
    def final_total(self) -> Fraction:
        return self.final_white + self.final_black

    @property
    def final_z(self) -> float:
        return float(self.final_white / self.final_total)


def _integer_setup(model: UrnModel):
    """Rescaled integer counts and rows when the fast path is exact.

    Outcome probabilities depend only on the proportion for single draws and
    for pair draws with replacement, so rescaling all quantities by the
    common denominator changes nothing about the drawn path. Pair draws
    without replacement compare unscaled count products, so the fast path is
    only used when the model is integral as given.
    """
    values = list(model.matrix.entries) + [model.w0, model.b0]
    scale = 1
    for v in values:
        scale = scale * v.denominator // math.gcd(scale, v.denominator)
    if scale != 1 and model.kind != ONE_DRAW and model.sampling == WITHOUT_REPLACEMENT:
        return None
    ints = [int(v * scale) for v in values]
    rows = tuple(ints[:-2])
    return ints[-2], ints[-1], rows, scale


def _record_point(traj: list, step_index: int, w, b) -> None:
    traj.append((step_index, w / (w + b) if isinstance(w, int) else float(w / (w + b))))


def simulate(config: SimConfig, replicate_index: int) -> ReplicateResult:
    """Run one replicate; a pure function of the config and the index."""
    model = config.model
    model.validate_for_simulation()
    rng = replicate_rng(config.base_seed, replicate_index)
    grb = rng.getrandbits
    steps = config.steps
    record = config.record_trajectory
    stride = config.trajectory_stride
    traj: list[tuple[int, float]] | None = [] if record else None

    setup = _integer_setup(model)
    if setup is not None:
        w, b, rows, scale = setup
        if record:
            _record_point(traj, 0, w, b)
        if model.kind == ONE_DRAW:
            aw, ab, cw, cb = rows
            for i in range(steps):
                u = grb(_UNIT_BITS)
                if u * (w + b) < (w << _UNIT_BITS):
                    w += aw
                    b += ab
                else:
                    w += cw
                    b += cb
                if record and ((i + 1) % stride == 0 or i + 1 == steps):
                    _record_point(traj, i + 1, w, b)
        elif model.sampling == WITHOUT_REPLACEMENT:
            aw, ab, cw, cb, ew, eb = rows
            for i in range(steps):
                u = grb(_UNIT_BITS)
                t = w + b
                denom = t * (t - 1)
                ww = w * (w - 1)
                if u * denom < (ww << _UNIT_BITS):
                    w += aw
                    b += ab
                elif u * denom < ((ww + 2 * w * b) << _UNIT_BITS):
                    w += cw
                    b += cb
                else:
                    w += ew
                    b += eb
                if record and ((i + 1) % stride == 0 or i + 1 == steps):
                    _record_point(traj, i + 1, w, b)
        else:
            aw, ab, cw, cb, ew, eb = rows
            for i in range(steps):
                u = grb(_UNIT_BITS)
                t = w + b
                denom = t * t
                ww = w * w
                if u * denom < (ww << _UNIT_BITS):
                    w += aw
                    b += ab
                elif u * denom < ((denom - b * b) << _UNIT_BITS):
                    w += cw
                    b += cb
                else:
                    w += ew
                    b += eb
                if record and ((i + 1) % stride == 0 or i + 1 == steps):
                    _record_point(traj, i + 1, w, b)
        final_w = Fraction(w, scale)
        final_b = Fraction(b, scale)
    else:
        state = model.initial_state
        if record:
            _record_point(traj, 0, state.white, state.black)
        for i in range(steps):
            state = step(state, model, rng)
            if record and ((i + 1) % stride == 0 or i + 1 == steps):
                _record_point(traj, i + 1, state.white, state.black)
        final_w, final_b = state.white, state.black

    return ReplicateResult(
        replicate_index=replicate_index,
        steps=steps,
        final_white=final_w,
        final_black=final_b,
        trajectory=tuple(traj) if record else None,
    )


def _simulate_range(args) -> list[ReplicateResult]:
    config, start, stop = args
    return [simulate(config, i) for i in range(start, stop)]


def run_replicates(config: SimConfig, parallelism: int = 1) -> list[ReplicateResult]:
    """All replicates, in index order; output does not depend on parallelism."""
    if parallelism < 1:
        raise ValueError("parallelism must be at least 1")
    n = config.replicates
    if parallelism == 1 or n <= 1:
        return [simulate(config, i) for i in range(n)]
    chunk = max(1, -(-n // (parallelism * 4)))
    ranges = [(config, lo, min(lo + chunk, n)) for lo in range(0, n, chunk)]
    out: list[ReplicateResult] = []
    with ProcessPoolExecutor(max_workers=parallelism) as pool:
        for part in pool.map(_simulate_range, ranges):
            out.extend(part)
    return out


# ---------------------------------------------------------------------------
# Output files
# ---------------------------------------------------------------------------

def _count_cell(value: Fraction) -> str:
    return str(value.numerator) if value.denominator == 1 else format_rational(value)


def finals_csv_lines(results: list[ReplicateResult]) -> list[str]:
    lines = ["replicate,final_W,final_B,final_Z"]
    for r in results:
        lines.append(
            f"{r.replicate_index},{_count_cell(r.final_white)},"
            f"{_count_cell(r.final_black)},{r.final_z!r}"
        )
    return lines


def trajectory_csv_lines(results: list[ReplicateResult]) -> list[str]:
    lines = ["replicate,step,Z"]
    for r in results:
        if r.trajectory is None:
            continue
        for step_index, z in r.trajectory:
            lines.append(f"{r.replicate_index},{step_index},{z!r}")
    return lines


# ---------------------------------------------------------------------------
# Clustering
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ClusterCounts:
    """Counts of samples within ``radius`` of each center, plus the rest."""

    centers: tuple[float, ...]
    radius: float
    counts: tuple[int, ...]
    unassigned: int


def cluster_finals(samples, centers, radius) -> ClusterCounts:
    """Assign each sample to the unique center within ``radius`` of it.

    Centers must be pairwise farther apart than ``2 * radius`` so that
    assignment is unambiguous; violating that raises ``ValueError``.
    """
    centers = tuple(float(c) for c in centers)
    radius = float(radius)
    if radius <= 0:
        raise ValueError("radius must be positive")
    for i in range(len(centers)):
        for j in range(i + 1, len(centers)):
            if abs(centers[i] - centers[j]) <= 2 * radius:
                raise ValueError(
                    "cluster centers closer than twice the radius make assignment ambiguous"
                )
    counts = [0] * len(centers)
    unassigned = 0
    for s in samples:
        s = float(s)
        for k, c in enumerate(centers):
            if abs(s - c) <= radius:
                counts[k] += 1
                break
        else:
            unassigned += 1
    return ClusterCounts(centers, radius, tuple(counts), unassigned)


# ---------------------------------------------------------------------------
# Beta distribution function and Kolmogorov-Smirnov test
# ---------------------------------------------------------------------------

def _beta_continued_fraction(a: float, b: float, x: float) -> float:
    """Continued-fraction core of the regularized incomplete beta (Lentz)."""
    tiny = 1e-300
    qab, qap, qam = a + b, a + 1.0, a - 1.0
    c = 1.0
    d = 1.0 - qab * x / qap
    if abs(d) < tiny:
        d = tiny
    d = 1.0 / d
    h = d
    for m in range(1, 400):
        m2 = 2 * m
        numerator = m * (b - m) * x / ((qam + m2) * (a + m2))
        d = 1.0 + numerator * d
        if abs(d) < tiny:
            d = tiny
        c = 1.0 + numerator / c
        if abs(c) < tiny:
            c = tiny
        d = 1.0 / d
        h *= d * c
        numerator = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2))
        d = 1.0 + numerator * d
        if abs(d) < tiny:
            d = tiny
        c = 1.0 + numerator / c
        if abs(c) < tiny:
            c = tiny
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < 1e-15:
            return h
    raise RuntimeError("incomplete beta continued fraction did not converge")


def regularized_incomplete_beta(a: float, b: float, x: float) -> float:
    """Distribution function of the Beta(a, b) law at ``x`` (abs err < 1e-10)."""
    if a <= 0 or b <= 0:
        raise ValueError("beta parameters must be positive")
    if x <= 0.0:
        return 0.0
    if x >= 1.0:
        return 1.0
    ln_front = (
        math.lgamma(a + b)
        - math.lgamma(a)
        - math.lgamma(b)
        + a * math.log(x)
        + b * math.log1p(-x)
    )
    front = math.exp(ln_front)
    if x < (a + 1.0) / (a + b + 2.0):
        return front * _beta_continued_fraction(a, b, x) / a
    return 1.0 - front * _beta_continued_fraction(b, a, 1.0 - x) / b


@dataclass(frozen=True)
class KSResult:
    """Kolmogorov-Smirnov comparison of samples against a Beta law."""

    statistic: float
    sample_size: int
    alpha: float
    beta: float

    def threshold(self, level: float) -> float:
        """Critical value at the given significance level (asymptotic form).

        Solves ``2 exp(-2 n t^2) = level`` for ``t``: about ``1.628/sqrt(n)``
        at the 1% level.
        """
        if not 0 < level < 1:
            raise ValueError("level must be in (0, 1)")
        return math.sqrt(-0.5 * math.log(level / 2.0)) / math.sqrt(self.sample_size)


def ks_beta(samples, alpha, beta) -> KSResult:
    """Exact KS statistic of the samples against Beta(alpha, beta)."""
    xs = sorted(float(s) for s in samples)
    n = len(xs)
    if n == 0:
        raise ValueError("the KS statistic needs at least one sample")
    a, b = float(alpha), float(beta)
    d = 0.0
    for i, x in enumerate(xs):
        cdf = regularized_incomplete_beta(a, b, x)
        d = max(d, cdf - i / n, (i + 1) / n - cdf)
    return KSResult(statistic=d, sample_size=n, alpha=a, beta=b)


# ---------------------------------------------------------------------------
# Verification
# ---------------------------------------------------------------------------

#: Fraction of replicates that must land on allowed points for consistency.
MIN_ALLOWED_FRACTION = 0.90
#: Largest tolerated fraction of replicates at any excluded point.
MAX_EXCLUDED_FRACTION = 0.02
#: Default clustering radius around predicted points.
DEFAULT_RADIUS = 0.05
#: Significance level of the Beta-law KS comparison.
KS_LEVEL = 0.01
#: Number of histogram bins reported over the unit interval.
HISTOGRAM_BINS = 50

VERDICT_CONSISTENT = "consistent"
VERDICT_INCONSISTENT = "inconsistent"
VERDICT_INCONCLUSIVE = "inconclusive"


@dataclass(frozen=True)
class VerificationReport:
    """Outcome of comparing simulated finals against a prediction."""

    prediction: LimitPrediction
    steps: int
    replicates: int
    base_seed: int
    verdict: str
    reasons: tuple[str, ...]
    mean_final: float
    histogram: tuple[int, ...]
    radius_requested: float
    radius_used: float | None
    allowed_points: tuple[dict, ...]
    excluded_points: tuple[dict, ...]
    unassigned: int | None
    allowed_fraction: float | None
    ks_statistic: float | None
    ks_threshold: float | None

    def to_dict(self) -> dict:
        return {
            "prediction": prediction_to_dict(self.prediction),
            "steps": self.steps,
            "replicates": self.replicates,
            "seed": self.base_seed,
            "conventions": {
                "min_allowed_fraction": MIN_ALLOWED_FRACTION,
                "max_excluded_fraction": MAX_EXCLUDED_FRACTION,
                "radius_requested": self.radius_requested,
                "radius_used": self.radius_used,
                "ks_level": KS_LEVEL,
            },
            "mean_final": self.mean_final,
            "histogram": list(self.histogram),
            "allowed_points": list(self.allowed_points),
            "excluded_points": list(self.excluded_points),
            "unassigned": self.unassigned,
            "allowed_fraction": self.allowed_fraction,
            "ks_statistic": self.ks_statistic,
            "ks_threshold": self.ks_threshold,
            "verdict": self.verdict,
            "reasons": list(self.reasons),
        }


def _histogram(finals: list[float]) -> tuple[int, ...]:
    bins = [0] * HISTOGRAM_BINS
    for z in finals:
        index = min(int(z * HISTOGRAM_BINS), HISTOGRAM_BINS - 1)
        bins[index] += 1
    return tuple(bins)


def verify(
    model: UrnModel,
    prediction: LimitPrediction | None = None,
    *,
    steps: int = 10_000,
    replicates: int = 100,
    base_seed: int = 0,
    parallelism: int = 1,
    radius: float = DEFAULT_RADIUS,
) -> VerificationReport:
    """Simulate and compare against the (given or derived) prediction.

    Point predictions are checked by clustering the final proportions around
    the allowed and excluded points together: consistency needs at least
    ``MIN_ALLOWED_FRACTION`` of replicates on allowed points and at most
    ``MAX_EXCLUDED_FRACTION`` on each excluded point. When predicted points
    sit closer together than twice the radius, the radius shrinks to just
    under half the smallest gap (recorded in the report). Beta predictions
    are checked by the KS statistic at level ``KS_LEVEL``. No-atoms and
    unknown predictions are not falsifiable by clustering and come back
    ``inconclusive`` with the histogram for inspection.
    """
    if prediction is None:
        prediction = predict_limit(model)
    config = SimConfig(model=model, steps=steps, replicates=replicates, base_seed=base_seed)
    results = run_replicates(config, parallelism=parallelism)
    finals = [r.final_z for r in results]
    mean_final = sum(finals) / len(finals) if finals else float("nan")
    histogram = _histogram(finals)

    reasons: list[str] = []
    radius_used = None
    allowed_dicts: tuple[dict, ...] = ()
    excluded_dicts: tuple[dict, ...] = ()
    unassigned = None
    allowed_fraction = None
    ks_statistic = None
    ks_threshold = None

    if prediction.kind is PredictionKind.POINT_MASS_SET and prediction.points:
        allowed = [(p.root.approx, p.verdict) for p in prediction.points]
        excluded = [(p.root.approx, p.theorem) for p in prediction.excluded]
        centers = [c for c, _ in allowed] + [c for c, _ in excluded]
        radius_used = float(radius)
        if len(centers) > 1:
            min_gap = min(
                abs(centers[i] - centers[j])
                for i in range(len(centers))
                for j in range(i + 1, len(centers))
            )
            if min_gap <= 2 * radius_used:
                radius_used = 0.49 * min_gap
                reasons.append(
                    f"radius shrunk to {radius_used!r} so clusters cannot overlap"
                )
        clusters = cluster_finals(finals, centers, radius_used)
        n_allowed = len(allowed)
        allowed_count = sum(clusters.counts[:n_allowed])
        allowed_fraction = allowed_count / replicates if replicates else 0.0
        unassigned = clusters.unassigned
        allowed_dicts = tuple(
            {
                "approx": centers[k],
                "verdict": allowed[k][1],
                "count": clusters.counts[k],
            }
            for k in range(n_allowed)
        )
        excluded_dicts = tuple(
            {
                "approx": centers[n_allowed + k],
                "theorem": excluded[k][1],
                "count": clusters.counts[n_allowed + k],
            }
            for k in range(len(excluded))
        )
        verdict = VERDICT_CONSISTENT
        if allowed_fraction < MIN_ALLOWED_FRACTION:
            verdict = VERDICT_INCONSISTENT
            reasons.append(
                f"only {allowed_fraction:.3f} of replicates landed on allowed points "
                f"(need >= {MIN_ALLOWED_FRACTION})"
            )
        for k, (center, theorem) in enumerate(excluded):
            frac = clusters.counts[n_allowed + k] / replicates if replicates else 0.0
            if frac > MAX_EXCLUDED_FRACTION:
                verdict = VERDICT_INCONSISTENT
                reasons.append(
                    f"excluded point near {center!r} captured {frac:.3f} of replicates "
                    f"(breaks {theorem})"
                )
    elif prediction.kind is PredictionKind.BETA_DISTRIBUTION:
        a, b = prediction.beta_params
        ks = ks_beta(finals, a, b)
        ks_statistic = ks.statistic
        ks_threshold = ks.threshold(KS_LEVEL)
        if ks.statistic < ks_threshold:
            verdict = VERDICT_CONSISTENT
        else:
            verdict = VERDICT_INCONSISTENT
            reasons.append(
                f"KS statistic {ks.statistic!r} is not below the level-{KS_LEVEL} "
                f"threshold {ks_threshold!r}"
            )
    elif prediction.kind is PredictionKind.CONTINUOUS_NO_ATOMS:
        verdict = VERDICT_INCONCLUSIVE
        reasons.append(
            "a no-atoms prediction cannot be refuted by finite clustering; "
            "histogram reported for inspection"
        )
    else:
        verdict = VERDICT_INCONCLUSIVE
        reasons.append("no certified prediction to test against")

    return VerificationReport(
        prediction=prediction,
        steps=steps,
        replicates=replicates,
        base_seed=base_seed,
        verdict=verdict,
        reasons=tuple(reasons),
        mean_final=mean_final,
        histogram=histogram,
        radius_requested=float(radius),
        radius_used=radius_used,
        allowed_points=allowed_dicts,
        excluded_points=excluded_dicts,
        unassigned=unassigned,
        allowed_fraction=allowed_fraction,
        ks_statistic=ks_statistic,
        ks_threshold=ks_threshold,
    )

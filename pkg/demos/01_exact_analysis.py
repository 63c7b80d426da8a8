"""Exact analysis of a two-color reinforcement urn, step by step.

A model is a replacement matrix plus starting counts. Every quantity below
is computed in exact rational arithmetic: the drift polynomial whose zeros
are the candidate limits, the per-step noise profile, the classification of
each equilibrium, and the final prediction with the certificate backing it.

Run:  python3 demos/01_exact_analysis.py
"""

from polyurn import (
    analysis_to_dict,
    analyze_model,
    attainable_interval,
    classify_all,
    drift_for,
    two_draw_model,
)

import json


# ---------------------------------------------------------------------------
# A pair-draw urn with two stable modes
# ---------------------------------------------------------------------------
# Each step draws two balls without replacement; the row matching the drawn
# pair (white-white / mixed / black-black) says how many white and black
# balls to add.

model = two_draw_model([15, 3, 4, 1, 3, 21], w0=2, b0=2)
print("matrix rows (white added, black added):")
print("  white-white ->", (15, 3))
print("  mixed       ->", (4, 1))
print("  black-black ->", (3, 21))

# The drift is the expected one-step change of the white proportion, scaled
# by the next total; its zeros are the only possible limits.
drift = drift_for(model)
print("\ndrift polynomial:", drift.to_text())

for eq in classify_all(drift):
    print(f"  zero at {eq.root.value}  ->  {eq.classification.value}")

# The attainable interval brackets every reachable limit: it comes from the
# smallest and largest white-ratio of the matrix rows.
interval = attainable_interval(model)
print(f"\nattainable interval: [{interval.lower}, {interval.upper}]")

# analyze_model bundles everything, including the limit prediction. Here the
# middle zero 1/2 is a repeller and the noise does not vanish there, so it
# is excluded; the two stable zeros each attract with positive probability.
analysis = analyze_model(model)
prediction = analysis.prediction
print("\nprediction kind:", prediction.kind.value)
for point in prediction.points:
    print(f"  candidate {point.root.value}: {point.verdict}  [{point.theorem}]")
for excl in prediction.excluded:
    print(f"  excluded  {excl.root.value}: ruled out by {excl.theorem}")

# The whole analysis serializes to JSON with rationals as exact "p/q"
# strings -- nothing is rounded.
payload = analysis_to_dict(analysis)
print("\nJSON drift coefficients:", payload["drift"]["coefficients"])
print("JSON attainable interval:", json.dumps(payload["attainable"]))

# ---------------------------------------------------------------------------
# A model with an irrational limit
# ---------------------------------------------------------------------------
# Zeros need not be rational: they are isolated exactly (Sturm chains) and
# reported with an enclosing interval plus a float approximation.

irrational = two_draw_model([2, 1, 1, 1, 1, 0], w0=2, b0=2)
print("\ndrift of (2,1,1,1,1,0):", drift_for(irrational).to_text())
for eq in classify_all(drift_for(irrational)):
    rec = eq.root
    if rec.value is not None:
        print(f"  rational zero {rec.value} -> {eq.classification.value}")
    else:
        lo, hi = rec.interval
        print(
            f"  irrational zero in [{lo}, {hi}], approx {rec.approx:.12f}"
            f" -> {eq.classification.value}"
        )

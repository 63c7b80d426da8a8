"""The verification pipeline: simulate a model and test its own prediction.

``verify`` derives the limit prediction, runs replicates with deterministic
per-replicate streams, clusters the final proportions around the predicted
(and excluded) points, and returns a structured report with a verdict:
consistent, inconsistent, or inconclusive. The same pipeline is available on
the command line as ``polyurn verify``.

Run:  python3 demos/04_verification_pipeline.py
"""

import json

from polyurn import predict_limit, two_draw_model, verify

# ---------------------------------------------------------------------------
# A model that converges to 1/3, checked against its own prediction
# ---------------------------------------------------------------------------

model = two_draw_model([3, 2, 2, 3, 1, 4], w0=2, b0=2)
report = verify(model, steps=5000, replicates=100, base_seed=7)
print("verdict:", report.verdict)
print("allowed fraction:", report.allowed_fraction)
for point in report.allowed_points:
    print(f"  {point['count']} replicates near {point['approx']:.4f}"
          f" ({point['verdict']})")

# The report is JSON-ready and records the conventions the verdict used
# (clustering radius, consistency thresholds, KS level).
payload = report.to_dict()
print("\nconventions:", json.dumps(payload["conventions"], indent=2))

# ---------------------------------------------------------------------------
# Catching a wrong prediction
# ---------------------------------------------------------------------------
# Hand the verifier a prediction belonging to a different model: the mass
# lands far from the claimed point and the verdict flips to inconsistent.

wrong = predict_limit(two_draw_model([9, 1, 2, 3, 1, 7], w0=2, b0=2))
report = verify(model, wrong, steps=5000, replicates=100, base_seed=7)
print("\nwith a borrowed prediction:", report.verdict)
for reason in report.reasons:
    print("  reason:", reason)

# ---------------------------------------------------------------------------
# Predictions that cannot be falsified at desk scale
# ---------------------------------------------------------------------------
# A flat pair-draw family has a continuous limit law with no atoms; finite
# clustering cannot refute it, so the verdict is inconclusive by design and
# the report carries a 50-bin histogram for inspection.

flat = two_draw_model([2, 0, 1, 1, 0, 2], w0=2, b0=2)
report = verify(flat, steps=2000, replicates=100, base_seed=1)
print("\nflat family:", report.verdict)
print("histogram mass in the middle fifth:",
      sum(report.histogram[20:30]), "of", sum(report.histogram))

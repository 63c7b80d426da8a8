"""Single-draw urns whose limit is a full Beta distribution.

When both rows of a single-draw matrix add the same count of the drawn
color and nothing else (a flat matrix), the white proportion converges to a
Beta law whose parameters are the starting counts divided by the
reinforcement. The package derives that law exactly and the simulator can
check it with a Kolmogorov-Smirnov test.

Run:  python3 demos/02_single_draw_beta_laws.py
"""

from polyurn import (
    SimConfig,
    ks_beta,
    one_draw_model,
    predict_limit,
    run_replicates,
)

# ---------------------------------------------------------------------------
# The classical single-color reinforcement
# ---------------------------------------------------------------------------
# Draw one ball, put it back together with one more of the same color.

for w0, b0 in [(1, 1), (2, 1), (3, 1)]:
    model = one_draw_model([1, 0, 0, 1], w0=w0, b0=b0)
    prediction = predict_limit(model)
    a, b = prediction.beta_params
    print(f"start {w0} white / {b0} black  ->  limit law Beta({a}, {b})")

# ---------------------------------------------------------------------------
# Simulate and test the uniform case
# ---------------------------------------------------------------------------
# With one ball of each color the limit is Beta(1,1) -- exactly uniform.
# Every replicate gets its own deterministic random stream derived from the
# base seed, so this block prints the same numbers on every machine.

model = one_draw_model([1, 0, 0, 1], w0=1, b0=1)
config = SimConfig(model=model, steps=2000, replicates=400, base_seed=11)
finals = [r.final_z for r in run_replicates(config)]

result = ks_beta(finals, 1.0, 1.0)
print(f"\nuniform check: KS statistic {result.statistic:.4f}"
      f" vs 1% critical value {result.threshold(0.01):.4f}")
assert result.statistic < result.threshold(0.01)

# The asymmetric start (2 white, 1 black) has distribution function x^2.
model = one_draw_model([1, 0, 0, 1], w0=2, b0=1)
config = SimConfig(model=model, steps=2000, replicates=400, base_seed=11)
finals = [r.final_z for r in run_replicates(config)]
result = ks_beta(finals, 2.0, 1.0)
print(f"Beta(2,1) check: KS statistic {result.statistic:.4f}"
      f" vs 1% critical value {result.threshold(0.01):.4f}")

# ---------------------------------------------------------------------------
# Reinforcing by more than one ball
# ---------------------------------------------------------------------------
# Adding two of the drawn color halves the Beta parameters.

model = one_draw_model([2, 0, 0, 2], w0=3, b0=1)
print("\nreinforce by 2, start 3/1 ->", predict_limit(model).beta_params)

# Starting with no white balls at all freezes the proportion at zero: the
# prediction degenerates to a single certain point.
frozen = one_draw_model([1, 0, 0, 1], w0=0, b0=2)
prediction = predict_limit(frozen)
point = prediction.points[0]
print(f"no white start -> point mass at {point.root.value} ({point.verdict})")

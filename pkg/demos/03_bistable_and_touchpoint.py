"""Pair-draw urns with competing limits: a bistable urn and a touchpoint urn.

Two showcase models. In the first, the drift has two attracting zeros
separated by a repelling one: runs settle near 1/4 or 3/4 and the middle is
provably never the limit. In the second, the lower zero only touches the
axis (the drift does not change sign there): it remains a possible limit,
but most mass goes to the attracting zero.

Run:  python3 demos/03_bistable_and_touchpoint.py
"""

from polyurn import (
    SimConfig,
    cluster_finals,
    predict_limit,
    run_replicates,
    two_draw_model,
)


def ascii_histogram(finals, bins=25, width=50):
    counts = [0] * bins
    for z in finals:
        counts[min(int(z * bins), bins - 1)] += 1
    peak = max(counts)
    lines = []
    for i, count in enumerate(counts):
        bar = "#" * round(width * count / peak) if peak else ""
        lines.append(f"  [{i / bins:.2f}, {(i + 1) / bins:.2f}) {count:4d} {bar}")
    return "\n".join(lines)


# ---------------------------------------------------------------------------
# Bistable: zeros at 1/4 (stable), 1/2 (repelling), 3/4 (stable)
# ---------------------------------------------------------------------------

bistable = two_draw_model([15, 3, 4, 1, 3, 21], w0=5, b0=2)
prediction = predict_limit(bistable)
print("bistable prediction:")
for p in prediction.points:
    print(f"  {p.root.value}: {p.verdict}")
for e in prediction.excluded:
    print(f"  {e.root.value}: excluded ({e.theorem})")

config = SimConfig(model=bistable, steps=10_000, replicates=300, base_seed=2)
finals = [r.final_z for r in run_replicates(config)]
print("\nfinal proportions after 10000 steps, 300 replicates:")
print(ascii_histogram(finals))

clusters = cluster_finals(finals, centers=[0.25, 0.75, 0.5], radius=0.05)
quarter, three_quarter, middle = clusters.counts
print(f"\nnear 1/4: {quarter}   near 3/4: {three_quarter}   "
      f"near the excluded 1/2: {middle}   elsewhere: {clusters.unassigned}")

# ---------------------------------------------------------------------------
# Touchpoint: the drift touches zero at 1/4 without crossing
# ---------------------------------------------------------------------------
# Touchpoints cannot be excluded: some runs really do end up there, which is
# why the verdict is "possible" rather than "positive probability".

touch = two_draw_model([35, 9, 1, 1, 3, 21], w0=12, b0=2)
prediction = predict_limit(touch)
print("\ntouchpoint prediction:")
for p in prediction.points:
    print(f"  {p.root.value}: {p.verdict}  [{p.theorem}]")

config = SimConfig(model=touch, steps=10_000, replicates=300, base_seed=3)
finals = [r.final_z for r in run_replicates(config)]
clusters = cluster_finals(finals, centers=[0.25, 0.75], radius=0.05)
print(f"near the touchpoint 1/4: {clusters.counts[0]}   "
      f"near the attracting 3/4: {clusters.counts[1]}")

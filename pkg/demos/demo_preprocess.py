"""Dataset preprocessing: log transform, normalization, encoding, outliers,
resampling, and the correlation report.

Run: python demos/demo_preprocess.py
"""

import numpy as np

from firedss import data_text, ingest

d = ingest.parse_dataset(data_text("forestfires_synthetic.csv"))
print(f"parsed {len(d)} rows, {len(d.schema)} columns")

areas = np.array(d.column("area"))
print(f"burned area: {np.mean(areas > 0):.0%} positive, "
      f"max {areas.max():.1f} ha (heavily skewed)")

# ln(1+x) tames the skew while keeping the zero-burn majority at 0.
logged = ingest.log_transform_area(d)
print(f"after log1p: max {max(logged.column('area')):.2f}")

# Z-scores standardize the weather drivers for downstream modeling.
normalized, params = ingest.zscore_normalize(
    logged, ["FFMC", "DMC", "DC", "ISI", "temp", "RH", "wind", "rain"])
print(f"\nz-scored 8 columns; e.g. temp mean {params.mean('temp'):.2f}, "
      f"stddev {params.stddev('temp'):.2f}")
col = np.array(normalized.column("temp"))
print(f"normalized temp: mean {col.mean():+.2e}, variance {col.var():.6f}")

# Calendar tokens expand into stable one-hot groups.
encoded = ingest.one_hot_encode(normalized, ["month", "day"])
print(f"one-hot month+day: {len(normalized.schema)} -> {len(encoded.schema)} columns")

# Outlier trimming and class balancing are both provenance-tracked.
trimmed = ingest.filter_outliers(logged, "area", method="iqr", threshold=1.5)
print(f"\nIQR outlier filter removed {len(logged) - len(trimmed)} rows")
balanced = ingest.resample(logged, "area", "oversample", seed=7)
labels = [v > 0 for v in balanced.column("area")]
print(f"oversampled to balance: {labels.count(True)} burn vs "
      f"{labels.count(False)} no-burn rows")

print("\nprovenance trail of the balanced dataset:")
print("  " + balanced.provenance_json())

# The correlation matrix is a report for humans: signs are printed,
# feature selection stays a human decision.
numeric = ingest.ordinal_encode(d)
cm = ingest.correlation_matrix(numeric)
print("\ncorrelations with burned area:")
for name in ("temp", "FFMC", "DMC", "DC", "ISI", "RH", "wind", "rain"):
    print(f"  {name:>5} vs area: {cm.value(name, 'area'):+.4f}")
strongest = max((p for p in cm.pairs() if p[0] != p[1]), key=lambda p: abs(p[2]))
print(f"strongest pair overall: {strongest[0]} vs {strongest[1]} "
      f"at {strongest[2]:+.4f}")

"""Run a miniature benchmark grid and write the report files."""

import os

from lastmile import (
    MLPModel,
    generate_synthetic_dataset,
    run_benchmark,
    train_mlp,
    write_report,
)
from lastmile.experiments import aggregate_rows

OUT = os.path.join(os.path.dirname(__file__), "out")
os.makedirs(OUT, exist_ok=True)

model = MLPModel(train_mlp(generate_synthetic_dataset(5000, seed=11), seed=5).weights)

# fresh 35-vertex graph per cell (graph=None), five algorithms per sample;
# tiny sizes here, the real grid goes to n=10 with 100 samples
result = run_benchmark(None, model, n_values=(4, 5, 6), samples=5, seed=7)
print(f"{len(result.rows)} rows")

rows_csv = os.path.join(OUT, "bench.csv")
chart = os.path.join(OUT, "bench.png")
write_report(result, rows_csv, chart_path=chart)
print(f"wrote {rows_csv}, aggregate next to it, chart {chart}")

print(f"\n{'algorithm':<14} {'n':>2} {'mean sat':>9} {'stderr':>7}")
for tag, n, mean_sat, stderr, _cost in aggregate_rows(result):
    print(f"{tag:<14} {n:>2} {mean_sat:>9.4f} {stderr:>7.4f}")

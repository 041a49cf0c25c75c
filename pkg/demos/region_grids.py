"""Region grids for the three families, written as CSV plus a JSON sidecar.

Run: python demos/region_grids.py [output-dir]
"""
import sys
from pathlib import Path

from focusbif.normal_form import (AxisSpec, filippov_region_detail, neuron_region_test,
                                  region_grid, sweeping_region_test)

out = Path(sys.argv[1] if len(sys.argv) > 1 else "region-grids")
out.mkdir(parents=True, exist_ok=True)

grids = {
    "neuron": region_grid(neuron_region_test, AxisSpec("ratio", -2.0, -0.01, 100),
                          AxisSpec("k", 0.05, 10.0, 100), family="neuron"),
    "filippov": region_grid(filippov_region_detail, AxisSpec("ratio", 0.01, 2.0, 200),
                            AxisSpec("m", -3.0, 3.0, 200), family="filippov"),
    "sweeping": region_grid(sweeping_region_test, AxisSpec("ratio", 0.001, 1.0, 1000),
                            family="sweeping"),
}
for name, grid in grids.items():
    path = out / f"{name}.csv"
    grid.to_csv(path)
    print(f"{name:9s} {grid.shape}: {int(grid.values.sum())} cells inside -> {path}")

fil = grids["filippov"]
gray = int((fil.notes == "m<-ratio").sum())
print(f"\nFilippov cells decided by m < -ratio: {gray}; by the landing test: "
      f"{int(fil.values.sum()) - gray}")

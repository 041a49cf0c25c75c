"""Stick-slip cycle of a Filippov system: free flight below a switching line,
then sliding along it back to the tangency point.

Run: python demos/filippov_stick_slip.py
"""
import numpy as np

from focusbif import builtins
from focusbif.bifurcation import check_system, confirm_cycle
from focusbif.boundary import solve_filippov_pseudo_equilibrium, solve_tangency

EPS = 1e-2
sys = builtins.filippov_normal_form(a=0.2, b=1.0, m=0.0)

report = check_system(sys)
print(f"verdict: {report.verdict}")
for name, value in report.derivatives.items():
    print(f"  {name:11s} = {value: .6f}")

A = solve_tangency(sys.field_minus, sys.surface, EPS).point
pe = solve_filippov_pseudo_equilibrium(sys, EPS)
print(f"\ntangency point     ({A[0]: .6f}, {A[1]: .6f})")
print(f"pseudo-equilibrium ({pe.point[0]: .6f}, {pe.point[1]: .6f}), multiplier {pe.multiplier:.6f}")

rec = confirm_cycle(sys, EPS)
print(f"\nlanding after free flight at x = {rec.landing[0]: .6f} (t = {rec.return_time:.4f})")
print(f"sliding returns to the tangency point at t = {rec.period:.4f}")
print(f"closure error {rec.closure_error:.2e}")
for seg in rec.trajectory.segments:
    print(f"  {seg.mode:11s} t in [{seg.t0:.4f}, {seg.t1:.4f}]")

# Starting partway along the sliding segment still ends at the tangency point.
for frac in (0.1, 0.5, 0.9):
    start = A + frac * (pe.point - A)
    r = confirm_cycle(sys, EPS, start=start)
    print(f"start {frac:.0%} of the way to the pseudo-equilibrium: exits {r.closure_error:.1e} from tangency")

# With a = b = 1 the reduced orbit overshoots the sliding segment.
wide = check_system(builtins.filippov_normal_form(a=1.0, b=1.0, m=0.0))
seg = wide.check("landing_in_sliding_segment")
print(f"\na = b = 1: verdict {wide.verdict}, landing u = {wide.reduced_cycle.landing_u:.2f}, "
      f"segment check {seg.status}")
print(f"max |x| on the confirmed cycle: {np.abs(rec.trajectory.states[:, 0]).max():.4f}")

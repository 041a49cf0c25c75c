"""Resonate-and-fire neuron: a stable focus whose orbit hits a threshold and resets.

Run: python demos/neuron_impacting.py
"""
from focusbif import builtins
from focusbif.bifurcation import check_system, confirm_cycle
from focusbif.errors import ConfirmationFailed
from focusbif.integrate import simulate_impacting
from focusbif.normal_form import neuron_region_test, solve_return_point

EPS = 1e-2

# A weakly damped focus (a = -0.1) with a long reset (k = 2) sits inside the
# return region, so the unfolded reduced orbit climbs back to the threshold.
sys = builtins.neuron(a=-0.1, b=1.0, k=2.0)
report = check_system(sys, confirm_eps=EPS)
print(f"verdict for a=-0.1, k=2: {report.verdict}")
print(f"  reduced period T0 = {report.reduced_cycle.period:.6f}")
print(f"  landing u(T0)     = {report.reduced_cycle.landing_u:.10f}")
print(f"  closed-form root  = {solve_return_point(-0.1, 2.0):.10f}")

traj = simulate_impacting(sys, sys.reset_point(EPS), EPS, t_max=30.0)
print(f"\n{len(traj.events)} impacts in 30 time units; first three:")
for ev in traj.events[:3]:
    print(f"  t = {ev.time:8.4f}  state = ({ev.state[0]: .6f}, {ev.state[1]: .6f})")

# Strong damping with a short reset misses the threshold for good.
strong = builtins.neuron(a=-1.0, b=1.0, k=1.0)
print(f"\na=-1, k=1 in region: {neuron_region_test(-1.0, 1.0)}")
print(f"verdict: {check_system(strong).verdict}")
try:
    confirm_cycle(strong, EPS)
except ConfirmationFailed as exc:
    print(f"shooting agrees: {exc}")

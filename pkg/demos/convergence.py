"""Cycles shrink linearly with epsilon while the return time tends to T0.

The quadratic term c (0, x^2) is switched on so the return time actually
depends on epsilon; for purely linear fields the cycle is an exact rescaling.

Run: python demos/convergence.py
"""
from focusbif import builtins
from focusbif.bifurcation import build_reduced, convergence_study, reduced_cycle

EPS = (1e-2, 5e-3, 2.5e-3, 1.25e-3)
cases = {
    "neuron a=-0.1 k=2": builtins.neuron(a=-0.1, b=1.0, k=2.0, c=1.0),
    "filippov a=0.2 m=0": builtins.filippov_normal_form(a=0.2, c=1.0),
    "sweeping a=0.2": builtins.sweeping_halfplane(a=0.2, c=1.0),
}
for name, system in cases.items():
    T0 = reduced_cycle(build_reduced(system)).period
    print(f"{name}   T0 = {T0:.6f}")
    print("   epsilon    amplitude   amp/eps   T_eps - T0")
    for row in convergence_study(system, EPS):
        print(f"   {row.epsilon:.2e}  {row.amplitude:.6e}  {row.amplitude / row.epsilon:.4f}  "
              f"{row.return_time_error: .3e}")
    print()

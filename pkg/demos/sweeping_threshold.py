"""Where the swept focus stops producing a boundary cycle.

Two versions of the threshold are shown: the closed-form inequality used by
``sweeping_region_test`` and the exact m = 0 substitution that the full
engine effectively follows.

Run: python demos/sweeping_threshold.py
"""
from focusbif import builtins
from focusbif.bifurcation import check_system, confirm_cycle
from focusbif.errors import ConfirmationFailed
from focusbif.normal_form import sweeping_region_test, sweeping_threshold

EPS = 1e-2
print(f"closed-form threshold  a/b = {sweeping_threshold():.8f}")
print(f"exact m = 0 threshold  a/b = {sweeping_threshold(exact=True):.8f}\n")

print(" ratio  closed-form  exact  engine            shooting")
for ratio in (0.1, 0.2, 0.26, 0.28, 0.29, 0.3, 0.5):
    proc = builtins.sweeping_halfplane(a=ratio)
    verdict = check_system(proc).verdict
    try:
        rec = confirm_cycle(proc, EPS)
        shot = f"closes ({rec.closure_error:.0e})"
    except ConfirmationFailed:
        shot = "no cycle"
    print(f" {ratio:5.2f}  {sweeping_region_test(ratio)!s:11s}  "
          f"{sweeping_region_test(ratio, exact=True)!s:5s}  {verdict:16s}  {shot}")

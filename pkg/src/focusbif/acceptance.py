"""Executable acceptance criteria, shared by the test suite and ``focusbif verify``.

Each ``criterion_N`` returns a :class:`CriterionResult`; nothing is asserted here.
"""
from __future__ import annotations

import time
from dataclasses import dataclass

import numpy as np

from .bifurcation import ReducedHybridSystem, confirm_cycle, convergence_study, reduced_cycle
from .boundary import (classify_point, solve_filippov_pseudo_equilibrium,
                       solve_sweeping_boundary_equilibrium, solve_tangency)
from .builtins import filippov_normal_form, neuron, sweeping_halfplane
from .errors import ConfirmationFailed, NoReturn, NoSolution, WrongImpactCount
from .integrate import catch_up, filippov_sliding_field, simulate_filippov, simulate_sweeping
from .normal_form import (arccot, filippov_region_test, neuron_region_test, psi,
                          solve_return_point, sweeping_threshold)


@dataclass(frozen=True)
class CriterionResult:
    number: int
    name: str
    passed: bool
    detail: str
    runtime: float

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return f"[{status}] criterion {self.number} ({self.name}): {self.detail} [{self.runtime:.2f} s]"


def _timed(number, name, budget, body):
    t0 = time.perf_counter()
    ok, detail = body()
    dt = time.perf_counter() - t0
    if budget is not None and dt >= budget:
        ok, detail = False, f"{detail}; runtime {dt:.2f} s over budget {budget} s"
    return CriterionResult(number, name, bool(ok), detail, dt)


def _richardson(values, eps=(1e-3, 1e-4)):
    """Slope at zero from ``X(eps)/eps`` at two decades, first-order error removed."""
    s1, s2 = (np.asarray(v) / e for v, e in zip(values, eps))
    return (10.0 * s2 - s1) / 9.0


# 1 ---------------------------------------------------------------------------

def criterion_1():
    def body():
        th = sweeping_threshold()
        return 0.285 <= th <= 0.295, f"threshold = {th:.10f}, window [0.285, 0.295]"
    return _timed(1, "sweeping threshold", 1.0, body)


# 2 ---------------------------------------------------------------------------

def criterion_2():
    def body():
        worst = 0.0
        eps = (1e-3, 1e-4)
        for c in (0.0, 1.0):
            for a, b, m in ((1, 1, 0), (1, 2, 1), (2, 1, -3)):
                sys = filippov_normal_form(a, b, m, c)
                A = _richardson([solve_tangency(sys.field_minus, sys.surface, e).point for e in eps])
                pes = [solve_filippov_pseudo_equilibrium(sys, e) for e in eps]
                P = _richardson([np.append(p.point, p.multiplier) for p in pes])
                A_ref = np.array([-a / b, 1.0])
                P_ref = np.array([(b - a * m) / (a + b * m), 1.0, -(a * a + b * b) / (a + b * m)])
                worst = max(worst, np.max(np.abs(A - A_ref) / np.abs(A_ref)),
                            np.max(np.abs(P - P_ref) / np.abs(P_ref)))
            for a, b in ((1, 1), (1, 2), (2, 1)):
                proc = sweeping_halfplane(a, b, c)
                pes = [solve_sweeping_boundary_equilibrium(proc, e) for e in eps]
                P = _richardson([np.append(p.point, p.multiplier) for p in pes])
                P_ref = np.array([b / a, 1.0, -(a * a + b * b) / a])
                worst = max(worst, np.max(np.abs(P - P_ref) / np.abs(P_ref)))
        return worst <= 1e-4, f"max relative slope error = {worst:.2e} (tol 1e-4)"
    return _timed(2, "derivative formulas vs continuation", 10.0, body)


# 3 ---------------------------------------------------------------------------

NEURON_SAMPLES = ((-2.0, 0.5), (-1.5, 1.0), (-1.0, 1.0), (-0.5, 2.0), (-0.3, 0.5),
                  (-0.2, 1.0), (-0.16, 2.0), (-0.14, 2.0), (-0.12, 2.0), (-0.1, 2.0))
FILIPPOV_RATIOS = tuple(np.linspace(0.1, 1.5, 10))


def _landing_or_none(fn):
    try:
        return fn()
    except (NoReturn, NoSolution, WrongImpactCount):
        return None


def oracle_pairs():
    """``(ratio, k, reduced landing, closed-form root)`` for both families."""
    rows = []
    pts = list(NEURON_SAMPLES) + [(r, r) for r in FILIPPOV_RATIOS]
    for ratio, k in pts:
        red = ReducedHybridSystem(np.array([[ratio, -1.0], [1.0, ratio]]), -k, 1.0)
        land = _landing_or_none(lambda: reduced_cycle(red).landing_u)
        root = _landing_or_none(lambda: solve_return_point(ratio, k))
        rows.append((ratio, k, land, root))
    return rows


def criterion_3():
    def body():
        worst, mismatched, solved = 0.0, [], 0
        for ratio, k, land, root in oracle_pairs():
            if (land is None) != (root is None):
                mismatched.append((ratio, k))
            elif land is not None:
                solved += 1
                worst = max(worst, abs(land - root))
        ok = not mismatched and worst <= 1e-8
        return ok, (f"{solved}/20 samples have a return, max |landing - root| = {worst:.2e} (tol 1e-8); "
                    f"existence disagreements: {mismatched or 'none'}")
    return _timed(3, "closed-form vs reduced integration", 30.0, body)


# 4 ---------------------------------------------------------------------------

def _stable(test, x, y, h=1e-2):
    v = test(x, y)
    for dx in (-h, 0.0, h):
        for dy in (-h, 0.0, h):
            if test(x + dx, y + dy) != v:
                return None
    return v


def concordance_samples(seed=0, per_family=10):
    """Seeded parameter points at least 1e-2 from each region boundary, half inside."""
    rng = np.random.default_rng(seed)
    fams = {"neuron": (neuron_region_test, (-0.5, -0.02), (0.1, 10.0)),
            "filippov": (filippov_region_test, (0.05, 1.2), (-3.0, 3.0))}
    out = {}
    for fam, (test, (x0, x1), (y0, y1)) in fams.items():
        pts, want = [], {True: per_family // 2, False: per_family - per_family // 2}
        while sum(want.values()):
            x, y = rng.uniform(x0, x1), rng.uniform(y0, y1)
            try:
                v = _stable(test, x, y)
            except ValueError:
                continue
            if v is not None and want[v]:
                want[v] -= 1
                pts.append((float(x), float(y), v))
        out[fam] = pts
    return out


def _confirmed(system, eps):
    try:
        rec = confirm_cycle(system, eps)
    except (ConfirmationFailed, NoReturn, WrongImpactCount):
        return False
    return rec.closure_error <= 1e-6


def criterion_4(seed=0):
    def body():
        bad = []
        samples = concordance_samples(seed)
        for x, y, predicted in samples["neuron"]:
            if _confirmed(neuron(x, 1.0, y), 1e-2) != predicted:
                bad.append(("neuron", round(x, 4), round(y, 4), predicted))
        for x, y, predicted in samples["filippov"]:
            if _confirmed(filippov_normal_form(x, 1.0, y), 1e-2) != predicted:
                bad.append(("filippov", round(x, 4), round(y, 4), predicted))
        n = sum(len(v) for v in samples.values())
        return not bad, f"{n - len(bad)}/{n} points agree; disagreements: {bad or 'none'}"
    return _timed(4, "region predicate vs simulation", 300.0, body)


# 5 ---------------------------------------------------------------------------

SHRINK_EPS = (1e-2, 5e-3, 2.5e-3)


def shrinkage_check(system, eps_list=SHRINK_EPS):
    """``(ok, detail)`` for amplitude halving and monotone return-time convergence."""
    try:
        rows = convergence_study(system, eps_list)
    except (ConfirmationFailed, NoReturn, WrongImpactCount) as exc:
        return False, f"{type(exc).__name__}: {exc}"
    ratios = [rows[i + 1].amplitude / rows[i].amplitude for i in range(len(rows) - 1)]
    errs = [abs(r.return_time_error) for r in rows]
    ok = (all(0.45 <= q <= 0.55 for q in ratios) and all(errs[i + 1] < errs[i] for i in range(len(errs) - 1))
          and errs[-1] <= 2e-2)
    return ok, ("amplitude ratios " + ", ".join(f"{q:.4f}" for q in ratios)
                + "; |T_eps - T0| " + ", ".join(f"{e:.3e}" for e in errs))


def criterion_5():
    def body():
        n_ok, n_detail = shrinkage_check(neuron(-1.0, 1.0, 1.0, c=1.0))
        s_ok, s_detail = shrinkage_check(sweeping_halfplane(0.2, 1.0, c=1.0))
        return n_ok and s_ok, f"neuron(-1,1,1): {n_detail} | sweeping(0.2): {s_detail}"
    return _timed(5, "cycle shrinkage and period convergence", 120.0, body)


# 6 ---------------------------------------------------------------------------

def criterion_6():
    def body():
        eps = 1e-2
        sys = filippov_normal_form()
        ref = confirm_cycle(sys, eps)
        A = ref.start
        a = solve_filippov_pseudo_equilibrium(sys, eps).point
        tau = np.linspace(0.0, ref.period, 800)
        ref_states = ref.trajectory.sample(tau)
        worst_close, worst_loop = 0.0, 0.0
        for frac in (0.02, 0.25, 0.5, 0.75, 0.98):
            s0 = A + frac * (a - A)
            first = confirm_cycle(sys, eps, start=s0)
            worst_close = max(worst_close, first.closure_error)
            t_exit = first.period
            traj = simulate_filippov(sys, s0, eps, t_exit + ref.period + 1.0, max_events=4)
            loop = traj.sample(t_exit + tau)
            worst_loop = max(worst_loop, float(np.max(np.linalg.norm(loop - ref_states, axis=1))))
        ok = worst_close <= 1e-6 and worst_loop <= 1e-5
        return ok, (f"max exit distance from tangency = {worst_close:.2e}, "
                    f"max deviation of following loop = {worst_loop:.2e} (tol 1e-5)")
    return _timed(6, "finite-time stability", 60.0, body)


# 7 ---------------------------------------------------------------------------

def criterion_7():
    def body():
        worst_h = -np.inf
        for ratio in (0.1, 0.2, 0.25, 0.5):
            for c in (0.0, 1.0):
                for eps in (1e-2, 1e-3):
                    proc = sweeping_halfplane(ratio, 1.0, c)
                    start = solve_tangency(proc.field, proc.surface, eps).point
                    traj = simulate_sweeping(proc, start, eps, 30.0)
                    worst_h = max(worst_h, traj.max_h(proc.surface, eps, dense_points=3000))
        eps = 1e-2
        proc = sweeping_halfplane()
        rec = confirm_cycle(proc, eps)
        ts, cu = catch_up(proc, rec.start, eps, rec.period, step=1e-5)
        keep = ts <= rec.trajectory.final_time
        ts, cu = ts[keep], cu[keep]
        hybrid = rec.trajectory.sample(ts)
        dist = float(np.max(np.linalg.norm(hybrid - cu, axis=1)))
        ok = worst_h <= 1e-10 and dist <= 1e-3
        return ok, f"max h = {worst_h:.2e} (tol 1e-10), hybrid vs catch-up sup distance = {dist:.2e} (tol 1e-3)"
    return _timed(7, "sweeping feasibility and catch-up agreement", None, body)


# 8 ---------------------------------------------------------------------------

def criterion_8():
    def body():
        fails = []
        x = np.linspace(-50, 50, 2001)
        ac = arccot(x)
        if not (np.all(ac > 0) and np.all(ac < np.pi)):
            fails.append("arccot range")
        k = np.linspace(1e-3, 50, 2000)
        if not (np.all(arccot(-k) > np.pi / 2) and np.all(arccot(-k) < np.pi)):
            fails.append("arccot(-k) branch")
        al = np.linspace(-10, 10, 2001)
        if np.max(np.abs(1 / np.sin(arccot(al)) - np.sqrt(al ** 2 + 1))) > 1e-12:
            fails.append("1/sin(arccot) identity")
        for ratio in np.linspace(-2, 2, 41):
            r = np.linspace(-ratio, -ratio + 50, 5001)
            if not np.all(np.diff(psi(r, ratio)) > 0):
                fails.append(f"psi monotone at ratio {ratio:.2f}")
        worst_orth = 0.0
        for a, m in ((0.2, 0.0), (0.1, -0.5), (0.3, 0.2)):
            for c in (0.0, 1.0):
                sys = filippov_normal_form(a, 1.0, m, c)
                traj = simulate_filippov(sys, solve_tangency(sys.field_minus, sys.surface, 1e-2).point,
                                         1e-2, 20.0)
                for seg in traj.segments:
                    if seg.mode != "sliding":
                        continue
                    for s in seg.states:
                        v, alpha = filippov_sliding_field(sys, s, 1e-2)
                        worst_orth = max(worst_orth, abs(v @ sys.surface.grad(s, 1e-2)))
                        if not 0.0 <= alpha <= 1.0:
                            fails.append("alpha outside [0, 1]")
        if worst_orth > 1e-9:
            fails.append(f"sliding orthogonality {worst_orth:.2e}")
        eps = 1e-3
        xs = np.linspace(-0.1, 0.1, 100)
        for sys in (filippov_normal_form(), filippov_normal_form(1.0, 2.0, 1.0, 1.0), neuron(),
                    sweeping_halfplane(0.5, 1.0, 1.0)):
            fm = sys.minus_field()
            signs = [np.sign(classify_point(fm, sys.surface, (x, eps), eps).indicator) for x in xs]
            changes = int(np.sum(np.diff(signs) != 0))
            if changes != 1:
                fails.append(f"indicator changes sign {changes} times")
        return not fails, f"max |<v, grad h>| = {worst_orth:.2e}; failures: {fails or 'none'}"
    return _timed(8, "property suites", 30.0, body)


CRITERIA = (criterion_1, criterion_2, criterion_3, criterion_4, criterion_5, criterion_6,
            criterion_7, criterion_8)


def run_all(seed=0, stream=None):
    results = []
    for fn in CRITERIA:
        res = fn(seed) if fn is criterion_4 else fn()
        results.append(res)
        if stream is not None:
            print(res.line(), file=stream, flush=True)
    return results

"""Reduced hybrid system, hypothesis checks, verdicts and shooting confirmation."""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import List, Optional

import numpy as np
from scipy.optimize import brentq

from .boundary import (ORIGIN, check_outward_condition, equilibrium_derivative,
                       solve_filippov_pseudo_equilibrium, solve_sweeping_boundary_equilibrium,
                       solve_tangency, tangency_derivative)
from .errors import (ConfirmationFailed, DegenerateData, FocusBifError, NoReturn,
                     WrongImpactCount)
from .integrate import (CHATTER_GUARD, IntegratorOptions, Segment, Trajectory, _flow,
                        simulate_filippov, simulate_impacting, simulate_sweeping)
from .model import (FilippovSystem, ImpactingSystem, SweepingProcess, rotate_to_normal_form,
                    validate_setup)

HORIZON_TURNS = 100
SEGMENT_MARGIN = 1e-9
GRAZING_TOL = 1e-12
TANGENT_RESET_TOL = 1e-10
REDUCED_OPTIONS = IntegratorOptions(rel_tol=1e-12, abs_tol=1e-15, max_step=0.05)


@dataclass(frozen=True)
class ReducedHybridSystem:
    """``u' = J u`` below the line ``v = line_level``; on the line ``u`` resets to ``reset_u``."""

    jacobian: np.ndarray
    reset_u: float
    line_level: float

    @property
    def start(self) -> np.ndarray:
        return np.array([self.reset_u, self.line_level], dtype=float)

    def is_focus(self) -> bool:
        J = self.jacobian
        return float(np.trace(J) ** 2 - 4 * np.linalg.det(J)) < 0

    def focus_params(self):
        """``(a, b)`` if ``J = [[a, -b], [b, a]]``, else None."""
        J = self.jacobian
        scale = max(1.0, float(np.abs(J).max()))
        if (abs(J[0, 0] - J[1, 1]) <= 1e-12 * scale and abs(J[0, 1] + J[1, 0]) <= 1e-12 * scale
                and J[1, 0] != 0):
            return 0.5 * (J[0, 0] + J[1, 1]), 0.5 * (J[1, 0] - J[0, 1])
        return None


@dataclass(frozen=True)
class ReducedCycle:
    period: float
    landing_u: float
    samples: np.ndarray
    grazing: bool = False


def build_reduced(system) -> ReducedHybridSystem:
    sys = rotate_to_normal_form(system)
    fm = sys.minus_field()
    He = sys.surface.d_eps(ORIGIN, 0.0)
    Hy = sys.surface.grad(ORIGIN, 0.0)[1]
    if abs(Hy) < 1e-12:
        raise DegenerateData("H_y(0) = 0")
    if isinstance(sys, ImpactingSystem):
        reset_u = sys.reset_derivative()[0]
    else:
        reset_u = tangency_derivative(fm, sys.surface)[0]
    return ReducedHybridSystem(fm.jacobian(ORIGIN), float(reset_u), float(-He / Hy))


def _check_departure(red: ReducedHybridSystem):
    J, z0 = red.jacobian, red.start
    vdot = float(J[1] @ z0)
    vddot = float(J[1] @ (J @ z0))
    scale = max(1.0, float(np.abs(J).max()) * float(np.abs(z0).max()))
    if vdot > 1e-12 * scale or (abs(vdot) <= 1e-12 * scale and vddot >= 0):
        raise WrongImpactCount("reduced flow leaves the reset point upward across the line")


def _horizon(J):
    im = float(np.abs(np.linalg.eigvals(J).imag).max())
    if im > 1e-12:
        return HORIZON_TURNS * 2 * np.pi / im
    return HORIZON_TURNS * 2 * np.pi / max(float(np.abs(np.linalg.eigvals(J)).max()), 1e-3)


def _closed_form_cycle(red, a, b, n_samples):
    u0, v0 = red.start
    vs = red.line_level
    rho0 = math.hypot(u0, v0)
    th0 = math.atan2(v0, u0)
    beta = math.atan2(b, a)

    def v(t):
        return rho0 * math.exp(a * t) * math.sin(th0 + b * t)

    def vddot(t):
        phi = th0 + b * t
        return rho0 * math.exp(a * t) * ((a * a - b * b) * math.sin(phi) + 2 * a * b * math.cos(phi))

    half = math.pi / abs(b)
    horizon = HORIZON_TURNS * 2 * half
    tol = GRAZING_TOL * max(1.0, abs(vs))
    # extremum times t_n = (n pi - beta - th0)/b, visited in increasing order
    if b > 0:
        t_first = (-(beta + th0) % math.pi) / b
    else:
        t_first = ((beta + th0) % math.pi) / -b
    t_prev, t_ext = 0.0, t_first
    while t_ext * abs(b) < CHATTER_GUARD:
        t_ext += half
    while t_ext <= horizon:
        if a < 0 and rho0 * math.exp(a * t_ext) < abs(vs):
            raise NoReturn("reduced orbit spirals inside the line without returning")
        if vddot(t_ext) < 0:
            gap = v(t_ext) - vs
            if abs(gap) <= tol:
                return t_ext, True
            if gap > 0:
                T = brentq(lambda t: v(t) - vs, t_prev, t_ext, xtol=1e-15, maxiter=200)
                return T, False
        t_prev, t_ext = t_ext, t_ext + half
    raise NoReturn(f"no return within {HORIZON_TURNS} rotations")


def reduced_cycle(red: ReducedHybridSystem, method="auto", n_samples=201) -> ReducedCycle:
    """First return of the reduced flow from ``(reset_u, line_level)`` to the line.

    ``method`` is ``closed-form`` (focus Jacobians only), ``integrate`` or ``auto``.
    """
    _check_departure(red)
    params = red.focus_params()
    if method == "closed-form" and params is None:
        raise ValueError("closed form needs J = [[a, -b], [b, a]]")
    J = red.jacobian
    if method != "integrate" and params is not None:
        a, b = params
        T, grazing = _closed_form_cycle(red, a, b, n_samples)
        ts = np.linspace(0.0, T, n_samples)
        u0, v0 = red.start
        rho0, th0 = math.hypot(u0, v0), math.atan2(v0, u0)
        amp = rho0 * np.exp(a * ts)
        uv = np.column_stack([amp * np.cos(th0 + b * ts), amp * np.sin(th0 + b * ts)])
        landing = float(uv[-1, 0])
        return ReducedCycle(float(T), landing, np.column_stack([ts, uv]), grazing)
    vs = red.line_level
    opts = IntegratorOptions(rel_tol=REDUCED_OPTIONS.rel_tol, abs_tol=REDUCED_OPTIONS.abs_tol,
                             max_step=REDUCED_OPTIONS.max_step,
                             escape_radius=1e8 * max(1.0, float(np.abs(red.start).max())))
    ts, ys, interps, hit = _flow(lambda z: J @ z, red.start, 0.0, _horizon(J), opts,
                                 [(lambda t, z: z[1] - vs, +1)], CHATTER_GUARD)
    if hit is None or hit[0] < 0:
        raise NoReturn("reduced orbit does not return to the line")
    T = float(hit[1])
    seg = Segment("free-minus", ts, ys, interps)
    grid = np.linspace(0.0, T, n_samples)
    uv = seg(grid)
    uv[-1] = hit[2]
    vdot = float(J[1] @ hit[2])
    grazing = abs(vdot) <= GRAZING_TOL * max(1.0, float(np.abs(J).max()))
    return ReducedCycle(T, float(hit[2][0]), np.column_stack([grid, uv]), grazing)


# --------------------------------------------------------------------------
# full-system return map

def anchor_point(system, eps) -> np.ndarray:
    """Reset point for impacting systems, tangency point otherwise."""
    if isinstance(system, ImpactingSystem):
        return system.reset_point(eps)
    return solve_tangency(system.minus_field(), system.surface, eps).point


def return_time_map(system, eps, opts=None, t_max=None):
    """``(T_eps, landing)``: first upward surface hit of the minus-side flow from the anchor."""
    if eps == 0:
        red = build_reduced(system)
        cyc = reduced_cycle(red)
        return cyc.period, np.array([cyc.landing_u, red.line_level])
    opts = opts or IntegratorOptions()
    fm, surf = system.minus_field(), system.surface
    start = anchor_point(system, eps)
    t_max = _horizon(fm.jacobian(ORIGIN)) if t_max is None else t_max
    ts, ys, interps, hit = _flow(fm.func, start, 0.0, t_max, opts,
                                 [(lambda t, s: surf.func(s, eps), +1)], CHATTER_GUARD)
    if hit is None or hit[0] < 0:
        raise NoReturn(f"no surface return by t = {t_max}")
    return float(hit[1]), np.asarray(hit[2], dtype=float)


def transversality(system, eps, landing) -> float:
    """``<grad h, F->`` at the landing point; zero means grazing contact."""
    return float(system.surface.grad(landing, eps) @ system.minus_field()(landing))


# --------------------------------------------------------------------------
# reports

@dataclass
class HypothesisCheck:
    name: str
    passed: Optional[bool]
    value: float = float("nan")
    note: str = ""

    def __post_init__(self):
        # numpy bools would slip past the ``is False`` tests in the verdict
        if self.passed is not None:
            self.passed = bool(self.passed)

    @property
    def status(self) -> str:
        return {True: "pass", False: "fail", None: "undetermined"}[self.passed]


@dataclass
class ConfirmationRecord:
    epsilon: float
    start: np.ndarray
    landing: np.ndarray
    return_time: float
    period: float
    closure_error: float
    amplitude: float
    trajectory: Trajectory = field(repr=False)


STRUCTURAL_CHECKS = ("setup_valid", "gx_nonzero", "pseudo_equilibrium_nondegenerate",
                     "fx_gx_nonzero", "plus_field_pushes_down")


@dataclass
class BifurcationReport:
    system_class: str
    derivatives: dict
    checks: List[HypothesisCheck]
    reduced_cycle: Optional[ReducedCycle]
    verdict: str
    diagnostics: dict = field(default_factory=dict)
    confirmation: Optional[ConfirmationRecord] = None
    confirmation_error: str = ""

    def check(self, name) -> HypothesisCheck:
        for c in self.checks:
            if c.name == name:
                return c
        raise KeyError(name)

    def to_dict(self) -> dict:
        out = {"system_class": self.system_class, "verdict": self.verdict,
               "derivatives": {k: float(v) for k, v in self.derivatives.items()},
               "checks": [{"name": c.name, "status": c.status, "value": float(c.value),
                           "note": c.note} for c in self.checks],
               "diagnostics": {k: float(v) for k, v in self.diagnostics.items()}}
        if self.reduced_cycle is not None:
            out["reduced_cycle"] = {"T0": self.reduced_cycle.period,
                                    "landing_u": self.reduced_cycle.landing_u,
                                    "grazing": self.reduced_cycle.grazing}
        if self.confirmation is not None:
            c = self.confirmation
            out["confirmation"] = {"epsilon": c.epsilon, "return_time": c.return_time,
                                   "period": c.period, "closure_error": c.closure_error,
                                   "amplitude": c.amplitude,
                                   "start": [float(x) for x in c.start],
                                   "landing": [float(x) for x in c.landing]}
        if self.confirmation_error:
            out["confirmation_error"] = self.confirmation_error
        return out

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, allow_nan=True) + "\n"

    def to_text(self) -> str:
        d = self.to_dict()
        lines = [f"system_class = {d['system_class']}", f"verdict = {d['verdict']}"]
        for k, v in d["derivatives"].items():
            lines.append(f"derivative.{k} = {v!r}")
        for c in d["checks"]:
            lines.append(f"check.{c['name']} = {c['status']}")
            lines.append(f"check.{c['name']}.value = {c['value']!r}")
            if c["note"]:
                lines.append(f"check.{c['name']}.note = {c['note']}")
        if "reduced_cycle" in d:
            for k, v in d["reduced_cycle"].items():
                lines.append(f"reduced.{k} = {v!r}")
        for k, v in d["diagnostics"].items():
            lines.append(f"diagnostic.{k} = {v!r}")
        for k, v in d.get("confirmation", {}).items():
            lines.append(f"confirmation.{k} = {v!r}")
        if self.confirmation_error:
            lines.append(f"confirmation.error = {self.confirmation_error}")
        return "\n".join(lines) + "\n"


def _verdict(checks):
    by_name = {c.name: c for c in checks}
    if any(by_name[n].passed is False for n in STRUCTURAL_CHECKS if n in by_name):
        return "inconclusive"
    if any(c.passed is False for c in checks):
        return "not-predicted"
    if any(c.passed is None for c in checks):
        return "inconclusive"
    return "cycle-predicted"


def _nonzero(name, value, tol=1e-12, note=""):
    return HypothesisCheck(name, bool(abs(value) > tol), float(value), note)


def _reduced_checks(red, checks):
    """Cycle existence plus transversal return; returns the cycle or None."""
    try:
        cyc = reduced_cycle(red)
    except (NoReturn, WrongImpactCount) as exc:
        checks.append(HypothesisCheck("reduced_cycle_exists", False, note=type(exc).__name__))
        checks.append(HypothesisCheck("transversal_return", None, note="no reduced cycle"))
        return None
    checks.append(HypothesisCheck("reduced_cycle_exists", True, cyc.period))
    J = red.jacobian
    vdot = float(J[1, 0] * cyc.landing_u + J[1, 1] * red.line_level)
    ok = (not cyc.grazing) and abs(vdot) > GRAZING_TOL
    checks.append(HypothesisCheck("transversal_return", ok, vdot,
                                  "grazing return" if cyc.grazing else ""))
    return cyc


def _segment_check(cyc, A, a_end, lam):
    if cyc is None:
        return HypothesisCheck("landing_in_sliding_segment", None, note="no reduced cycle")
    u = cyc.landing_u
    if lam < 0:
        lo, hi = min(a_end, A), max(a_end, A)
        margin = min(u - lo, hi - u)
        if abs(margin) <= SEGMENT_MARGIN:
            return HypothesisCheck("landing_in_sliding_segment", None, margin, "inside strictness margin")
        return HypothesisCheck("landing_in_sliding_segment", margin > 0, margin,
                               "between pseudo-equilibrium and tangency")
    gap = u - A
    if abs(gap) <= SEGMENT_MARGIN:
        return HypothesisCheck("landing_in_sliding_segment", None, gap, "inside strictness margin")
    return HypothesisCheck("landing_in_sliding_segment", True, gap, "differs from tangency")


def _diagnostics(sys, red, cyc):
    out = {"H_eps(0)": sys.surface.d_eps(ORIGIN, 0.0), "H_y(0)": sys.surface.grad(ORIGIN, 0.0)[1],
           "line_level": red.line_level, "reset_u": red.reset_u}
    if cyc is not None:
        J = red.jacobian
        z = np.array([cyc.landing_u, red.line_level])
        out["F_t(T0,0)"] = out["H_y(0)"] * float(J[1] @ z)
    return out


def _finish(report, system, confirm_eps, opts):
    if confirm_eps is not None and report.verdict == "cycle-predicted":
        try:
            report.confirmation = confirm_cycle(system, confirm_eps, opts)
        except FocusBifError as exc:
            report.confirmation_error = f"{type(exc).__name__}: {exc}"
    return report


def _reset_is_tangent(sys: ImpactingSystem):
    for e in np.geomspace(1e-4, sys.eps_max, 6):
        s = sys.reset_point(e)
        if abs(sys.surface.grad(s, e) @ sys.field(s)) > TANGENT_RESET_TOL:
            return False
    return True


def check_impacting(system: ImpactingSystem, confirm_eps=None, opts=None) -> BifurcationReport:
    sys = rotate_to_normal_form(system)
    val = validate_setup(sys)
    checks = [HypothesisCheck("setup_valid", val.ok, note="; ".join(c.name for c in val.failures()))]
    He = sys.surface.d_eps(ORIGIN, 0.0)
    checks.append(_nonzero("surface_moves_with_eps", He))
    red = build_reduced(sys)
    A = sys.reset_derivative()
    derivs = {"A'(0)": A[0], "B'(0)": A[1]}
    cyc = _reduced_checks(red, checks)
    if _reset_is_tangent(sys):
        if cyc is None:
            checks.append(HypothesisCheck("landing_differs_from_reset", None, note="no reduced cycle"))
        else:
            checks.append(_nonzero("landing_differs_from_reset", cyc.landing_u - A[0], SEGMENT_MARGIN,
                                   "tangent reset"))
    report = BifurcationReport("impacting", derivs, checks, cyc, _verdict(checks),
                               _diagnostics(sys, red, cyc))
    return _finish(report, system, confirm_eps, opts)


def _sliding_report(kind, sys, checks, confirm_eps, opts, original):
    fm, surf = sys.minus_field(), sys.surface
    derivs = {}
    He = surf.d_eps(ORIGIN, 0.0)
    try:
        A = tangency_derivative(fm, surf)
        derivs.update({"A'(0)": A[0], "B'(0)": A[1]})
        d = equilibrium_derivative(sys)
        derivs.update({"a'(0)": d[0], "b'(0)": d[1], "lambda'(0)": d[2]})
    except DegenerateData as exc:
        checks.append(HypothesisCheck("tangent_field_points_outward", None, note=str(exc)))
        checks.append(_nonzero("surface_moves_with_eps", He))
        return _finish(BifurcationReport(kind, derivs, checks, None, _verdict(checks)),
                       original, confirm_eps, opts)
    outward = check_outward_condition(sys)
    checks.append(HypothesisCheck("tangent_field_points_outward", outward < 0, outward))
    checks.append(_nonzero("surface_moves_with_eps", He))
    red = build_reduced(sys)
    cyc = _reduced_checks(red, checks)
    checks.append(_segment_check(cyc, A[0], d[0], d[2]))
    report = BifurcationReport(kind, derivs, checks, cyc, _verdict(checks), _diagnostics(sys, red, cyc))
    return _finish(report, original, confirm_eps, opts)


def check_filippov(system: FilippovSystem, confirm_eps=None, opts=None) -> BifurcationReport:
    sys = rotate_to_normal_form(system)
    val = validate_setup(sys)
    Hy = sys.surface.grad(ORIGIN, 0.0)[1]
    Jm = sys.field_minus.jacobian(ORIGIN)
    Fp = sys.field_plus(ORIGIN)
    cross = Jm[0, 0] * Fp[1] - Jm[1, 0] * Fp[0]
    checks = [HypothesisCheck("setup_valid", val.ok, note="; ".join(c.name for c in val.failures())),
              HypothesisCheck("plus_field_pushes_down", bool(Hy * Fp[1] < 0), Hy * Fp[1]),
              _nonzero("gx_nonzero", Jm[1, 0]),
              _nonzero("pseudo_equilibrium_nondegenerate", cross)]
    if any(c.passed is False for c in checks):
        return _finish(BifurcationReport("filippov", {}, checks, None, _verdict(checks)),
                       system, confirm_eps, opts)
    return _sliding_report("filippov", sys, checks, confirm_eps, opts, system)


def check_sweeping(system: SweepingProcess, confirm_eps=None, opts=None) -> BifurcationReport:
    sys = rotate_to_normal_form(system)
    val = validate_setup(sys)
    J = sys.field.jacobian(ORIGIN)
    checks = [HypothesisCheck("setup_valid", val.ok, note="; ".join(c.name for c in val.failures())),
              HypothesisCheck("fx_gx_nonzero", bool(abs(J[0, 0]) > 1e-12 and abs(J[1, 0]) > 1e-12),
                              min(abs(J[0, 0]), abs(J[1, 0])))]
    if any(c.passed is False for c in checks):
        return _finish(BifurcationReport("sweeping", {}, checks, None, _verdict(checks)),
                       system, confirm_eps, opts)
    return _sliding_report("sweeping", sys, checks, confirm_eps, opts, system)


def check_system(system, confirm_eps=None, opts=None) -> BifurcationReport:
    if isinstance(system, ImpactingSystem):
        return check_impacting(system, confirm_eps, opts)
    if isinstance(system, FilippovSystem):
        return check_filippov(system, confirm_eps, opts)
    if isinstance(system, SweepingProcess):
        return check_sweeping(system, confirm_eps, opts)
    raise TypeError(f"unsupported system {type(system).__name__}")


# --------------------------------------------------------------------------
# shooting confirmation

def _amplitude(traj: Trajectory, n=4000) -> float:
    best = float(np.hypot(*traj.states.T).max())
    for seg in traj.segments:
        if seg.t1 > seg.t0:
            pts = np.asarray(seg(np.linspace(seg.t0, seg.t1, max(2, n // len(traj.segments)))))
            best = max(best, float(np.hypot(pts[:, 0], pts[:, 1]).max()))
    return best


def _along_surface(system):
    """Unit tangent at the origin used to order points on the surface."""
    n = system.surface.grad(ORIGIN, 0.0)
    t = np.array([n[1], -n[0]])
    return t / np.linalg.norm(t)


def confirm_cycle(system, eps, opts=None, t_max=200.0, closure_tol=1e-6, start=None) -> ConfirmationRecord:
    """Simulate one loop from the anchor point and check it closes.

    Impacting systems must hit the surface once and reset.  Sliding classes must
    land inside the sliding segment, slide, and leave through the tangency point.
    ``start`` overrides the initial state (it must lie on the sliding segment).
    """
    if not eps > 0:
        raise ValueError("epsilon must be positive")
    opts = opts or IntegratorOptions()
    anchor = anchor_point(system, eps)
    s0 = anchor if start is None else np.asarray(start, dtype=float)
    radius = 1e8 * max(eps, float(np.abs(s0).max()))
    if not math.isfinite(opts.escape_radius):
        opts = IntegratorOptions(opts.rel_tol, opts.abs_tol, opts.event_tolerance, opts.max_step,
                                 opts.sweeping_step, opts.max_events, radius)
    if isinstance(system, ImpactingSystem):
        traj = simulate_impacting(system, s0, eps, t_max, opts, max_events=1)
        if not traj.events:
            raise ConfirmationFailed(f"no impact by t = {t_max} (NoReturn)")
        ev = traj.events[0]
        if abs(transversality(system, eps, ev.state)) <= GRAZING_TOL:
            raise ConfirmationFailed("grazing impact")
        closure = float(np.linalg.norm(system.reset_point(eps) - anchor))
        return ConfirmationRecord(eps, s0, ev.state, ev.time, ev.time, closure,
                                  _amplitude(traj), traj)

    simulate = simulate_filippov if isinstance(system, FilippovSystem) else simulate_sweeping
    landing_kind = "sliding-entry" if isinstance(system, FilippovSystem) else "constraint-contact"
    if isinstance(system, FilippovSystem):
        pe = solve_filippov_pseudo_equilibrium(system, eps)
    else:
        pe = solve_sweeping_boundary_equilibrium(system, eps)
    tau = _along_surface(system)
    lam_slope = equilibrium_derivative(system)[2]
    sigma_A, sigma_a = float(anchor @ tau), float(pe.point @ tau)

    def in_segment(p):
        if lam_slope > 0:
            return True
        sig = float(p @ tau)
        return min(sigma_A, sigma_a) < sig < max(sigma_A, sigma_a)

    on_segment_start = start is not None
    n_events = 1 if on_segment_start else 2
    traj = simulate(system, s0, eps, t_max, opts, max_events=n_events)
    evs = traj.events
    landing, t_land = s0, 0.0
    if not on_segment_start:
        if not evs:
            raise ConfirmationFailed(f"no surface return by t = {t_max} (NoReturn)")
        if evs[0].kind != landing_kind or traj.segments[1].mode not in ("sliding", "swept-boundary"):
            raise ConfirmationFailed(f"first contact is a {evs[0].kind}, not a landing in the sliding set")
        landing, t_land = evs[0].state, evs[0].time
        if not in_segment(landing):
            raise ConfirmationFailed("landing outside the pseudo-equilibrium/tangency segment")
        evs = evs[1:]
    elif not in_segment(s0):
        raise ConfirmationFailed("start is not on the sliding segment")
    if not evs:
        raise ConfirmationFailed(f"sliding did not reach the tangency point by t = {t_max}")
    exit_ev = evs[0]
    if exit_ev.kind != "sliding-exit":
        raise ConfirmationFailed(f"unexpected {exit_ev.kind} during sliding")
    closure = float(np.linalg.norm(exit_ev.state - anchor))
    if closure > closure_tol:
        raise ConfirmationFailed(f"sliding left at {exit_ev.state}, {closure:.3g} from the tangency point")
    return ConfirmationRecord(eps, s0, landing, t_land, exit_ev.time, closure, _amplitude(traj), traj)


@dataclass(frozen=True)
class ConvergenceRow:
    epsilon: float
    amplitude: float
    period: float
    return_time: float
    return_time_error: float


def convergence_study(system, eps_list, opts=None) -> List[ConvergenceRow]:
    """Confirmed-cycle size and return time against the reduced period, per positive epsilon."""
    T0 = reduced_cycle(build_reduced(system)).period
    rows = []
    for eps in eps_list:
        if not eps > 0:
            continue
        rec = confirm_cycle(system, eps, opts)
        rows.append(ConvergenceRow(float(eps), rec.amplitude, rec.period, rec.return_time,
                                   rec.return_time - T0))
    return rows

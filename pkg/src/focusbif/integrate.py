"""Event-driven integration for impacting, Filippov and sweeping systems.

Smooth arcs are advanced by scipy's Dormand-Prince RK45 stepper.  After every
accepted step the step's dense-output polynomial is scanned for sign changes of
the watched event functions and the earliest root is refined with Brent's
method; the arc is truncated there and the hybrid logic decides what happens
next (reset, sliding, crossing, release).
"""
from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from typing import Callable, List, Optional, Sequence, Tuple

import numpy as np
from scipy.integrate import RK45
from scipy.integrate._ivp.common import OdeSolution
from scipy.optimize import brentq

from .errors import (ChatterDetected, NotSliding, ProjectionDiverged, StepFailure,
                     ZeroGradient)
from .model import (FilippovSystem, ImpactingSystem, SweepingProcess, SwitchingSurface,
                    VectorField2, as_state)

CHATTER_GUARD = 1e-9
TANGENT_TOL = 1e-12
RELEASE_BAND = 1e-12
MIN_STEP = 1e-14
SUBSTEPS = 4
STABILIZATION_GAIN = 10.0

EVENT_KINDS = ("impact", "sliding-entry", "sliding-exit", "crossing", "constraint-contact")
MODES = ("free-minus", "free-plus", "sliding", "swept-boundary")


@dataclass(frozen=True)
class IntegratorOptions:
    rel_tol: float = 1e-10
    abs_tol: float = 1e-12
    event_tolerance: float = 1e-11
    max_step: float = 0.05
    sweeping_step: float = 1e-4
    max_events: int = 100
    escape_radius: float = math.inf

    def __post_init__(self):
        for name in ("rel_tol", "abs_tol", "event_tolerance", "max_step",
                     "sweeping_step", "max_events", "escape_radius"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive")


@dataclass(frozen=True)
class Event:
    time: float
    state: np.ndarray
    kind: str


class Segment:
    """One smooth arc of a trajectory in a single mode."""

    def __init__(self, mode, t, states, interpolants=None):
        self.mode = mode
        self.t = np.asarray(t, dtype=float)
        self.states = np.asarray(states, dtype=float).reshape(-1, 2)
        self._sol = None
        if interpolants:
            self._sol = OdeSolution(self.t, interpolants)

    @property
    def t0(self):
        return float(self.t[0])

    @property
    def t1(self):
        return float(self.t[-1])

    def __call__(self, t):
        if self._sol is not None:
            return self._sol(t).T
        t = np.asarray(t, dtype=float)
        return np.stack([np.interp(t, self.t, self.states[:, i]) for i in range(2)], axis=-1)

    def __repr__(self):
        return f"Segment({self.mode!r}, t=[{self.t0:.6g}, {self.t1:.6g}], n={len(self.t)})"


@dataclass
class Trajectory:
    segments: List[Segment] = field(default_factory=list)
    events: List[Event] = field(default_factory=list)

    @property
    def times(self) -> np.ndarray:
        return np.concatenate([s.t for s in self.segments])

    @property
    def states(self) -> np.ndarray:
        return np.vstack([s.states for s in self.segments])

    @property
    def final_state(self) -> np.ndarray:
        return self.segments[-1].states[-1].copy()

    @property
    def final_time(self) -> float:
        return self.segments[-1].t1

    def state_at(self, t):
        """Dense evaluation; at a shared event instant the earlier segment wins."""
        t = float(t)
        for seg in self.segments:
            if seg.t0 <= t <= seg.t1:
                return np.asarray(seg(t), dtype=float)
        raise ValueError(f"t = {t} outside trajectory span")

    def sample(self, times) -> np.ndarray:
        """Vectorized :meth:`state_at` for a sorted array of times inside the span."""
        times = np.asarray(times, dtype=float)
        out = np.full((len(times), 2), np.nan)
        lo = 0
        for seg in self.segments:
            hi = np.searchsorted(times, seg.t1, side="right")
            if hi > lo:
                out[lo:hi] = seg(times[lo:hi])
            lo = max(lo, hi)
        if np.isnan(out).any():
            raise ValueError("sample times outside trajectory span")
        return out

    def max_h(self, surface: SwitchingSurface, eps, dense_points=0) -> float:
        """Largest ``h`` over the samples, plus ``dense_points`` interpolated points."""
        worst = max(surface(s, eps) for s in self.states)
        if dense_points:
            pts = self.sample(np.linspace(self.segments[0].t0, self.final_time, dense_points))
            worst = max(worst, max(surface(s, eps) for s in pts))
        return worst

    def write_csv(self, fp):
        marks = {ev.time: ev.kind for ev in self.events}
        w = csv.writer(fp, lineterminator="\n")
        w.writerow(["t", "x", "y", "mode", "event_kind"])
        for seg in self.segments:
            last = len(seg.t) - 1
            for i, (t, s) in enumerate(zip(seg.t, seg.states)):
                kind = marks.get(float(t), "") if i == last else ""
                w.writerow([repr(float(t)), repr(float(s[0])), repr(float(s[1])), seg.mode, kind])

    def to_csv(self, path=None):
        """Write the CSV to ``path``; return the text when ``path`` is None."""
        if path is None:
            buf = io.StringIO()
            self.write_csv(buf)
            return buf.getvalue()
        with open(path, "w", encoding="utf-8", newline="") as fp:
            self.write_csv(fp)


Watcher = Tuple[Callable[[float, np.ndarray], float], int]


def _first_root(dense, ta, tb, watchers, t_arm):
    lo = max(ta, t_arm)
    if lo >= tb:
        return None
    grid = np.linspace(lo, tb, SUBSTEPS + 1)
    pts = dense(grid)
    best = None
    for k, (fn, direction) in enumerate(watchers):
        vals = [fn(t, pts[:, i]) for i, t in enumerate(grid)]
        for i in range(SUBSTEPS):
            v0, v1 = vals[i], vals[i + 1]
            up = v0 < 0.0 <= v1
            down = v0 > 0.0 >= v1
            if (direction > 0 and up) or (direction < 0 and down) or (direction == 0 and (up or down)):
                if v1 == 0.0:
                    root = grid[i + 1]
                else:
                    root = brentq(lambda t: fn(t, dense(t)), grid[i], grid[i + 1],
                                  xtol=1e-15, maxiter=80)
                if best is None or root < best[1]:
                    best = (k, root)
                break
    return best


def _flow(rhs, s0, t0, t_end, opts, watchers: Sequence[Watcher] = (), guard=0.0):
    """Integrate ``s' = rhs(s)`` until ``t_end`` or the earliest watcher root.

    Returns ``(ts, states, interpolants, hit)`` where ``hit`` is
    ``(watcher_index, t, state)`` or None.  Watchers are only armed after
    ``t0 + guard``.  Escaping ``opts.escape_radius`` reports index ``-1``.
    """
    s0 = np.array(s0, dtype=float)
    ts, ys, interps = [t0], [s0], []
    if t_end <= t0:
        return ts, ys, interps, None
    watchers = list(watchers)
    if math.isfinite(opts.escape_radius):
        R = opts.escape_radius
        watchers.append((lambda t, s: math.hypot(s[0], s[1]) - R, +1))
    solver = RK45(lambda t, y: rhs(y), t0, s0, t_end, rtol=opts.rel_tol,
                  atol=opts.abs_tol, max_step=opts.max_step)
    t_arm = t0 + guard
    while solver.status == "running":
        solver.step()
        if solver.status == "failed":
            raise StepFailure(f"integrator failed at t = {solver.t}")
        if solver.status == "running" and solver.step_size is not None and solver.step_size < MIN_STEP:
            raise StepFailure(f"step size underflow at t = {solver.t}")
        dense = solver.dense_output()
        hit = _first_root(dense, solver.t_old, solver.t, watchers, t_arm)
        if hit is not None:
            k, th = hit
            sh = dense(th)
            if th > ts[-1]:
                ts.append(th)
                ys.append(sh)
                interps.append(dense)
            if math.isfinite(opts.escape_radius) and k == len(watchers) - 1:
                k = -1
            return ts, ys, interps, (k, th, sh)
        ts.append(solver.t)
        ys.append(solver.y.copy())
        interps.append(dense)
    return ts, ys, interps, None


def integrate_smooth(field: VectorField2, s0, t_span, opts: Optional[IntegratorOptions] = None) -> Segment:
    """Adaptive RK45 solution of ``s' = field(s)`` with dense output."""
    opts = opts or IntegratorOptions()
    t0, t1 = map(float, t_span)
    if t1 < t0:
        raise ValueError("t_span must be nondecreasing")
    ts, ys, interps, _ = _flow(field.func, as_state(s0), t0, t1, opts)
    return Segment("free-minus", ts, ys, interps)


def locate_event(segment: Segment, surface: SwitchingSurface, eps, opts=None, direction=0,
                 t_start=None) -> Optional[Event]:
    """Earliest root of ``t -> h(segment(t), eps)`` after ``t_start``, or None."""
    opts = opts or IntegratorOptions()
    if segment._sol is None:
        raise ValueError("segment has no dense output")
    watcher = (lambda t, s: surface.func(s, eps), direction)
    t_arm = segment.t0 if t_start is None else float(t_start)
    for ta, tb, interp in zip(segment.t[:-1], segment.t[1:], segment._sol.interpolants):
        hit = _first_root(interp, ta, tb, [watcher], t_arm)
        if hit is not None:
            t = hit[1]
            s = np.asarray(interp(t), dtype=float)
            kind = "crossing"
            return Event(float(t), s, kind)
    return None


def _watch_h(surface, eps, direction):
    return (lambda t, s: surface.func(s, eps), direction)


def _stabilized(velocity, surface, eps):
    """Append a restoring term ``-k h grad h / |grad h|^2`` to a tangential field."""
    def rhs(s):
        v = velocity(s)
        if surface.affine and abs(surface.func(s, eps)) < 1e-13:
            return v
        n = surface.grad(s, eps)
        return v - STABILIZATION_GAIN * surface.func(s, eps) * n / (n @ n)
    return rhs


def _check_chatter(events, t_arm, t):
    if events and t - t_arm < CHATTER_GUARD:
        raise ChatterDetected(f"two events within {CHATTER_GUARD} at t = {t}")


# --------------------------------------------------------------------------
# impacting systems

def simulate_impacting(sys: ImpactingSystem, s0, eps, t_max, opts=None, max_events=None) -> Trajectory:
    """Flow while ``h < 0``; on each upward crossing jump to ``reset(eps)``."""
    opts = opts or IntegratorOptions()
    max_events = opts.max_events if max_events is None else max_events
    s = as_state(s0)
    if sys.surface(s, eps) > opts.event_tolerance:
        raise ValueError("initial state must satisfy h <= 0")
    traj = Trajectory()
    t = 0.0
    guard = CHATTER_GUARD if abs(sys.surface(s, eps)) <= opts.event_tolerance else 0.0
    watch = [_watch_h(sys.surface, eps, +1)]
    while t < t_max and len(traj.events) < max_events:
        ts, ys, interps, hit = _flow(sys.field.func, s, t, t_max, opts, watch, guard)
        traj.segments.append(Segment("free-minus", ts, ys, interps))
        if hit is None or hit[0] < 0:
            break
        _, th, sh = hit
        _check_chatter(traj.events, t + guard, th)
        traj.events.append(Event(float(th), np.asarray(sh), "impact"))
        t, s, guard = float(th), sys.reset_point(eps), CHATTER_GUARD
        # a reset point whose flow heads straight back across would re-impact at once
        if float(sys.surface.grad(s, eps) @ sys.field.func(s)) > TANGENT_TOL:
            raise ChatterDetected(f"reset point {s} flows back across the surface at t = {t}")
    return traj


# --------------------------------------------------------------------------
# Filippov systems

def _normal_components(sys: FilippovSystem, s, eps):
    n = sys.surface.grad(s, eps)
    return n, float(n @ sys.field_minus.func(s)), float(n @ sys.field_plus.func(s))


def filippov_sliding_field(sys: FilippovSystem, s, eps):
    """Filippov convex combination ``a F+ + (1 - a) F-`` tangent to the surface.

    Returns ``(velocity, a)``.  Raises :class:`NotSliding` unless ``F-`` pushes
    into the surface from below and ``F+`` from above.
    """
    s = as_state(s)
    n, q, p = _normal_components(sys, s, eps)
    if not (q >= -TANGENT_TOL and p <= TANGENT_TOL) or q - p <= 0.0:
        raise NotSliding(f"no sliding at {s}: <n,F-> = {q:.3g}, <n,F+> = {p:.3g}")
    alpha = min(max(q / (q - p), 0.0), 1.0)
    v = alpha * sys.field_plus.func(s) + (1.0 - alpha) * sys.field_minus.func(s)
    return v, alpha


def _sliding_velocity(sys: FilippovSystem, eps):
    fp, fm, surf = sys.field_plus.func, sys.field_minus.func, sys.surface

    def vel(s):
        n = surf.grad(s, eps)
        Fp, Fm = fp(s), fm(s)
        q, p = n @ Fm, n @ Fp
        den = q - p
        alpha = min(max(q / den, 0.0), 1.0) if den > 0 else 0.0
        return alpha * Fp + (1.0 - alpha) * Fm
    return vel


def _filippov_mode_on_surface(sys, s, eps):
    _, q, p = _normal_components(sys, s, eps)
    if q > TANGENT_TOL and p < -TANGENT_TOL:
        return "sliding"
    if q > TANGENT_TOL and p > TANGENT_TOL:
        return "free-plus"
    return "free-minus"


def simulate_filippov(sys: FilippovSystem, s0, eps, t_max, opts=None, max_events=None) -> Trajectory:
    """Alternate free flow on either side with Filippov sliding along ``h = 0``."""
    opts = opts or IntegratorOptions()
    max_events = opts.max_events if max_events is None else max_events
    surf = sys.surface
    s = as_state(s0)
    h0 = surf(s, eps)
    if abs(h0) <= opts.event_tolerance:
        mode, guard = _filippov_mode_on_surface(sys, s, eps), CHATTER_GUARD
    else:
        mode, guard = ("free-minus" if h0 < 0 else "free-plus"), 0.0
    sliding_rhs = _stabilized(_sliding_velocity(sys, eps), surf, eps)
    fm, fp = sys.field_minus.func, sys.field_plus.func
    traj = Trajectory()
    t = 0.0
    while t < t_max and len(traj.events) < max_events:
        if mode == "free-minus":
            rhs, watch = fm, [_watch_h(surf, eps, +1)]
        elif mode == "free-plus":
            rhs, watch = fp, [_watch_h(surf, eps, -1)]
        else:
            def q_of(t_, s_):
                return float(surf.grad(s_, eps) @ fm(s_))

            def minus_p_of(t_, s_):
                return -float(surf.grad(s_, eps) @ fp(s_))
            rhs, watch = sliding_rhs, [(q_of, -1), (minus_p_of, -1)]
        ts, ys, interps, hit = _flow(rhs, s, t, t_max, opts, watch, guard)
        traj.segments.append(Segment(mode, ts, ys, interps))
        if hit is None or hit[0] < 0:
            break
        k, th, sh = hit
        _check_chatter(traj.events, t + guard, th)
        sh = np.asarray(sh)
        _, q, p = _normal_components(sys, sh, eps)
        if mode == "sliding":
            kind = "sliding-exit"
            mode = "free-minus" if k == 0 else "free-plus"
        elif mode == "free-minus":
            if p < -TANGENT_TOL:
                kind, mode = "sliding-entry", "sliding"
            else:
                kind, mode = "crossing", "free-plus"
        else:
            if q > TANGENT_TOL:
                kind, mode = "sliding-entry", "sliding"
            else:
                kind, mode = "crossing", "free-minus"
        traj.events.append(Event(float(th), sh, kind))
        t, s, guard = float(th), sh, CHATTER_GUARD
    return traj


# --------------------------------------------------------------------------
# sweeping processes

def project_onto_constraint(surface: SwitchingSurface, p, eps, max_iter=50) -> np.ndarray:
    """Euclidean projection of ``p`` onto ``{h <= 0}``.

    Exact for affine surfaces; otherwise Newton on the KKT system
    ``x - p + mu grad h(x) = 0, h(x) = 0``.
    """
    p = np.asarray(p, dtype=float)
    hp = surface.func(p, eps)
    if hp <= 0.0:
        return p
    n = surface.grad(p, eps)
    nn = float(n @ n)
    if nn < 1e-24:
        raise ZeroGradient(f"gradient vanishes at {p}")
    mu = hp / nn
    x = p - mu * n
    if surface.affine:
        return x
    scale = max(1.0, float(np.abs(p).max()))
    for _ in range(max_iter):
        g = surface.grad(x, eps)
        r = np.concatenate([x - p + mu * g, [surface.func(x, eps)]])
        if np.abs(r).max() <= 1e-14 * scale:
            return x
        K = np.zeros((3, 3))
        K[:2, :2] = np.eye(2) + mu * surface.hessian(x, eps)
        K[:2, 2] = g
        K[2, :2] = g
        d = np.linalg.solve(K, -r)
        x = x + d[:2]
        mu = mu + d[2]
    raise ProjectionDiverged(f"KKT Newton did not converge from {p}")


def sweeping_step(proc: SweepingProcess, s, h_step, eps) -> np.ndarray:
    """One catch-up step: ``proj_C(s + h F(s))``."""
    s = np.asarray(s, dtype=float)
    return project_onto_constraint(proc.surface, s + h_step * proc.field.func(s), eps)


def catch_up(proc: SweepingProcess, s0, eps, t_max, step=None, opts=None):
    """Catch-up time stepping; returns ``(times, states)``."""
    opts = opts or IntegratorOptions()
    step = opts.sweeping_step if step is None else float(step)
    n = int(math.ceil(t_max / step - 1e-9))
    out = np.empty((n + 1, 2))
    s = as_state(s0)
    out[0] = s
    F, surf = proc.field.func, proc.surface
    affine = surf.affine
    if affine:
        nvec = surf.grad(s, eps)
        nn = float(nvec @ nvec)
    hfun = surf.func
    for i in range(1, n + 1):
        trial = s + step * F(s)
        hv = hfun(trial, eps)
        if hv > 0.0:
            trial = trial - (hv / nn) * nvec if affine else project_onto_constraint(surf, trial, eps)
        s = trial
        out[i] = s
    return step * np.arange(n + 1), out


def sweeping_sliding_field(proc: SweepingProcess, s, eps) -> np.ndarray:
    """Orthogonal projection of ``F(s)`` onto the tangent ``(-H_y, H_x)``."""
    s = as_state(s)
    n = proc.surface.grad(s, eps)
    if math.hypot(n[0], n[1]) < 1e-12:
        raise ZeroGradient(f"gradient vanishes at {s}")
    F = proc.field.func(s)
    if n @ F < -RELEASE_BAND:
        raise NotSliding(f"field points into the constraint at {s}")
    tan = np.array([-n[1], n[0]])
    return (F @ tan) / (tan @ tan) * tan


def _boundary_velocity(proc, eps):
    F, surf = proc.field.func, proc.surface

    def vel(s):
        n = surf.grad(s, eps)
        tan = np.array([-n[1], n[0]])
        return (F(s) @ tan) / (tan @ tan) * tan
    return vel


def simulate_sweeping(proc: SweepingProcess, s0, eps, t_max, opts=None, max_events=None) -> Trajectory:
    """Interior flow, then tangential sliding on ``h = 0`` while ``F`` pushes outward."""
    opts = opts or IntegratorOptions()
    max_events = opts.max_events if max_events is None else max_events
    surf, F = proc.surface, proc.field.func
    s = as_state(s0)
    if surf(s, eps) > opts.event_tolerance:
        raise ValueError("initial state must satisfy h <= 0")

    def normal(t_, s_):
        return float(surf.grad(s_, eps) @ F(s_))

    on_surface = abs(surf(s, eps)) <= opts.event_tolerance
    mode = "swept-boundary" if on_surface and normal(0, s) > RELEASE_BAND else "free-minus"
    guard = CHATTER_GUARD if on_surface else 0.0
    boundary_rhs = _stabilized(_boundary_velocity(proc, eps), surf, eps)
    traj = Trajectory()
    t = 0.0
    while t < t_max and len(traj.events) < max_events:
        if mode == "free-minus":
            rhs, watch = F, [_watch_h(surf, eps, +1)]
        else:
            rhs, watch = boundary_rhs, [(lambda t_, s_: normal(t_, s_) + RELEASE_BAND, -1)]
        ts, ys, interps, hit = _flow(rhs, s, t, t_max, opts, watch, guard)
        traj.segments.append(Segment(mode, ts, ys, interps))
        if hit is None or hit[0] < 0:
            break
        _, th, sh = hit
        _check_chatter(traj.events, t + guard, th)
        sh = np.asarray(sh)
        if mode == "free-minus":
            traj.events.append(Event(float(th), sh, "constraint-contact"))
            if normal(th, sh) > RELEASE_BAND:
                mode = "swept-boundary"
        else:
            traj.events.append(Event(float(th), sh, "sliding-exit"))
            mode = "free-minus"
        t, s, guard = float(th), sh, CHATTER_GUARD
    return traj

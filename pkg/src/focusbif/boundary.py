"""Tangency points, sliding/crossing split and pseudo-equilibria on the switching surface."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DegenerateData, NewtonDiverged, NotOnSurface, SingularJacobian
from .model import (FilippovSystem, SweepingProcess, SwitchingSurface, VectorField2,
                    as_state)

NEWTON_TOL = 1e-12
DET_TOL = 1e-14
SURFACE_TOL = 1e-10
INDICATOR_TOL = 1e-12
ORIGIN = np.zeros(2)


def newton(residual, jacobian, x0, tol=NEWTON_TOL, max_iter=50, max_halvings=10):
    """Newton's method with backtracking on residual increase."""
    x = np.array(x0, dtype=float)
    r = np.asarray(residual(x), dtype=float)
    norm = np.abs(r).max()
    for _ in range(max_iter):
        if norm <= tol:
            return x
        J = np.asarray(jacobian(x), dtype=float)
        if abs(np.linalg.det(J)) < DET_TOL:
            raise SingularJacobian(f"|det| < {DET_TOL} at {x}")
        step = np.linalg.solve(J, -r)
        t = 1.0
        for _ in range(max_halvings + 1):
            trial = x + t * step
            r_trial = np.asarray(residual(trial), dtype=float)
            n_trial = np.abs(r_trial).max()
            if n_trial < norm or n_trial <= tol:
                break
            t *= 0.5
        x, r, norm = trial, r_trial, n_trial
    if norm <= tol:
        return x
    raise NewtonDiverged(f"residual {norm:.3g} after {max_iter} iterations")


def search_radius(eps):
    return max(0.1, 10.0 * abs(eps))


@dataclass(frozen=True)
class TangencyPoint:
    epsilon: float
    point: np.ndarray
    derivative_at_zero: np.ndarray


@dataclass(frozen=True)
class PseudoEquilibrium:
    epsilon: float
    point: np.ndarray
    multiplier: float
    derivative_at_zero: np.ndarray
    residual: float


@dataclass(frozen=True)
class BoundaryClassification:
    point: np.ndarray
    kind: str
    indicator: float


def _surface_scale(surface: SwitchingSurface):
    """(H_eps(0), H_y(0)) with the check that the normalization holds."""
    Hy = surface.grad(ORIGIN, 0.0)[1]
    if abs(Hy) < 1e-12:
        raise DegenerateData("H_y(0) = 0")
    return surface.d_eps(ORIGIN, 0.0), Hy


def tangency_derivative(field_minus: VectorField2, surface: SwitchingSurface) -> np.ndarray:
    """``(H_eps/H_y) * (g_y/g_x, -1)`` at the origin."""
    He, Hy = _surface_scale(surface)
    J = field_minus.jacobian(ORIGIN)
    gx, gy = J[1, 0], J[1, 1]
    if gx == 0.0:
        raise DegenerateData("g_x(0) = 0")
    return (He / Hy) * np.array([gy / gx, -1.0])


def _tangency_system(field_minus, surface, eps):
    def residual(s):
        return np.array([surface.grad(s, eps) @ field_minus.func(s), surface.func(s, eps)])

    def jacobian(s):
        n = surface.grad(s, eps)
        F = field_minus.func(s)
        row0 = F @ surface.hessian(s, eps) + n @ field_minus.jacobian(s)
        return np.vstack([row0, n])
    return residual, jacobian


def solve_tangency(field_minus: VectorField2, surface: SwitchingSurface, eps, start=None) -> TangencyPoint:
    """Newton solve of ``<grad h, F-> = 0, h = 0`` seeded by the linear prediction."""
    d = tangency_derivative(field_minus, surface)
    residual, jacobian = _tangency_system(field_minus, surface, eps)
    x0 = eps * d if start is None else as_state(start)
    s = newton(residual, jacobian, x0)
    if np.abs(s).max() > search_radius(eps):
        raise NewtonDiverged(f"tangency solution {s} left the search box")
    return TangencyPoint(float(eps), s, d)


def classify_point(field_minus: VectorField2, surface: SwitchingSurface, s, eps) -> BoundaryClassification:
    """Sliding where ``F-`` pushes into the surface, crossing where it pulls away."""
    s = as_state(s)
    if abs(surface(s, eps)) > SURFACE_TOL:
        raise NotOnSurface(f"|h| = {abs(surface(s, eps)):.3g} at {s}")
    ind = float(surface.grad(s, eps) @ field_minus(s))
    if ind > INDICATOR_TOL:
        kind = "sliding"
    elif ind < -INDICATOR_TOL:
        kind = "crossing"
    else:
        kind = "tangent"
    return BoundaryClassification(s, kind, ind)


def filippov_pseudo_equilibrium_derivative(sys: FilippovSystem) -> np.ndarray:
    He, Hy = _surface_scale(sys.surface)
    Jm = sys.field_minus.jacobian(ORIGIN)
    fp, gp = sys.field_plus(ORIGIN)
    fx, fy, gx, gy = Jm[0, 0], Jm[0, 1], Jm[1, 0], Jm[1, 1]
    den = fx * gp - gx * fp
    if den == 0.0:
        raise DegenerateData("(f_x-, g_x-) parallel to (f+, g+) at the origin")
    return (He / Hy) * np.array([(fy * gp - gy * fp) / den, -1.0, -np.linalg.det(Jm) / den])


def _filippov_system(sys, eps):
    fm, fp, surf = sys.field_minus, sys.field_plus, sys.surface

    def residual(z):
        s, lam = z[:2], z[2]
        return np.concatenate([fm.func(s) - lam * fp.func(s), [surf.func(s, eps)]])

    def jacobian(z):
        s, lam = z[:2], z[2]
        K = np.zeros((3, 3))
        K[:2, :2] = fm.jacobian(s) - lam * fp.jacobian(s)
        K[:2, 2] = -fp.func(s)
        K[2, :2] = surf.grad(s, eps)
        return K
    return residual, jacobian


def solve_filippov_pseudo_equilibrium(sys: FilippovSystem, eps) -> PseudoEquilibrium:
    """Newton on ``F-(s) - lam F+(s) = 0, h(s) = 0``."""
    residual, jacobian = _filippov_system(sys, eps)
    if abs(np.linalg.det(jacobian(np.zeros(3)))) < DET_TOL:
        raise SingularJacobian("pseudo-equilibrium system singular at the origin")
    d = filippov_pseudo_equilibrium_derivative(sys)
    z = newton(residual, jacobian, eps * d)
    return PseudoEquilibrium(float(eps), z[:2], float(z[2]), d, float(np.abs(residual(z)).max()))


def sweeping_equilibrium_derivative(proc: SweepingProcess) -> np.ndarray:
    He, Hy = _surface_scale(proc.surface)
    J = proc.field.jacobian(ORIGIN)
    fx, fy, gx = J[0, 0], J[0, 1], J[1, 0]
    if fx == 0.0 or gx == 0.0:
        raise DegenerateData("f_x(0) and g_x(0) must both be nonzero")
    return (He / Hy) * np.array([fy / fx, -1.0, np.linalg.det(J) / (Hy * fx)])


def _sweeping_system(proc, eps):
    F, surf = proc.field, proc.surface

    def residual(z):
        s, lam = z[:2], z[2]
        return np.concatenate([F.func(s) + lam * surf.grad(s, eps), [surf.func(s, eps)]])

    def jacobian(z):
        s, lam = z[:2], z[2]
        n = surf.grad(s, eps)
        K = np.zeros((3, 3))
        K[:2, :2] = F.jacobian(s) + lam * surf.hessian(s, eps)
        K[:2, 2] = n
        K[2, :2] = n
        return K
    return residual, jacobian


def solve_sweeping_boundary_equilibrium(proc: SweepingProcess, eps) -> PseudoEquilibrium:
    """Newton on ``F(s) + lam grad h(s) = 0, h(s) = 0``."""
    d = sweeping_equilibrium_derivative(proc)
    residual, jacobian = _sweeping_system(proc, eps)
    z = newton(residual, jacobian, eps * d)
    return PseudoEquilibrium(float(eps), z[:2], float(z[2]), d, float(np.abs(residual(z)).max()))


def equilibrium_derivative(system) -> np.ndarray:
    """(a'(0), b'(0), lam'(0)) for either sliding class."""
    if isinstance(system, FilippovSystem):
        return filippov_pseudo_equilibrium_derivative(system)
    if isinstance(system, SweepingProcess):
        return sweeping_equilibrium_derivative(system)
    raise TypeError("pseudo-equilibria exist only for Filippov and sweeping systems")


def check_outward_condition(system) -> float:
    """Signed product whose negativity means the tangent field points out of the sliding set.

    ``(f_x-, f_y-)(0) . (A', B') * (A' - a') * lam'``.
    """
    fm = system.minus_field()
    A = tangency_derivative(fm, system.surface)
    a = equilibrium_derivative(system)
    J = fm.jacobian(ORIGIN)
    return float((J[0] @ A) * (A[0] - a[0]) * a[2])

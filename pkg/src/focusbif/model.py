"""In-memory description of planar piecewise-smooth systems.

States are plain ``numpy`` arrays of shape ``(2,)``.  A vector field maps a
state to its velocity; a switching surface is a scalar function ``h(s, eps)``
whose zero set separates the smooth regimes.  Three system classes are built
from these pieces:

* :class:`ImpactingSystem` -- flow where ``h < 0``, reset to a fixed point of
  the surface on contact;
* :class:`FilippovSystem` -- two fields glued along ``h = 0``;
* :class:`SweepingProcess` -- one field constrained to ``{h <= 0}``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional, Union

import numpy as np

from .errors import ZeroGradient

FD_STEP = 1e-6
JACOBIAN_TOL = 1e-5
RESET_TOL = 1e-10

State2 = np.ndarray


def as_state(s) -> np.ndarray:
    arr = np.asarray(s, dtype=float).reshape(2)
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"state must be finite, got {arr}")
    return arr


def central_jacobian(fun, s, step=FD_STEP):
    """Central-difference Jacobian of ``fun: R^2 -> R^n`` at ``s``."""
    s = np.asarray(s, dtype=float)
    cols = []
    for i in range(2):
        e = np.zeros(2)
        e[i] = step
        cols.append((np.asarray(fun(s + e), float) - np.asarray(fun(s - e), float)) / (2 * step))
    return np.stack(cols, axis=-1)


def probe_points(seed=0):
    """16 grid points plus 16 seeded uniform points in the box [-1, 1]^2."""
    g = np.linspace(-1.0, 1.0, 4)
    grid = np.array([(x, y) for x in g for y in g])
    rng = np.random.default_rng(seed)
    return np.vstack([grid, rng.uniform(-1.0, 1.0, size=(16, 2))])


@dataclass(frozen=True, eq=False)
class VectorField2:
    """Smooth planar vector field with optional closed-form Jacobian."""

    func: Callable[[np.ndarray], np.ndarray]
    jac: Optional[Callable[[np.ndarray], np.ndarray]] = None
    name: str = "field"

    def __call__(self, s) -> np.ndarray:
        return np.asarray(self.func(np.asarray(s, dtype=float)), dtype=float)

    @property
    def jacobian_mode(self) -> str:
        return "closed-form" if self.jac is not None else "finite-difference"

    def jacobian(self, s) -> np.ndarray:
        s = np.asarray(s, dtype=float)
        if self.jac is not None:
            return np.asarray(self.jac(s), dtype=float)
        return central_jacobian(self.func, s)


@dataclass(frozen=True, eq=False)
class SwitchingSurface:
    """Scalar switching function ``h(s, eps)``.

    ``affine`` marks surfaces of the form ``<n, s> + c(eps)`` with a constant
    normal ``n``; those get exact projections and a zero Hessian.
    """

    func: Callable[[np.ndarray, float], float]
    grad_func: Optional[Callable[[np.ndarray, float], np.ndarray]] = None
    d_eps_func: Optional[Callable[[np.ndarray, float], float]] = None
    affine: bool = False
    name: str = "surface"

    def __call__(self, s, eps) -> float:
        return float(self.func(np.asarray(s, dtype=float), float(eps)))

    @property
    def gradient_mode(self) -> str:
        return "closed-form" if self.grad_func is not None else "finite-difference"

    def grad(self, s, eps) -> np.ndarray:
        s = np.asarray(s, dtype=float)
        if self.grad_func is not None:
            return np.asarray(self.grad_func(s, float(eps)), dtype=float)
        return central_jacobian(lambda p: np.atleast_1d(self.func(p, eps)), s)[0]

    def d_eps(self, s, eps) -> float:
        s = np.asarray(s, dtype=float)
        if self.d_eps_func is not None:
            return float(self.d_eps_func(s, float(eps)))
        return (self.func(s, eps + FD_STEP) - self.func(s, eps - FD_STEP)) / (2 * FD_STEP)

    def hessian(self, s, eps) -> np.ndarray:
        if self.affine:
            return np.zeros((2, 2))
        H = central_jacobian(lambda p: self.grad(p, eps), np.asarray(s, dtype=float))
        return 0.5 * (H + H.T)


@dataclass(frozen=True, eq=False)
class ImpactingSystem:
    """Flow under ``field`` while ``h < 0``; on ``h = 0`` jump to ``reset(eps)``."""

    field: VectorField2
    surface: SwitchingSurface
    reset: Callable[[float], np.ndarray]
    reset_slope: Optional[np.ndarray] = None
    eps_max: float = 0.05
    kind = "impacting"

    def __post_init__(self):
        worst = max(abs(self.surface(self.reset_point(e), e))
                    for e in np.geomspace(1e-4, self.eps_max, 8))
        if worst > RESET_TOL:
            raise ValueError(f"reset curve leaves the switching surface (|h| = {worst:.3g})")

    @property
    def reset_derivative_mode(self) -> str:
        return "user-supplied" if self.reset_slope is not None else "finite-difference"

    def reset_point(self, eps) -> np.ndarray:
        return as_state(self.reset(float(eps)))

    def reset_derivative(self) -> np.ndarray:
        """(A'(0), B'(0)); Richardson-extrapolated forward differences if not supplied."""
        if self.reset_slope is not None:
            return as_state(self.reset_slope)
        r0 = self.reset_point(0.0)
        d1 = (self.reset_point(1e-3) - r0) / 1e-3
        d2 = (self.reset_point(1e-4) - r0) / 1e-4
        return (10.0 * d2 - d1) / 9.0

    def minus_field(self) -> VectorField2:
        return self.field


@dataclass(frozen=True, eq=False)
class FilippovSystem:
    field_plus: VectorField2
    field_minus: VectorField2
    surface: SwitchingSurface
    kind = "filippov"

    def minus_field(self) -> VectorField2:
        return self.field_minus


@dataclass(frozen=True, eq=False)
class SweepingProcess:
    """``s' in -N_C(s) + F(s)`` with ``C(eps) = {h <= 0}``."""

    field: VectorField2
    surface: SwitchingSurface
    kind = "sweeping"

    def __post_init__(self):
        pts = 0.1 * probe_points()
        if not any(self.surface(p, 1e-3) < 0 for p in pts):
            raise ValueError("constraint set has empty interior near the origin")

    def minus_field(self) -> VectorField2:
        return self.field


SystemSpec = Union[ImpactingSystem, FilippovSystem, SweepingProcess]


# --------------------------------------------------------------------------
# invariant checks

def jacobian_discrepancy(vf: VectorField2, points=None) -> float:
    """Max componentwise gap between ``vf.jacobian`` and central differences."""
    if points is None:
        points = probe_points()
    worst = 0.0
    for p in points:
        fd = central_jacobian(vf.func, p)
        worst = max(worst, float(np.max(np.abs(vf.jacobian(p) - fd))))
    return worst


def surface_discrepancy(surf: SwitchingSurface, eps_values=(0.0, 1e-2), points=None) -> float:
    if points is None:
        points = probe_points()
    worst = 0.0
    for e in eps_values:
        for p in points:
            fd_grad = central_jacobian(lambda q: np.atleast_1d(surf.func(q, e)), p)[0]
            fd_eps = (surf.func(p, e + FD_STEP) - surf.func(p, e - FD_STEP)) / (2 * FD_STEP)
            worst = max(worst, float(np.max(np.abs(surf.grad(p, e) - fd_grad))),
                        abs(surf.d_eps(p, e) - fd_eps))
    return worst


# --------------------------------------------------------------------------
# coordinate normalization

def normal_form_rotation(surface: SwitchingSurface) -> np.ndarray:
    """Rotation ``R`` taking ``grad h(0, 0, 0)`` onto the positive y-axis."""
    g = surface.grad(np.zeros(2), 0.0)
    if np.linalg.norm(g) < 1e-12:
        raise ZeroGradient("gradient of h vanishes at the origin")
    theta = math.pi / 2 - math.atan2(g[1], g[0])
    c, s = math.cos(theta), math.sin(theta)
    R = np.array([[c, -s], [s, c]])
    # snap exact quarter turns so axis swaps stay exact
    R[np.abs(R) < 1e-15] = 0.0
    return R


def rotate_field(vf: VectorField2, R: np.ndarray) -> VectorField2:
    Rt = R.T
    func = lambda z: R @ vf.func(Rt @ z)
    jac = None
    if vf.jac is not None:
        jac = lambda z: R @ vf.jac(Rt @ z) @ Rt
    return VectorField2(func, jac, name=vf.name)


def rotate_surface(surf: SwitchingSurface, R: np.ndarray) -> SwitchingSurface:
    Rt = R.T
    grad_func = None
    if surf.grad_func is not None:
        grad_func = lambda z, e: R @ surf.grad_func(Rt @ z, e)
    d_eps_func = None
    if surf.d_eps_func is not None:
        d_eps_func = lambda z, e: surf.d_eps_func(Rt @ z, e)
    return SwitchingSurface(lambda z, e: surf.func(Rt @ z, e), grad_func, d_eps_func,
                            affine=surf.affine, name=surf.name)


def rotate_to_normal_form(system: SystemSpec) -> SystemSpec:
    """Return ``system`` in rotated coordinates with ``H_x(0) = 0``, ``H_y(0) > 0``.

    Raises :class:`ZeroGradient` if ``grad h(0, 0, 0)`` vanishes.  An already
    normalized system is returned as is.
    """
    R = normal_form_rotation(system.surface)
    if np.allclose(R, np.eye(2), rtol=0, atol=1e-15):
        return system
    surf = rotate_surface(system.surface, R)
    if isinstance(system, ImpactingSystem):
        slope = None if system.reset_slope is None else R @ as_state(system.reset_slope)
        reset = system.reset
        return ImpactingSystem(rotate_field(system.field, R), surf,
                               lambda e: R @ as_state(reset(e)), slope, system.eps_max)
    if isinstance(system, FilippovSystem):
        return FilippovSystem(rotate_field(system.field_plus, R),
                              rotate_field(system.field_minus, R), surf)
    if isinstance(system, SweepingProcess):
        return SweepingProcess(rotate_field(system.field, R), surf)
    raise TypeError(f"unsupported system type {type(system).__name__}")


# --------------------------------------------------------------------------
# standing hypotheses

@dataclass(frozen=True)
class Check:
    name: str
    passed: bool
    residual: float


@dataclass(frozen=True)
class ValidationReport:
    checks: tuple

    @property
    def ok(self) -> bool:
        return all(c.passed for c in self.checks)

    def failures(self):
        return [c for c in self.checks if not c.passed]

    def __getitem__(self, name) -> Check:
        for c in self.checks:
            if c.name == name:
                return c
        raise KeyError(name)


def validate_setup(system: SystemSpec, tol=1e-10) -> ValidationReport:
    """Evaluate the standing hypotheses at the origin; never raises."""
    origin = np.zeros(2)
    F = system.minus_field()
    checks = []
    f0 = float(np.max(np.abs(F(origin))))
    checks.append(Check("equilibrium at origin", f0 <= tol, f0))
    h0 = abs(system.surface(origin, 0.0))
    checks.append(Check("surface through origin", h0 <= tol, h0))
    g = system.surface.grad(origin, 0.0)
    checks.append(Check("H_x(0) = 0", abs(g[0]) <= tol, abs(float(g[0]))))
    checks.append(Check("H_y(0) != 0", abs(g[1]) > 1e-12, abs(float(g[1]))))
    fields = [F] if not isinstance(system, FilippovSystem) else [system.field_minus, system.field_plus]
    for vf in fields:
        if vf.jac is not None:
            d = jacobian_discrepancy(vf)
            checks.append(Check(f"jacobian consistent ({vf.name})", d <= JACOBIAN_TOL, d))
    if isinstance(system, ImpactingSystem):
        worst = max(abs(system.surface(system.reset_point(e), e))
                    for e in np.geomspace(1e-4, system.eps_max, 8))
        checks.append(Check("reset on surface", worst <= RESET_TOL, worst))
    return ValidationReport(tuple(checks))


# --------------------------------------------------------------------------
# common field and surface constructors

def linear_field(J, name="linear") -> VectorField2:
    J = np.array(J, dtype=float)
    return VectorField2(lambda s: J @ s, lambda s: J, name=name)


def constant_field(v, name="constant") -> VectorField2:
    v = np.array(v, dtype=float)
    zero = np.zeros((2, 2))
    return VectorField2(lambda s: v.copy(), lambda s: zero, name=name)


def focus_field(a, b, c=0.0, name="focus") -> VectorField2:
    """``(a x - b y, b x + a y) + c (0, x^2)``."""
    a, b, c = float(a), float(b), float(c)

    def func(s):
        x, y = s[0], s[1]
        return np.array([a * x - b * y, b * x + a * y + c * x * x])

    def jac(s):
        return np.array([[a, -b], [b + 2 * c * s[0], a]])

    return VectorField2(func, jac, name=name)


def horizontal_surface(level=1.0, name="y - level*eps") -> SwitchingSurface:
    """``h = y - level * eps``."""
    level = float(level)
    n = np.array([0.0, 1.0])
    return SwitchingSurface(lambda s, e: s[1] - level * e, lambda s, e: n,
                            lambda s, e: -level, affine=True, name=name)


def affine_surface(normal, eps_coeff, name="affine") -> SwitchingSurface:
    """``h = <normal, s> + eps_coeff * eps``."""
    n = np.array(normal, dtype=float)
    k = float(eps_coeff)
    return SwitchingSurface(lambda s, e: float(n @ s) + k * e, lambda s, e: n,
                            lambda s, e: k, affine=True, name=name)


@dataclass(frozen=True)
class Polynomial2:
    """Sum of ``coeff * x**i * y**j`` terms, given as ``(i, j, coeff)`` rows."""

    terms: tuple

    def __post_init__(self):
        rows = tuple((int(i), int(j), float(c)) for i, j, c in self.terms)
        for i, j, _ in rows:
            if i < 0 or j < 0 or i + j > 3:
                raise ValueError(f"monomial x^{i} y^{j} outside degree 0..3")
        object.__setattr__(self, "terms", rows)

    def __call__(self, s) -> float:
        x, y = s[0], s[1]
        return sum(c * x**i * y**j for i, j, c in self.terms)

    def grad(self, s) -> np.ndarray:
        x, y = s[0], s[1]
        gx = sum(c * i * x**(i - 1) * y**j for i, j, c in self.terms if i)
        gy = sum(c * j * x**i * y**(j - 1) for i, j, c in self.terms if j)
        return np.array([gx, gy], dtype=float)


def polynomial_field(f_terms, g_terms, name="polynomial") -> VectorField2:
    pf, pg = Polynomial2(tuple(f_terms)), Polynomial2(tuple(g_terms))
    return VectorField2(lambda s: np.array([pf(s), pg(s)], dtype=float),
                        lambda s: np.vstack([pf.grad(s), pg.grad(s)]), name=name)


def polynomial_surface(terms, name="polynomial") -> SwitchingSurface:
    """``h = sum coeff * x**i * y**j * eps**k`` from ``(i, j, k, coeff)`` rows."""
    rows = tuple((int(i), int(j), int(k), float(c)) for i, j, k, c in terms)

    def func(s, e):
        x, y = s[0], s[1]
        return sum(c * x**i * y**j * e**k for i, j, k, c in rows)

    def grad(s, e):
        x, y = s[0], s[1]
        gx = sum(c * i * x**(i - 1) * y**j * e**k for i, j, k, c in rows if i)
        gy = sum(c * j * x**i * y**(j - 1) * e**k for i, j, k, c in rows if j)
        return np.array([gx, gy], dtype=float)

    def d_eps(s, e):
        x, y = s[0], s[1]
        return sum(c * k * x**i * y**j * e**(k - 1) for i, j, k, c in rows if k)

    affine = all(i + j <= 1 and (k == 0 or i + j == 0) for i, j, k, _ in rows)
    return SwitchingSurface(func, grad, d_eps, affine=affine, name=name)

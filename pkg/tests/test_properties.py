import math

import numpy as np
from hypothesis import given, settings
from hypothesis import strategies as st

from focusbif import builtins
from focusbif.bifurcation import ReducedHybridSystem, reduced_cycle
from focusbif.boundary import (filippov_pseudo_equilibrium_derivative, solve_tangency,
                               tangency_derivative)
from focusbif.errors import NoReturn, NoSolution, WrongImpactCount
from focusbif.integrate import filippov_sliding_field, project_onto_constraint
from focusbif.model import (FilippovSystem, SweepingProcess, affine_surface, constant_field,
                            focus_field, horizontal_surface, linear_field, rotate_to_normal_form)
from focusbif.normal_form import (filippov_region_test, psi, return_lhs, solve_return_point)

finite = st.floats(-5.0, 5.0, allow_nan=False)
positive = st.floats(0.05, 3.0)
angle = st.floats(-math.pi, math.pi)


@given(angle, positive, positive, st.floats(-1.0, 1.0))
def test_rotation_normalizes_any_line(theta, a, b, c):
    n = (math.cos(theta), math.sin(theta))
    sys = SweepingProcess(focus_field(a, b, c), affine_surface(n, -1.0))
    rot = rotate_to_normal_form(sys)
    g = rot.surface.grad(np.zeros(2), 0.0)
    assert abs(g[0]) <= 1e-12 and g[1] > 0
    # the field is conjugated, so speeds are preserved pointwise
    p = np.array([0.3, -0.2])
    R_p = rot.field(p)
    assert math.isclose(np.linalg.norm(R_p), np.linalg.norm(sys.field(np.linalg.solve(
        np.array([[n[1], -n[0]], [n[0], n[1]]]), p))), rel_tol=1e-9, abs_tol=1e-12)


@given(finite, st.floats(0.01, 5.0), finite, st.floats(-5.0, -0.01), st.floats(-2.0, 2.0))
def test_sliding_weight_in_unit_interval_and_tangent(fm_x, q, fp_x, p, x):
    sys = FilippovSystem(constant_field((fp_x, p)), constant_field((fm_x, q)), horizontal_surface())
    v, alpha = filippov_sliding_field(sys, (x, 0.0), 0.0)
    assert 0.0 <= alpha <= 1.0
    assert abs(v[1]) <= 1e-12 * max(1.0, q, -p)


@given(finite, finite, st.floats(-2.0, 2.0))
def test_halfplane_projection_is_nearest_feasible(px, py, eps):
    surf = horizontal_surface()
    x = project_onto_constraint(surf, (px, py), eps)
    assert surf(x, eps) <= 1e-12
    assert np.allclose(project_onto_constraint(surf, x, eps), x, atol=1e-12)
    expect = np.array([px, min(py, eps)])
    assert np.allclose(x, expect, atol=1e-12)


@given(st.floats(-3.0, 3.0), st.floats(-3.0, 3.0), st.floats(0.0, 50.0))
def test_psi_increasing_right_of_minimum(ratio, r, step):
    lo = max(r, -ratio)
    assert psi(lo + step + 1e-3, ratio) > psi(lo, ratio)


@given(st.floats(-2.0, -0.01), st.floats(0.1, 10.0))
def test_return_point_solves_equation(ratio, k):
    try:
        r = solve_return_point(ratio, k)
    except NoSolution:
        return
    assert r > -ratio
    assert math.isclose(psi(r, ratio), return_lhs(ratio, k), abs_tol=1e-10)


@settings(max_examples=50)
@given(st.floats(-1.0, 1.0), st.floats(-2.0, 2.0), st.floats(0.2, 2.0), st.floats(-1.0, 1.0),
       st.floats(1e-4, 5e-2))
def test_linear_tangency_scales_exactly(fx, fy, gx, gy, eps):
    fm = linear_field([[fx, fy], [gx, gy]])
    d = tangency_derivative(fm, horizontal_surface())
    p = solve_tangency(fm, horizontal_surface(), eps).point
    assert np.allclose(p, eps * d, rtol=1e-10, atol=1e-15)


@given(positive, positive, st.floats(-3.0, 3.0))
def test_filippov_derivative_closed_form(a, b, m):
    if abs(a + b * m) < 1e-3:
        return
    d = filippov_pseudo_equilibrium_derivative(builtins.filippov_normal_form(a=a, b=b, m=m))
    expect = [(b - a * m) / (a + b * m), 1.0, -(a * a + b * b) / (a + b * m)]
    assert np.allclose(d, expect, rtol=1e-12)


@given(st.floats(0.05, 2.0), st.floats(-3.0, 3.0))
def test_positive_lambda_branch_always_inside(ratio, m):
    if m < -ratio:
        assert filippov_region_test(ratio, m)


@settings(max_examples=40, deadline=None)
@given(st.floats(-0.5, 0.5), st.floats(0.3, 3.0), st.floats(0.2, 3.0), st.floats(0.25, 4.0))
def test_reduced_cycle_time_scaling(a, b, k, s):
    J = np.array([[a, -b], [b, a]])
    try:
        base = reduced_cycle(ReducedHybridSystem(J, -k, 1.0))
    except (NoReturn, WrongImpactCount):
        return
    scaled = reduced_cycle(ReducedHybridSystem(s * J, -k, 1.0))
    assert math.isclose(scaled.landing_u, base.landing_u, rel_tol=1e-9, abs_tol=1e-9)
    assert math.isclose(scaled.period * s, base.period, rel_tol=1e-9)

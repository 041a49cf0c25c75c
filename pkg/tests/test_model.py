import math

import numpy as np
import pytest

from focusbif import builtins
from focusbif.errors import ZeroGradient
from focusbif.model import (FilippovSystem, ImpactingSystem, Polynomial2, SweepingProcess,
                            VectorField2, affine_surface, central_jacobian, focus_field,
                            horizontal_surface, jacobian_discrepancy, linear_field,
                            polynomial_field, polynomial_surface, probe_points,
                            rotate_to_normal_form, surface_discrepancy, validate_setup)


def test_normalized_surface_returned_unchanged():
    sys = builtins.filippov_normal_form()
    assert rotate_to_normal_form(sys) is sys


def test_vertical_surface_becomes_horizontal():
    sys = SweepingProcess(focus_field(0.2, 1.0), affine_surface((1.0, 0.0), -1.0))
    rot = rotate_to_normal_form(sys)
    g = rot.surface.grad(np.zeros(2), 0.0)
    assert g == pytest.approx([0.0, 1.0], abs=1e-15)
    # h(x, y, eps) = y - eps in the new frame
    for p in probe_points():
        assert rot.surface(p, 0.3) == pytest.approx(p[1] - 0.3, abs=1e-14)


def test_diagonal_surface_rotation_conjugates_jacobian():
    r2 = math.sqrt(2.0)
    surf = affine_surface((1 / r2, 1 / r2), -1.0)
    J = np.array([[0.3, -1.2], [0.7, -0.1]])
    field = polynomial_field([(1, 0, 0.3), (0, 1, -1.2), (2, 0, 0.5)],
                             [(1, 0, 0.7), (0, 1, -0.1), (1, 1, 0.4)])
    rot = rotate_to_normal_form(SweepingProcess(field, surf))
    assert rot.surface.grad(np.zeros(2), 0.0) == pytest.approx([0.0, 1.0], abs=1e-14)
    # the unique rotation sending the unit normal g to (0, 1)
    g = np.array([1 / r2, 1 / r2])
    R = np.array([[g[1], -g[0]], [g[0], g[1]]])
    assert rot.field.jacobian(np.zeros(2)) == pytest.approx(R @ J @ R.T, abs=1e-12)
    for p in probe_points():
        fd = central_jacobian(rot.field.func, p)
        assert rot.field.jacobian(p) == pytest.approx(fd, abs=1e-6)


def test_zero_gradient_rejected():
    surf = polynomial_surface([(0, 2, 0, 1.0), (0, 0, 1, -1.0)])
    with pytest.raises(ZeroGradient):
        rotate_to_normal_form(SweepingProcess(focus_field(0.2, 1.0), surf))


def test_rotated_impacting_reset_stays_on_surface():
    surf = affine_surface((1.0, 0.0), -1.0)
    field = linear_field([[-1.0, -1.0], [1.0, -1.0]])
    sys = ImpactingSystem(field, surf, lambda e: (e, -e), reset_slope=(1.0, -1.0))
    rot = rotate_to_normal_form(sys)
    for e in (1e-3, 1e-2, 0.1):
        assert abs(rot.surface(rot.reset_point(e), e)) < 1e-14
    assert rot.reset_derivative() == pytest.approx(rot.reset_point(1.0), abs=1e-14)


def test_neuron_setup_all_checks_pass():
    report = validate_setup(builtins.neuron(a=-1.0, b=1.0, k=1.0))
    assert report.ok, report.failures()


def test_nonzero_field_at_origin_fails_equilibrium():
    field = polynomial_field([(0, 0, 1.0), (0, 1, -1.0)], [(1, 0, 1.0)])
    report = validate_setup(SweepingProcess(field, horizontal_surface()))
    chk = report["equilibrium at origin"]
    assert not chk.passed
    assert chk.residual == pytest.approx(1.0)


def test_quadratic_surface_fails_hy():
    surf = polynomial_surface([(0, 2, 0, 1.0), (0, 0, 1, -1.0)])
    report = validate_setup(SweepingProcess(focus_field(0.2, 1.0), surf))
    assert not report["H_y(0) != 0"].passed
    assert not report.ok


def test_validate_setup_is_repeatable():
    sys = builtins.filippov_normal_form(a=1.0, b=2.0, m=1.0, c=1.0)
    assert validate_setup(sys) == validate_setup(sys)


def test_inconsistent_jacobian_flagged():
    bad = VectorField2(lambda s: np.array([s[1], -s[0]]), lambda s: np.eye(2), name="bad")
    report = validate_setup(SweepingProcess(bad, horizontal_surface()))
    assert not report["jacobian consistent (bad)"].passed


def test_off_surface_reset_rejected():
    with pytest.raises(ValueError):
        ImpactingSystem(focus_field(-1.0, 1.0), horizontal_surface(), lambda e: (-e, 2 * e))


def test_sweeping_constraint_needs_interior():
    surf = polynomial_surface([(0, 2, 0, 1.0), (2, 0, 0, 1.0), (0, 0, 0, 1.0)])
    with pytest.raises(ValueError):
        SweepingProcess(focus_field(0.2, 1.0), surf)


def test_reset_slope_by_richardson():
    # reset(e) = (-2 e + 3 e^2, e); slope must come out as (-2, 1)
    sys = ImpactingSystem(focus_field(-1.0, 1.0), horizontal_surface(),
                          lambda e: (-2 * e + 3 * e * e, e))
    assert sys.reset_derivative() == pytest.approx([-2.0, 1.0], abs=1e-8)


@pytest.mark.parametrize("name", builtins.BUILTIN_NAMES)
@pytest.mark.parametrize("c", [0.0, 1.0])
def test_builtin_jacobians_match_finite_differences(name, c):
    sys = builtins.make_builtin(name, c=c)
    fields = [sys.field_minus, sys.field_plus] if isinstance(sys, FilippovSystem) else [sys.minus_field()]
    for vf in fields:
        assert jacobian_discrepancy(vf) < 1e-6
    assert surface_discrepancy(sys.surface) < 1e-6


def test_polynomial_surface_derivatives():
    surf = polynomial_surface([(0, 1, 0, 1.0), (2, 0, 0, 0.5), (1, 1, 1, -2.0), (0, 0, 2, 0.3)])
    assert not surf.affine
    assert surface_discrepancy(surf, eps_values=(0.0, 0.1, 0.5)) < 1e-6


def test_polynomial_degree_limit():
    with pytest.raises(ValueError):
        Polynomial2(((4, 0, 1.0),))


def test_focus_nonlinearity_is_quadratic_and_vanishes_at_origin():
    vf = focus_field(0.2, 1.0, c=1.0)
    assert vf(np.zeros(2)) == pytest.approx([0.0, 0.0])
    assert vf.jacobian(np.zeros(2)) == pytest.approx(np.array([[0.2, -1.0], [1.0, 0.2]]))
    assert vf(np.array([0.5, 0.0])) - focus_field(0.2, 1.0)(np.array([0.5, 0.0])) == pytest.approx([0, 0.25])

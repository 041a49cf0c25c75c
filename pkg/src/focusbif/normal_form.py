"""Closed-form return analysis for linear focus examples and region predicates.

All quantities are expressed through ``ratio = a/b``.  The return point ``r``
of the reduced cycle solves ``psi(r) = return_lhs(ratio, k)`` on the branch
``r > -ratio`` where ``psi`` is increasing.
"""
from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np
from scipy.optimize import bisect, brentq

from .errors import DomainError, NoSolution


def arccot(x):
    """Inverse cotangent with range (0, pi)."""
    return np.pi / 2 - np.arctan(x)


def psi(r, ratio):
    return ratio * (-np.pi / 2) - ratio * arccot(r) + 0.5 * np.log1p(np.square(r))


def psi_slope(r, ratio):
    return (ratio + r) / (1.0 + np.square(r))


def return_lhs(ratio, k):
    return ratio * (1.5 * np.pi) - ratio * arccot(-k) + 0.5 * np.log1p(k * k)


def return_time(ratio, k, r, b=1.0):
    """Free-flight time of the reduced focus cycle from angle of ``(-k, 1)`` to ``(r, 1)``."""
    return (2 * np.pi + arccot(r) - arccot(-k)) / b


def _solvable(ratio, k):
    return return_lhs(ratio, k) > psi(-ratio, ratio)


def solve_return_point(ratio, k) -> float:
    """Root of ``psi(r) = return_lhs(ratio, k)`` with ``r > -ratio``."""
    target = return_lhs(ratio, k)
    lo = -ratio
    if not psi(lo, ratio) < target:
        raise NoSolution(f"no return point for ratio={ratio}, k={k}")
    step = 1.0
    hi = lo + step
    while psi(hi, ratio) < target:
        step *= 2.0
        hi = lo + step
        if step > 1e300:
            raise NoSolution("bracket growth overflowed")
    r = brentq(lambda x: psi(x, ratio) - target, lo, hi, xtol=1e-15, maxiter=200)
    for _ in range(3):
        slope = psi_slope(r, ratio)
        if slope <= 0:
            break
        r_new = r - (psi(r, ratio) - target) / slope
        if not r_new > lo:
            break
        r = r_new
    return float(r)


def neuron_region_test(ratio, k) -> bool:
    if not (ratio < 0 and k > 0):
        raise DomainError("neuron family needs ratio < 0 and k > 0")
    return bool(_solvable(ratio, k))


def filippov_segment_end(ratio, m) -> float:
    """First coordinate slope ``a'(0)`` of the pseudo-equilibrium, ``(1 - ratio m)/(ratio + m)``."""
    return (1.0 - ratio * m) / (ratio + m)


def filippov_region_detail(ratio, m):
    """``(inside, note)`` where note names the branch that decided the answer."""
    if not ratio > 0:
        raise DomainError("Filippov family needs ratio > 0")
    if m < -ratio:
        return True, "m<-ratio"
    if m == -ratio:
        return False, "degenerate"
    q = filippov_segment_end(ratio, m)
    return bool(psi(q, ratio) > return_lhs(ratio, ratio)), "segment"


def filippov_region_test(ratio, m) -> bool:
    return filippov_region_detail(ratio, m)[0]


def sweeping_region_test(ratio, exact=False) -> bool:
    """Displayed closed-form inequality; ``exact=True`` substitutes ``m = 0`` into the Filippov test."""
    if not ratio > 0:
        raise DomainError("sweeping family needs ratio > 0")
    if exact:
        return filippov_region_test(ratio, 0.0)
    return bool(ratio * (4 * np.arctan(ratio) - 3 * np.pi) > 2 * np.log(ratio))


def _sweeping_gap(ratio, exact):
    if exact:
        return -3 * np.pi * ratio - 2 * np.log(ratio)
    return ratio * (4 * np.arctan(ratio) - 3 * np.pi) - 2 * np.log(ratio)


def sweeping_threshold(exact=False) -> float:
    """Root on (0, 1) of the sweeping inequality, bisection to 1e-10."""
    return float(bisect(_sweeping_gap, 1e-3, 1.0, args=(exact,), xtol=1e-10))


# --------------------------------------------------------------------------
# region grids

@dataclass(frozen=True)
class AxisSpec:
    name: str
    lo: float
    hi: float
    steps: int

    def __post_init__(self):
        if int(self.steps) < 1:
            raise ValueError("steps must be positive")

    def points(self) -> np.ndarray:
        if self.steps == 1:
            return np.array([float(self.lo)])
        return np.linspace(self.lo, self.hi, int(self.steps))


@dataclass
class RegionGrid:
    axis1: AxisSpec
    axis2: Optional[AxisSpec]
    values: np.ndarray
    notes: np.ndarray
    family: str = ""

    @property
    def shape(self):
        return self.values.shape

    def rows(self):
        p1 = self.axis1.points()
        p2 = self.axis2.points() if self.axis2 else [None]
        for i, x in enumerate(p1):
            for j, y in enumerate(p2):
                yield x, y, bool(self.values[i, j]), self.notes[i, j]

    def metadata(self) -> dict:
        def ax(a):
            return None if a is None else {"name": a.name, "lo": a.lo, "hi": a.hi, "steps": a.steps}
        return {"family": self.family, "axis1": ax(self.axis1), "axis2": ax(self.axis2),
                "shape": list(self.shape), "layout": "row-major (axis1 outer)",
                "true_cells": int(self.values.sum())}

    def to_csv(self, path=None):
        """CSV of cells; writes ``<path>.meta.json`` alongside when a path is given."""
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["axis1", "axis2", "value", "note"])
        for x, y, v, note in self.rows():
            w.writerow([repr(float(x)), "" if y is None else repr(float(y)), int(v), note])
        text = buf.getvalue()
        if path is None:
            return text
        with open(path, "w", encoding="utf-8", newline="") as fp:
            fp.write(text)
        with open(str(path) + ".meta.json", "w", encoding="utf-8") as fp:
            json.dump(self.metadata(), fp, indent=2, sort_keys=True)
            fp.write("\n")


def region_grid(test: Callable, axis1: AxisSpec, axis2: Optional[AxisSpec] = None, family="") -> RegionGrid:
    """Evaluate ``test`` on the grid; undefined cells are False with note ``undefined``.

    ``test`` may return a bool or a ``(bool, note)`` pair.
    """
    p1 = axis1.points()
    p2 = axis2.points() if axis2 else [None]
    values = np.zeros((len(p1), len(p2)), dtype=bool)
    notes = np.full(values.shape, "", dtype=object)
    for i, x in enumerate(p1):
        for j, y in enumerate(p2):
            try:
                out = test(x) if y is None else test(x, y)
            except DomainError:
                notes[i, j] = "undefined"
                continue
            if isinstance(out, tuple):
                values[i, j], notes[i, j] = bool(out[0]), out[1]
            else:
                values[i, j] = bool(out)
    return RegionGrid(axis1, axis2, values, notes, family)


REGION_FAMILIES = {
    "neuron": neuron_region_test,
    "filippov": filippov_region_detail,
    "sweeping": sweeping_region_test,
}

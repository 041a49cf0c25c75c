"""The three worked families: resonate-and-fire neuron, Filippov focus normal
form, and a focus swept by a half-plane constraint.

Every family shares the minus-side field ``(a x - b y, b x + a y) + M`` with
``M = c (0, x^2)`` (``c = 0`` switches the nonlinearity off) and the
switching function ``h = y - eps``.
"""
import numpy as np

from .errors import DomainError
from .model import (FilippovSystem, ImpactingSystem, SweepingProcess,
                    constant_field, focus_field, horizontal_surface)

BUILTIN_NAMES = ("neuron", "filippov-normal-form", "sweeping-halfplane")

BUILTIN_DEFAULTS = {
    "neuron": {"a": -0.1, "b": 1.0, "k": 2.0, "c": 0.0},
    "filippov-normal-form": {"a": 0.2, "b": 1.0, "m": 0.0, "c": 0.0},
    "sweeping-halfplane": {"a": 0.2, "b": 1.0, "c": 0.0},
}


def neuron(a=-0.1, b=1.0, k=2.0, c=0.0) -> ImpactingSystem:
    """Stable focus below ``y = eps`` with reset ``x -> -k eps`` on contact."""
    if not (a < 0 and b > 0 and k > 0):
        raise DomainError(f"neuron needs a < 0, b > 0, k > 0 (got a={a}, b={b}, k={k})")
    k = float(k)
    return ImpactingSystem(
        focus_field(a, b, c, name="neuron"),
        horizontal_surface(),
        lambda e: np.array([-k * e, e]),
        reset_slope=np.array([-k, 1.0]),
    )


def filippov_normal_form(a=0.2, b=1.0, m=0.0, c=0.0) -> FilippovSystem:
    """Focus ``(a, b)`` below ``y = eps``; constant field ``(m, -1)`` above."""
    if b <= 0:
        raise DomainError(f"filippov normal form needs b > 0 (got b={b})")
    return FilippovSystem(
        constant_field([m, -1.0], name="upper"),
        focus_field(a, b, c, name="focus"),
        horizontal_surface(),
    )


def sweeping_halfplane(a=0.2, b=1.0, c=0.0) -> SweepingProcess:
    """Focus ``(a, b)`` swept by the half-plane ``{y <= eps}``."""
    if b <= 0:
        raise DomainError(f"sweeping half-plane needs b > 0 (got b={b})")
    return SweepingProcess(focus_field(a, b, c, name="focus"), horizontal_surface())


def make_builtin(name, **params):
    try:
        factory = {"neuron": neuron,
                   "filippov-normal-form": filippov_normal_form,
                   "sweeping-halfplane": sweeping_halfplane}[name]
    except KeyError:
        raise KeyError(f"unknown builtin {name!r}; choose from {', '.join(BUILTIN_NAMES)}") from None
    merged = dict(BUILTIN_DEFAULTS[name])
    merged.update(params)
    return factory(**merged)

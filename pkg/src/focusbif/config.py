"""Declarative TOML run configuration: parsing, validation, rendering, system construction."""
from __future__ import annotations

import math
import re
import sys
from dataclasses import dataclass, field
from typing import Optional

import tomli_w

from .builtins import BUILTIN_NAMES, make_builtin
from .errors import DomainError, ParseError
from .integrate import IntegratorOptions
from .model import (FilippovSystem, ImpactingSystem, SweepingProcess, polynomial_field,
                    polynomial_surface)

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

COMMANDS = ("simulate", "bifurcate", "region", "confirm", "verify")
TOP_KEYS = {"command", "epsilon", "seed", "output", "system", "integrator", "simulate", "region"}
BUILTIN_PARAMS = {
    "neuron": ("a", "b", "k", "c"),
    "filippov-normal-form": ("a", "b", "m", "c"),
    "sweeping-halfplane": ("a", "b", "c"),
}
CLASS_TABLES = {
    "impacting": ("field", "surface", "reset"),
    "filippov": ("field_minus", "field_plus", "surface"),
    "sweeping": ("field", "surface"),
}
INTEGRATOR_KEYS = ("rel_tol", "abs_tol", "event_tolerance", "max_step", "sweeping_step", "max_events")
SIMULATE_KEYS = ("t_max", "start")
REGION_KEYS = ("family", "axis1", "axis2")
AXIS_KEYS = ("name", "lo", "hi", "steps")
REGION_FAMILIES = ("neuron", "filippov", "sweeping")


@dataclass(frozen=True)
class RunConfig:
    command: Optional[str] = None
    system: dict = field(default_factory=dict)
    epsilon: tuple = ()
    seed: int = 0
    output: str = "."
    integrator: dict = field(default_factory=dict)
    simulate: dict = field(default_factory=dict)
    region: dict = field(default_factory=dict)

    def options(self) -> IntegratorOptions:
        return IntegratorOptions(**self.integrator)


def _line_of(text, key, section=None):
    """1-based line of ``key = ...`` inside ``[section]`` (or a section header)."""
    current = ""
    header = re.compile(r"^\s*\[\s*([^\]]+?)\s*\]")
    assign = re.compile(r"^\s*(\"?)" + re.escape(key) + r"\1\s*=")
    for n, line in enumerate(text.splitlines(), 1):
        m = header.match(line)
        if m:
            current = m.group(1)
            if section is not None and current == f"{section}.{key}" or (section is None and current == key):
                return n
            continue
        if (section or "") == current and assign.match(line):
            return n
    return None


def _is_number(v):
    return isinstance(v, (int, float)) and not isinstance(v, bool)


class _Collector:
    def __init__(self, text):
        self.text = text
        self.errors = []

    def add(self, key, section, message):
        self.errors.append((_line_of(self.text, key, section), message))

    def number(self, value, key, section, positive=False):
        if not _is_number(value) or not math.isfinite(value):
            self.add(key, section, f"'{key}' must be a finite number")
            return None
        if positive and not value > 0:
            self.add(key, section, f"'{key}' must be positive")
            return None
        return float(value)


def _terms(col, rows, key, section, width):
    out = []
    if not isinstance(rows, list):
        col.add(key, section, f"'{key}' must be a list of coefficient rows")
        return out
    for row in rows:
        if not (isinstance(row, list) and len(row) == width and all(_is_number(v) for v in row)
                and all(math.isfinite(v) for v in row)):
            col.add(key, section, f"'{key}' rows must hold {width} finite numbers")
            return []
        if any(int(v) != v or v < 0 for v in row[:-1]):
            col.add(key, section, f"'{key}' exponents must be nonnegative integers")
            return []
        out.append([int(v) for v in row[:-1]] + [float(row[-1])])
    return out


def _validate_system(col, raw):
    if not isinstance(raw, dict):
        col.add("system", None, "'system' must be a table")
        return {}
    if "builtin" in raw:
        name = raw["builtin"]
        if name not in BUILTIN_NAMES:
            col.add("builtin", "system", f"unknown builtin '{name}'")
            return {}
        out = {"builtin": name}
        for key, value in raw.items():
            if key == "builtin":
                continue
            if key not in BUILTIN_PARAMS[name]:
                col.add(key, "system", f"unknown key '{key}' for builtin '{name}'")
                continue
            v = col.number(value, key, "system")
            if v is not None:
                out[key] = v
        try:
            make_builtin(name, **{k: v for k, v in out.items() if k != "builtin"})
        except DomainError as exc:
            bad = "k" if "k" in str(exc) and name == "neuron" else "builtin"
            col.add(bad if bad in raw else "builtin", "system", str(exc))
        return out
    cls = raw.get("class")
    if cls not in CLASS_TABLES:
        col.add("class" if "class" in raw else "system", "system" if "class" in raw else None,
                "system needs 'builtin' or 'class' in {impacting, filippov, sweeping}")
        return {}
    out = {"class": cls}
    for key, value in raw.items():
        if key == "class":
            continue
        if key not in CLASS_TABLES[cls]:
            col.add(key, "system", f"unknown key '{key}' for class '{cls}'")
            continue
        sect = f"system.{key}"
        if not isinstance(value, dict):
            col.add(key, "system", f"'{key}' must be a table")
            continue
        if key == "surface":
            allowed, width = ("h",), 4
        elif key == "reset":
            allowed, width = ("x", "y"), 2
        else:
            allowed, width = ("f", "g"), 3
        tbl = {}
        for sub, rows in value.items():
            if sub not in allowed:
                col.add(sub, sect, f"unknown key '{sub}' in [{sect}]")
                continue
            tbl[sub] = _terms(col, rows, sub, sect, width)
        for sub in allowed:
            if sub not in value:
                col.add(key, "system", f"[{sect}] needs '{sub}'")
        out[key] = tbl
    for key in CLASS_TABLES[cls]:
        if key not in raw:
            col.add("class", "system", f"class '{cls}' needs [system.{key}]")
    return out


def _validate_region(col, raw):
    out = {}
    for key, value in raw.items():
        if key not in REGION_KEYS:
            col.add(key, "region", f"unknown key '{key}' in [region]")
        elif key == "family":
            if value not in REGION_FAMILIES:
                col.add(key, "region", f"unknown region family '{value}'")
            else:
                out[key] = value
        else:
            if not isinstance(value, dict):
                col.add(key, "region", f"'{key}' must be an inline table")
                continue
            ax = {}
            for k, v in value.items():
                if k not in AXIS_KEYS:
                    col.add(key, "region", f"unknown axis key '{k}'")
                elif k == "name":
                    ax[k] = str(v)
                elif k == "steps":
                    if not (isinstance(v, int) and not isinstance(v, bool) and v >= 1):
                        col.add(key, "region", "axis 'steps' must be a positive integer")
                    else:
                        ax[k] = v
                else:
                    n = col.number(v, key, "region")
                    if n is not None:
                        ax[k] = n
            for k in AXIS_KEYS:
                if k not in value:
                    col.add(key, "region", f"axis '{key}' needs '{k}'")
            out[key] = ax
    return out


def parse_config(text: str) -> RunConfig:
    """Parse and validate; raises :class:`ParseError` listing ``(line, message)`` pairs."""
    try:
        raw = tomllib.loads(text)
    except tomllib.TOMLDecodeError as exc:
        m = re.search(r"line (\d+)", str(exc))
        raise ParseError([(int(m.group(1)) if m else None, f"syntax error: {exc}")]) from None
    col = _Collector(text)
    for key in raw:
        if key not in TOP_KEYS:
            col.add(key, None, f"unknown key '{key}'")
    kw = {}
    if "command" in raw:
        if raw["command"] not in COMMANDS:
            col.add("command", None, f"unknown command '{raw['command']}'")
        else:
            kw["command"] = raw["command"]
    if "epsilon" in raw:
        vals = raw["epsilon"] if isinstance(raw["epsilon"], list) else [raw["epsilon"]]
        eps = [col.number(v, "epsilon", None, positive=True) for v in vals]
        if not vals:
            col.add("epsilon", None, "'epsilon' list is empty")
        kw["epsilon"] = tuple(e for e in eps if e is not None)
    if "seed" in raw:
        if isinstance(raw["seed"], int) and not isinstance(raw["seed"], bool) and raw["seed"] >= 0:
            kw["seed"] = raw["seed"]
        else:
            col.add("seed", None, "'seed' must be a nonnegative integer")
    if "output" in raw:
        if isinstance(raw["output"], str):
            kw["output"] = raw["output"]
        else:
            col.add("output", None, "'output' must be a string")
    if "system" in raw:
        kw["system"] = _validate_system(col, raw["system"])
    for sect, keys in (("integrator", INTEGRATOR_KEYS), ("simulate", SIMULATE_KEYS)):
        if sect not in raw:
            continue
        vals = {}
        for key, value in raw[sect].items():
            if key not in keys:
                col.add(key, sect, f"unknown key '{key}' in [{sect}]")
            elif key == "start":
                if isinstance(value, list) and len(value) == 2 and all(_is_number(v) and math.isfinite(v) for v in value):
                    vals[key] = [float(v) for v in value]
                else:
                    col.add(key, sect, "'start' must be two finite numbers")
            elif key == "max_events":
                if isinstance(value, int) and not isinstance(value, bool) and value > 0:
                    vals[key] = value
                else:
                    col.add(key, sect, "'max_events' must be a positive integer")
            else:
                v = col.number(value, key, sect, positive=True)
                if v is not None:
                    vals[key] = v
        kw[sect] = vals
    if "region" in raw:
        kw["region"] = _validate_region(col, raw["region"])
    if col.errors:
        raise ParseError(sorted(col.errors, key=lambda e: (e[0] or 0, e[1])))
    return RunConfig(**kw)


def to_document(config: RunConfig) -> dict:
    doc = {}
    if config.command is not None:
        doc["command"] = config.command
    if config.epsilon:
        doc["epsilon"] = list(config.epsilon) if len(config.epsilon) > 1 else config.epsilon[0]
    doc["seed"] = config.seed
    doc["output"] = config.output
    for name in ("system", "integrator", "simulate", "region"):
        value = getattr(config, name)
        if value:
            doc[name] = value
    return doc


def render(config: RunConfig) -> str:
    return tomli_w.dumps(to_document(config))


def build_system(table: dict):
    """Instantiate the system described by a validated ``[system]`` table."""
    if "builtin" in table:
        return make_builtin(table["builtin"], **{k: v for k, v in table.items() if k != "builtin"})
    cls = table["class"]
    surface = polynomial_surface(table["surface"]["h"])

    def field_of(tbl, name):
        return polynomial_field(tbl["f"], tbl["g"], name=name)
    if cls == "impacting":
        rx, ry = table["reset"]["x"], table["reset"]["y"]

        def reset(e):
            return (sum(c * e ** k for k, c in rx), sum(c * e ** k for k, c in ry))
        slope = (sum(c for k, c in rx if k == 1), sum(c for k, c in ry if k == 1))
        return ImpactingSystem(field_of(table["field"], "field"), surface, reset, slope)
    if cls == "filippov":
        return FilippovSystem(field_of(table["field_plus"], "plus"), field_of(table["field_minus"], "minus"),
                              surface)
    return SweepingProcess(field_of(table["field"], "field"), surface)

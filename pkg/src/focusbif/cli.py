"""Command-line front end: ``focusbif {simulate,bifurcate,region,confirm,verify}``."""
from __future__ import annotations

import argparse
import csv
import sys
from dataclasses import replace
from pathlib import Path

from . import acceptance
from .bifurcation import anchor_point, check_system, convergence_study
from .config import COMMANDS, RunConfig, build_system, parse_config
from .errors import FocusBifError, ParseError
from .integrate import simulate_filippov, simulate_impacting, simulate_sweeping
from .model import FilippovSystem, ImpactingSystem
from .normal_form import REGION_FAMILIES, AxisSpec, region_grid

EXIT_OK, EXIT_FAIL, EXIT_INPUT = 0, 1, 2

DEFAULT_AXES = {
    "neuron": ({"name": "ratio", "lo": -2.0, "hi": 0.0, "steps": 200},
               {"name": "k", "lo": 0.0, "hi": 10.0, "steps": 200}),
    "filippov": ({"name": "ratio", "lo": 0.0, "hi": 2.0, "steps": 200},
                 {"name": "m", "lo": -3.0, "hi": 3.0, "steps": 200}),
    "sweeping": ({"name": "ratio", "lo": 0.0, "hi": 1.0, "steps": 1001}, None),
}


class InputError(Exception):
    pass


def _parser():
    p = argparse.ArgumentParser(prog="focusbif", description=__doc__)
    p.add_argument("command", nargs="?", choices=COMMANDS)
    p.add_argument("--config", type=Path)
    p.add_argument("--output", type=Path)
    p.add_argument("--seed", type=int)
    p.add_argument("--epsilon", help="comma-separated positive values")
    return p


def _epsilons(text):
    try:
        vals = tuple(float(v) for v in text.split(","))
    except ValueError:
        raise InputError(f"bad --epsilon value '{text}'") from None
    if not all(v > 0 for v in vals):
        raise InputError("epsilon must be positive")
    return vals


def _load(args) -> RunConfig:
    if args.config is not None:
        try:
            text = args.config.read_text(encoding="utf-8")
        except OSError as exc:
            raise InputError(f"cannot read config: {exc}") from None
        cfg = parse_config(text)
    else:
        cfg = RunConfig()
    updates = {}
    if args.command:
        updates["command"] = args.command
    if args.output is not None:
        updates["output"] = str(args.output)
    if args.seed is not None:
        if args.seed < 0:
            raise InputError("seed must be nonnegative")
        updates["seed"] = args.seed
    if args.epsilon is not None:
        updates["epsilon"] = _epsilons(args.epsilon)
    cfg = replace(cfg, **updates)
    if cfg.command is None:
        raise InputError("no command given (positional argument or 'command' key)")
    return cfg


def _need_system(cfg):
    if not cfg.system:
        raise InputError(f"'{cfg.command}' needs a [system] table")
    try:
        return build_system(cfg.system)
    except ValueError as exc:
        raise InputError(f"invalid system: {exc}") from None


def _need_eps(cfg):
    if not cfg.epsilon:
        raise InputError(f"'{cfg.command}' needs epsilon")
    return cfg.epsilon


def _simulate(system, cfg, eps):
    opts = cfg.options()
    t_max = cfg.simulate.get("t_max", 50.0)
    start = cfg.simulate.get("start")
    s0 = anchor_point(system, eps) if start is None else start
    if isinstance(system, ImpactingSystem):
        return simulate_impacting(system, s0, eps, t_max, opts)
    if isinstance(system, FilippovSystem):
        return simulate_filippov(system, s0, eps, t_max, opts)
    return simulate_sweeping(system, s0, eps, t_max, opts)


def _cmd_simulate(cfg, out: Path):
    system = _need_system(cfg)
    eps_list = _need_eps(cfg)
    for i, eps in enumerate(eps_list):
        name = "trajectory.csv" if len(eps_list) == 1 else f"trajectory-{i}.csv"
        _simulate(system, cfg, eps).to_csv(out / name)
    return EXIT_OK


def _write_report(report, out: Path):
    (out / "report.txt").write_text(report.to_text(), encoding="utf-8")
    (out / "report.json").write_text(report.to_json(), encoding="utf-8")


def _cmd_bifurcate(cfg, out: Path):
    report = check_system(_need_system(cfg))
    _write_report(report, out)
    print(f"verdict = {report.verdict}")
    return EXIT_OK if report.verdict == "cycle-predicted" else EXIT_FAIL


def _cmd_confirm(cfg, out: Path):
    system = _need_system(cfg)
    eps_list = _need_eps(cfg)
    report = check_system(system, confirm_eps=eps_list[0], opts=cfg.options())
    _write_report(report, out)
    print(f"verdict = {report.verdict}")
    if report.confirmation is None:
        print(report.confirmation_error or "no confirmation attempted", file=sys.stderr)
        return EXIT_FAIL
    report.confirmation.trajectory.to_csv(out / "cycle.csv")
    if len(eps_list) > 1:
        rows = convergence_study(system, eps_list, cfg.options())
        with open(out / "convergence.csv", "w", encoding="utf-8", newline="") as fp:
            w = csv.writer(fp, lineterminator="\n")
            w.writerow(["epsilon", "amplitude", "period", "return_time", "return_time_error"])
            for r in rows:
                w.writerow([repr(r.epsilon), repr(r.amplitude), repr(r.period), repr(r.return_time),
                            repr(r.return_time_error)])
    print(f"closure_error = {report.confirmation.closure_error!r}")
    return EXIT_OK


def _cmd_region(cfg, out: Path):
    family = cfg.region.get("family")
    if family is None:
        raise InputError("'region' needs [region] family")
    d1, d2 = DEFAULT_AXES[family]
    ax1 = AxisSpec(**cfg.region.get("axis1", d1))
    raw2 = cfg.region.get("axis2", d2)
    if family == "sweeping":
        raw2 = None
    ax2 = AxisSpec(**raw2) if raw2 else None
    grid = region_grid(REGION_FAMILIES[family], ax1, ax2, family=family)
    grid.to_csv(out / "region.csv")
    print(f"true cells = {int(grid.values.sum())} of {grid.values.size}")
    return EXIT_OK


def _cmd_verify(cfg, out: Path):
    results = acceptance.run_all(seed=cfg.seed, stream=sys.stdout)
    passed = sum(r.passed for r in results)
    print(f"{passed}/{len(results)} criteria passed")
    return EXIT_OK if passed == len(results) else EXIT_FAIL


HANDLERS = {"simulate": _cmd_simulate, "bifurcate": _cmd_bifurcate, "confirm": _cmd_confirm,
            "region": _cmd_region, "verify": _cmd_verify}


def run(cfg: RunConfig) -> int:
    out = Path(cfg.output)
    try:
        out.mkdir(parents=True, exist_ok=True)
        return HANDLERS[cfg.command](cfg, out)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except FocusBifError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_FAIL


def main(argv=None) -> int:
    args = _parser().parse_args(argv)
    try:
        cfg = _load(args)
    except ParseError as exc:
        for line, msg in exc.errors:
            print(f"config line {line}: {msg}", file=sys.stderr)
        return EXIT_INPUT
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    return run(cfg)


if __name__ == "__main__":
    sys.exit(main())

"""Problem configuration files: schema, defaults, overrides.

A config is one JSON document:

    {
      "system": {"pendulum": {"alpha": 0.3, "beta": 0.9, "h_step": 0.04}},
      "horizon": 160,
      "x0": [1.0, 0.5],
      "target": [0.4, 0.0],
      "solver": {"algorithm": "pure", "direction_norm": "l1"},
      "refine": {"enabled": false}
    }

system is a tagged union: exactly one of "pendulum" (parameter dict),
"linear" ("A" and "B" as row-major nested arrays) or "control_affine"
(the name of a built-in model).  Solver defaults: eps 1e-9,
max_iterations 100, max_backtracks 60, shrink 0.5, beta0 unset (meaning
the initial residual); mu and L_const are required by the fixed policies.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

import numpy as np

from .dynamics import ControlAffineModel, LinearModel, PendulumModel, SystemModel
from .errors import ConfigError
from .newton import Adaptive, FixedL, FixedMuL, Pure, SolverConfig
from .shooting import ShootingProblem

_SOLVER_DEFAULTS = {
    "eps": 1e-9,
    "max_iterations": 100,
    "max_backtracks": 60,
    "shrink": 0.5,
}
_REFINE_DEFAULTS = {"enabled": False, "probe_steps": 1, "refine_eps": 1e-9}


@dataclass(frozen=True)
class RefineSettings:
    enabled: bool
    probe_steps: int
    refine_eps: float


def _vanderpol_model() -> ControlAffineModel:
    # forward-Euler van der Pol oscillator, torque on the velocity component
    h = 0.04

    def f(x):
        return np.array([x[0] + h * x[1],
                         x[1] + h * ((1.0 - x[0] ** 2) * x[1] - x[0])])

    def jac_f(x):
        return np.array([[1.0, h],
                         [h * (-2.0 * x[0] * x[1] - 1.0), 1.0 + h * (1.0 - x[0] ** 2)]])

    return ControlAffineModel(f, jac_f, [[0.0], [1.0]])


#: named control-affine systems addressable from config files
BUILTIN_MODELS = {
    "pendulum": lambda: PendulumModel(alpha=0.3, beta=0.9, h_step=0.04),
    "vanderpol": _vanderpol_model,
}


def bundled_config_path(name: str) -> Path:
    """Path of a config file shipped with the package (e.g. ``pendulum``)."""
    filename = name if name.endswith(".json") else name + ".json"
    path = resources.files("sparsenewton").joinpath("data", filename)
    with resources.as_file(path) as p:
        return Path(p)


def resolve_config_path(spec: str) -> Path:
    """Interpret --config values: an existing file, or a bundled name."""
    path = Path(spec)
    if path.is_file():
        return path
    try:
        bundled = bundled_config_path(spec)
    except Exception:
        bundled = None
    if bundled is not None and bundled.is_file():
        return bundled
    raise ConfigError(f"config file not found: {spec}")


def load_config(path) -> dict:
    """Read and minimally validate a raw config document."""
    try:
        with open(path, "r", encoding="utf-8") as fh:
            cfg = json.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config is not valid JSON: {exc}") from exc
    if not isinstance(cfg, dict):
        raise ConfigError("config must be a JSON object")
    return cfg


def apply_overrides(cfg: dict, overrides) -> dict:
    """Apply ``key.path=value`` strings on top of a config document.

    Values are parsed as JSON, falling back to plain strings, so
    ``solver.eps=1e-6``, ``refine.enabled=true`` and
    ``solver.algorithm=adaptive`` all do what they look like.
    """
    for item in overrides:
        key, sep, raw = item.partition("=")
        if not sep or not key:
            raise ConfigError(f"override must look like key=value, got {item!r}")
        try:
            value = json.loads(raw)
        except json.JSONDecodeError:
            value = raw
        node = cfg
        parts = key.split(".")
        for part in parts[:-1]:
            node = node.setdefault(part, {})
            if not isinstance(node, dict):
                raise ConfigError(f"override path {key!r} crosses a non-object")
        node[parts[-1]] = value
    return cfg


def _require(cfg: dict, key: str):
    if key not in cfg:
        raise ConfigError(f"config is missing required field {key!r}")
    return cfg[key]


def build_model(system: dict) -> SystemModel:
    if not isinstance(system, dict) or len(system) != 1:
        raise ConfigError("system must contain exactly one of "
                          "'pendulum', 'linear', 'control_affine'")
    (kind, body), = system.items()
    try:
        if kind == "pendulum":
            return PendulumModel(alpha=float(body["alpha"]), beta=float(body["beta"]),
                                 h_step=float(body["h_step"]))
        if kind == "linear":
            return LinearModel(np.asarray(body["A"], dtype=float),
                               np.asarray(body["B"], dtype=float))
        if kind == "control_affine":
            if body not in BUILTIN_MODELS:
                known = ", ".join(sorted(BUILTIN_MODELS))
                raise ConfigError(f"unknown builtin model {body!r}; available: {known}")
            return BUILTIN_MODELS[body]()
    except (KeyError, TypeError, ValueError) as exc:
        raise ConfigError(f"invalid {kind!r} system: {exc}") from exc
    raise ConfigError(f"unknown system kind {kind!r}")


def _build_policy(solver: dict):
    algorithm = _require(solver, "algorithm")
    if algorithm == "pure":
        return Pure()
    if algorithm == "fixed_mu_l":
        if "mu" not in solver or "L_const" not in solver:
            raise ConfigError("fixed_mu_l requires solver.mu and solver.L_const")
        return FixedMuL(mu=float(solver["mu"]), L_const=float(solver["L_const"]))
    if algorithm == "fixed_l":
        if "L_const" not in solver:
            raise ConfigError("fixed_l requires solver.L_const")
        return FixedL(L_const=float(solver["L_const"]))
    if algorithm == "adaptive":
        beta0 = solver.get("beta0")
        return Adaptive(beta0=None if beta0 is None else float(beta0),
                        shrink=float(solver.get("shrink", _SOLVER_DEFAULTS["shrink"])))
    raise ConfigError(f"unknown algorithm {algorithm!r}")


def build_problem(cfg: dict) -> ShootingProblem:
    model = build_model(_require(cfg, "system"))
    try:
        return ShootingProblem(model=model,
                               x0=np.asarray(_require(cfg, "x0"), dtype=float),
                               target=np.asarray(_require(cfg, "target"), dtype=float),
                               N=int(_require(cfg, "horizon")))
    except (TypeError, ValueError) as exc:
        raise ConfigError(str(exc)) from exc


def build_solver_config(cfg: dict) -> SolverConfig:
    solver = _require(cfg, "solver")
    try:
        return SolverConfig(
            policy=_build_policy(solver),
            direction_norm=_require(solver, "direction_norm"),
            eps=float(solver.get("eps", _SOLVER_DEFAULTS["eps"])),
            max_iterations=int(solver.get("max_iterations",
                                          _SOLVER_DEFAULTS["max_iterations"])),
            max_backtracks=int(solver.get("max_backtracks",
                                          _SOLVER_DEFAULTS["max_backtracks"])))
    except (TypeError, ValueError) as exc:
        raise ConfigError(str(exc)) from exc


def build_refine_settings(cfg: dict) -> RefineSettings:
    refine = {**_REFINE_DEFAULTS, **cfg.get("refine", {})}
    try:
        return RefineSettings(enabled=bool(refine["enabled"]),
                              probe_steps=int(refine["probe_steps"]),
                              refine_eps=float(refine["refine_eps"]))
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"invalid refine block: {exc}") from exc

"""Experiment configuration: parsing and range validation."""

from __future__ import annotations

import copy
import json
from dataclasses import dataclass, field
from numbers import Integral, Real

from .._validation import require
from ..exceptions import ConfigInvalid

KINDS = ("flow", "return-stats", "splitting", "volgrowth", "average-sweep", "defect",
         "bound-check", "boxdim", "acceptance")
STOCHASTIC = ("return-stats", "splitting", "volgrowth", "defect", "bound-check")
NEEDS_MODEL = ("flow", "return-stats", "splitting", "volgrowth", "average-sweep", "defect",
               "bound-check")
NEEDS_H = ("splitting", "volgrowth", "average-sweep", "bound-check")

# (type, low, high); float ranges starting at 0 exclude 0, all others are inclusive
RANGES = {
    "N": (int, 1, 10_000_000),
    "T": (float, 0.0, 10_000.0),
    "T_max": (float, 0.0, 10_000.0),
    "t": (float, -1e6, 1e6),
    "t0": (float, 0.0, 10.0),
    "eps": (float, 0.0, 1.0),
    "tol": (float, 0.0, 1.0),
    "quad_step": (float, 0.0, 1.0),
    "grid": (int, 8, 4096),
    "n_u": (int, 1, 4096),
    "depth": (int, 0, 26),
    "j_min": (int, 0, 30),
    "j_max": (int, 1, 30),
    "n": (int, 1, 10),
    "k": (int, 0, 10),
    "margin": (float, 0.0, 1.0),
}
SEED_MAX = 2**64 - 1


def _check_number(name, value):
    kind, lo, hi = RANGES[name]
    if isinstance(value, bool) or not isinstance(value, Real):
        raise ConfigInvalid(f"parameter '{name}' must be a number")
    if kind is int and not isinstance(value, Integral):
        raise ConfigInvalid(f"parameter '{name}' must be an integer")
    open_low = kind is float and lo == 0.0
    if not (lo < value if open_low else lo <= value) or value > hi:
        left = "(" if open_low else "["
        raise ConfigInvalid(f"parameter '{name}' = {value} outside its range {left}{lo}, {hi}]")


def _check_params(params):
    if not isinstance(params, dict):
        raise ConfigInvalid("'params' must be an object")
    for name, value in params.items():
        if name in RANGES:
            _check_number(name, value)
        elif name == "eps_ladder":
            if not isinstance(value, list) or not value:
                raise ConfigInvalid("'eps_ladder' must be a non-empty list")
            for v in value:
                _check_number("eps", v)
        elif name == "frequencies":
            if not isinstance(value, list) or len(value) < 4:
                raise ConfigInvalid("'frequencies' needs at least 4 entries")
            if not all(isinstance(v, Integral) and not isinstance(v, bool) and v > 0 for v in value):
                raise ConfigInvalid("'frequencies' must be positive integers")
            if any(b <= a for a, b in zip(value, value[1:])):
                raise ConfigInvalid("'frequencies' must be strictly increasing")
    if "grid" in params and params["grid"] & (params["grid"] - 1):
        raise ConfigInvalid("'grid' must be a power of two")


@dataclass
class ExperimentConfig:
    kind: str
    model: dict | None = None
    H: dict | None = None
    params: dict = field(default_factory=dict)
    seed: int | None = None
    output: dict = field(default_factory=dict)

    def to_dict(self):
        out = {"kind": self.kind, "params": copy.deepcopy(self.params), "output": dict(self.output)}
        if self.model is not None:
            out["model"] = copy.deepcopy(self.model)
        if self.H is not None:
            out["H"] = copy.deepcopy(self.H)
        if self.seed is not None:
            out["seed"] = self.seed
        return out


def validate_config(raw, *, kind=None, seed=None):
    """Check a raw JSON object and return an :class:`ExperimentConfig`.

    ``kind`` (from the CLI subcommand) fills in or must match the config's
    kind; ``seed`` overrides the config seed.
    """
    if not isinstance(raw, dict):
        raise ConfigInvalid("config must be a JSON object")
    cfg_kind = raw.get("kind", kind)
    if cfg_kind is None:
        raise ConfigInvalid("missing required field 'kind' in config")
    if kind is not None and cfg_kind != kind:
        raise ConfigInvalid(f"config kind '{cfg_kind}' does not match subcommand '{kind}'")
    if cfg_kind not in KINDS:
        raise ConfigInvalid(f"unknown experiment kind '{cfg_kind}'")
    unknown = set(raw) - {"kind", "model", "H", "params", "seed", "output"}
    if unknown:
        raise ConfigInvalid(f"unknown top-level field(s): {sorted(unknown)}")
    model = require(raw, "model", "config") if cfg_kind in NEEDS_MODEL else raw.get("model")
    if model is not None and not isinstance(model, dict):
        raise ConfigInvalid("'model' must be an object")
    H = raw.get("H")
    if cfg_kind in NEEDS_H:
        H = require(raw, "H", "config")
    if H is not None and not isinstance(H, dict):
        raise ConfigInvalid("'H' must be an object")
    params = raw.get("params", {})
    _check_params(params)
    if cfg_kind == "acceptance":
        require(params, "suite", "params")
    s = raw.get("seed") if seed is None else seed
    if s is not None and (isinstance(s, bool) or not isinstance(s, Integral) or not 0 <= s <= SEED_MAX):
        raise ConfigInvalid("'seed' must be an integer in [0, 2^64)")
    if cfg_kind in STOCHASTIC and s is None:
        raise ConfigInvalid(f"missing required field 'seed' in config (kind '{cfg_kind}' is stochastic)")
    output = raw.get("output", {})
    if not isinstance(output, dict):
        raise ConfigInvalid("'output' must be an object")
    return ExperimentConfig(cfg_kind, copy.deepcopy(model), copy.deepcopy(H), copy.deepcopy(params),
                            None if s is None else int(s), dict(output))


def load_config(path, **kw):
    with open(path) as fh:
        try:
            raw = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ConfigInvalid(f"config is not valid JSON: {exc}") from exc
    return validate_config(raw, **kw)

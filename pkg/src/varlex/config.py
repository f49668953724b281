"""JSON config parsing: registry lookup and validation for the CLI."""

from __future__ import annotations

import math

import numpy as np

from . import exponents, functions
from .errors import ConfigError


def build_exponent(spec) -> exponents.ExponentFunction:
    """{"name": <registry name>, ...params} -> ExponentFunction."""
    if not isinstance(spec, dict) or "name" not in spec:
        raise ConfigError("exponent spec must be an object with a 'name' field")
    spec = dict(spec)
    name = spec.pop("name")
    if name == "grid":
        try:
            return exponents.from_grid(spec["x"], spec["p"])
        except KeyError as exc:
            raise ConfigError(f"exponent grid spec is missing field {exc}") from exc
    if name == "constant" and isinstance(spec.get("value"), str):
        spec["value"] = math.inf if spec["value"] in ("inf", "infinity") else float(spec["value"])
    factory = exponents.REGISTRY.get(name)
    if factory is None:
        raise ConfigError(f"unknown exponent registry name {name!r} in field 'exponent'")
    try:
        return factory(**spec)
    except TypeError as exc:
        raise ConfigError(f"bad parameters for exponent {name!r}: {exc}") from exc


def build_function(spec) -> functions.VectorFunction:
    """{"name": <registry name>, ...params} or {"name": "grid", ...}."""
    if not isinstance(spec, dict) or "name" not in spec:
        raise ConfigError("function spec must be an object with a 'name' field")
    spec = dict(spec)
    name = spec.pop("name")
    translate = spec.pop("translate", None)
    reflect = spec.pop("reflect", False)
    if name == "grid":
        if "path" in spec:
            f = functions.from_csv(spec["path"])
        else:
            try:
                f = functions.from_grid(spec["t"], spec["values"])
            except KeyError as exc:
                raise ConfigError(f"function grid spec is missing field {exc}") from exc
    else:
        factory = functions.REGISTRY.get(name)
        if factory is None:
            raise ConfigError(f"unknown function registry name {name!r} in field 'function'")
        if "domain" in spec:
            spec["domain"] = tuple(float(x) for x in spec["domain"])
        try:
            f = factory(**spec)
        except TypeError as exc:
            raise ConfigError(f"bad parameters for function {name!r}: {exc}") from exc
    if translate is not None:
        f = f.translate(float(translate))
    if reflect:
        f = f.reflect()
    return f


def build_grid(spec) -> np.ndarray:
    """Either "a:b:step" or an explicit list."""
    if isinstance(spec, str):
        try:
            a, b, step = (float(x) for x in spec.split(":"))
        except ValueError as exc:
            raise ConfigError(f"grid string must be 'a:b:step', got {spec!r}") from exc
        if step <= 0 or b <= a:
            raise ConfigError(f"grid {spec!r} is empty or backwards")
        return np.arange(a, b + step / 2, step)
    grid = np.asarray(spec, dtype=float)
    if grid.size == 0:
        raise ConfigError("grid must be nonempty")
    return grid


def require(cfg: dict, field: str):
    if field not in cfg:
        raise ConfigError(f"config is missing required field {field!r}")
    return cfg[field]

"""Run configuration: JSON with comments, strict schema, canonical serializer."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from .boundaries import PLANES
from .errors import ConfigError, ParseError, RangeError, UnknownKey
from .model import SystemSpec, designed_example, klausmeier

__all__ = ["COMMANDS", "RunConfig", "build_system", "dump_config", "parse_config", "strip_comments"]

COMMANDS = ("verify", "coeffs", "diagram", "oracle", "calibrate", "scan")
PRESETS = ("designed_example", "klausmeier")

# preset -> allowed parameter keys with defaults
PRESET_PARAMS = {
    "designed_example": {"epsilon": 0.4},
    "klausmeier": {"a": 2.712, "m": 0.45, "d": 500.0},
}

_NUM, _INT, _STR, _BOOL, _AXIS, _LIST, _OBJ = "number", "integer", "string", "boolean", "axis", "list", "object"

# command -> key -> type
COMMAND_SCHEMA = {
    "verify": {},
    "coeffs": {"q_scale": _NUM},
    "diagram": {"plane": _STR, "x": _AXIS, "y": _AXIS, "fixed": _OBJ, "plot": _BOOL},
    "oracle": {"scenario": _STR, "eps_list": _LIST, "N": _INT, "N_lat": _INT},
    "calibrate": {"eps_list": _LIST, "N": _INT, "N_lat": _INT},
    "scan": {"model": _STR, "beta": _NUM, "kappa": _AXIS, "a": _AXIS, "N": _INT, "N_lat": _INT,
             "per_decade": _INT, "workers": _INT, "plot": _BOOL},
}
FIXED_KEYS = ("beta", "kappa_tilde", "q", "q_slope", "theta", "ell_tilde_square")
TOP_KEYS = ("system", "command", "params", "output_dir")
INLINE_KEYS = ("d1", "d2", "L", "M", "Q", "K", "polys", "name")


@dataclass(frozen=True)
class RunConfig:
    """Validated configuration.

    ``system`` is a preset name with ``system_params`` or an inline mapping
    accepted by :func:`build_system`.
    """

    command: str
    system: str | dict = "designed_example"
    system_params: dict = field(default_factory=dict)
    params: dict = field(default_factory=dict)
    output_dir: str = "out"


def strip_comments(text: str) -> str:
    """Blank out ``//`` and ``/* */`` comments outside strings, keeping line/column positions."""
    out = []
    i, n = 0, len(text)
    in_str = False
    while i < n:
        ch = text[i]
        if in_str:
            out.append(ch)
            if ch == "\\" and i + 1 < n:
                out.append(text[i + 1])
                i += 2
                continue
            if ch == '"':
                in_str = False
            i += 1
        elif ch == '"':
            in_str = True
            out.append(ch)
            i += 1
        elif text.startswith("//", i):
            j = text.find("\n", i)
            j = n if j < 0 else j
            out.append(" " * (j - i))
            i = j
        elif text.startswith("/*", i):
            j = text.find("*/", i + 2)
            if j < 0:
                line, col = _position(text, i)
                raise ParseError(line, col, "unterminated block comment")
            out.append("".join(c if c == "\n" else " " for c in text[i: j + 2]))
            i = j + 2
        else:
            out.append(ch)
            i += 1
    return "".join(out)


def _position(text: str, offset: int) -> tuple[int, int]:
    line = text.count("\n", 0, offset) + 1
    col = offset - (text.rfind("\n", 0, offset) + 1) + 1
    return line, col


def _locate(text: str, key: str) -> tuple[int, int]:
    off = text.find(f'"{key}"')
    return _position(text, off) if off >= 0 else (0, 0)


def _reject_constant(name):
    raise ValueError(f"non-finite constant {name} is not allowed")


def _check_keys(obj: dict, allowed, where: str, text: str):
    for key in obj:
        if key not in allowed:
            line, col = _locate(text, key)
            raise UnknownKey(f"line {line}, column {col}: unknown key {key!r} in {where}; allowed: {sorted(allowed)}")


def _typed(value, kind, key, text):
    line, col = _locate(text, key)

    def bad(msg):
        raise ParseError(line, col, f"{key}: {msg}")

    if kind == _NUM:
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            bad(f"expected a number, got {value!r}")
        if not math.isfinite(value):
            raise RangeError(f"{key} must be finite")
        return float(value)
    if kind == _INT:
        if isinstance(value, bool) or not isinstance(value, int):
            bad(f"expected an integer, got {value!r}")
        if value < 1:
            raise RangeError(f"{key} must be positive")
        return int(value)
    if kind == _STR:
        if not isinstance(value, str):
            bad(f"expected a string, got {value!r}")
        return value
    if kind == _BOOL:
        if not isinstance(value, bool):
            bad(f"expected true or false, got {value!r}")
        return value
    if kind == _LIST:
        if not isinstance(value, list) or not value:
            bad("expected a non-empty list of numbers")
        return [_typed(v, _NUM, key, text) for v in value]
    if kind == _AXIS:
        if not isinstance(value, list) or len(value) != 3:
            bad("expected [min, max, count_or_step]")
        lo, hi, third = (_typed(v, _NUM, key, text) for v in value)
        if not lo < hi:
            raise RangeError(f"{key}: min must be below max")
        return [lo, hi, third]
    if kind == _OBJ:
        if not isinstance(value, dict):
            bad("expected an object")
        _check_keys(value, FIXED_KEYS, key, text)
        return {k: _typed(v, _NUM, k, text) for k, v in value.items()}
    raise AssertionError(kind)


def _validate_params(command: str, params: dict, text: str) -> dict:
    schema = COMMAND_SCHEMA[command]
    _check_keys(params, schema, f"params of {command!r}", text)
    out = {k: _typed(v, schema[k], k, text) for k, v in params.items()}
    if command == "diagram":
        if out.get("plane", "kappa_alpha") not in PLANES:
            raise RangeError(f"plane must be one of {PLANES}")
        for ax in ("x", "y"):
            if ax in out:
                if out[ax][2] != int(out[ax][2]) or out[ax][2] < 2:
                    raise RangeError(f"{ax}: grid count must be an integer >= 2")
                out[ax][2] = int(out[ax][2])
        theta = out.get("fixed", {}).get("theta", 1.0)
        if not 0.0 < theta <= 1.0:
            raise RangeError("theta must lie in (0, 1]")
    if command in ("oracle", "calibrate") and "eps_list" in out:
        eps = out["eps_list"]
        if len(eps) < 2 or any(e <= 0 for e in eps) or any(b >= a for a, b in zip(eps, eps[1:])):
            raise RangeError("eps_list needs at least two positive, strictly decreasing values")
    if command == "scan":
        if out.get("model", "klausmeier") != "klausmeier":
            raise RangeError("scan supports model 'klausmeier' only")
        for ax in ("kappa", "a"):
            if ax in out and out[ax][2] <= 0:
                raise RangeError(f"{ax}: step must be positive")
    return out


def _validate_system(system, text):
    if isinstance(system, str):
        if system not in PRESETS:
            raise RangeError(f"unknown preset {system!r}; expected one of {PRESETS}")
        return system, {}
    if not isinstance(system, dict):
        line, col = _locate(text, "system")
        raise ParseError(line, col, "system must be a preset name or an object")
    if "preset" in system:
        name = system["preset"]
        if name not in PRESETS:
            raise RangeError(f"unknown preset {name!r}; expected one of {PRESETS}")
        rest = {k: v for k, v in system.items() if k != "preset"}
        _check_keys(rest, PRESET_PARAMS[name], f"preset {name!r}", text)
        return name, {k: _typed(v, _NUM, k, text) for k, v in rest.items()}
    _check_keys(system, INLINE_KEYS, "inline system", text)
    build_system(system, {})       # validates the inline definition
    return system, {}


def parse_config(text: str) -> RunConfig:
    """Parse and validate a configuration document.

    Raises
    ------
    ParseError
        Malformed syntax or a value of the wrong type (with line and column).
    UnknownKey
        A key outside the schema.
    RangeError
        A value outside its admissible range.
    """
    clean = strip_comments(text)
    try:
        doc = json.loads(clean, parse_constant=_reject_constant)
    except json.JSONDecodeError as exc:
        raise ParseError(exc.lineno, exc.colno, exc.msg) from None
    except ValueError as exc:
        raise ParseError(0, 0, str(exc)) from None
    if not isinstance(doc, dict):
        raise ParseError(1, 1, "top level must be an object")
    _check_keys(doc, TOP_KEYS, "configuration", clean)
    if "command" not in doc:
        raise ParseError(1, 1, "missing key 'command'")
    command = _typed(doc["command"], _STR, "command", clean)
    if command not in COMMANDS:
        raise RangeError(f"unknown command {command!r}; expected one of {COMMANDS}")
    system, sys_params = _validate_system(doc.get("system", "designed_example"), clean)
    params = doc.get("params", {})
    if not isinstance(params, dict):
        line, col = _locate(clean, "params")
        raise ParseError(line, col, "params must be an object")
    params = _validate_params(command, params, clean)
    out = _typed(doc.get("output_dir", "out"), _STR, "output_dir", clean)
    return RunConfig(command, system, sys_params, params, out)


def dump_config(cfg: RunConfig) -> str:
    """Canonical text for ``cfg``; ``parse_config(dump_config(cfg)) == cfg``."""
    if isinstance(cfg.system, str):
        system = {"preset": cfg.system, **cfg.system_params} if cfg.system_params else cfg.system
    else:
        system = cfg.system
    doc = {"command": cfg.command, "system": system, "params": cfg.params, "output_dir": cfg.output_dir}
    return json.dumps(doc, indent=2, sort_keys=True, allow_nan=False) + "\n"


def _poly(obj) -> dict:
    out = {}
    for key, val in obj.items():
        try:
            i, j = (int(p) for p in key.split(","))
        except ValueError:
            raise ConfigError(f"polynomial key {key!r} must look like 'i,j'") from None
        out[(i, j)] = float(val)
    return out


def build_system(system, system_params: dict) -> SystemSpec:
    """Instantiate the configured :class:`SystemSpec`."""
    if isinstance(system, str):
        params = dict(PRESET_PARAMS[system], **system_params)
        if system == "designed_example":
            return designed_example(params["epsilon"])
        return klausmeier(params["a"], params["m"], params["d"])
    d1, d2 = float(system["d1"]), float(system["d2"])
    M = np.asarray(system["M"], float) if "M" in system else None
    name = system.get("name", "custom")
    if "polys" in system:
        return SystemSpec.from_polynomial(d1, d2, [_poly(p) for p in system["polys"]], M=M, name=name)
    try:
        L = np.asarray(system["L"], float)
        Q = np.asarray(system["Q"], float)
        K = np.asarray(system["K"], float)
    except KeyError as exc:
        raise ConfigError(f"inline system needs {exc.args[0]!r} (or 'polys')") from None
    if M is None:
        raise ConfigError("inline system needs 'M'")
    return SystemSpec(d1, d2, L, M, Q, K, name=name)

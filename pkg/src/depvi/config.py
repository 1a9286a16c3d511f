"""Plain-text run configuration.

One ``key = value`` per line, ``#`` starts a comment. Values are numeric
expressions built from numbers, ``pi``, ``+ - * / **``, parentheses and
``deg(x)`` (degrees to radians). Vectors are comma-separated triples;
matrices are ``diag(a, b, c)`` or nine comma-separated entries in row-major
order. Omitted keys take the values of the reference experiment.
"""

from __future__ import annotations

import ast
import math
import operator
from dataclasses import dataclass, fields, replace

import numpy as np

from . import newton
from .group_maps import GroupDifferenceMap, get_map
from .vehicle import (
    DEFAULT_ADDED_MASS,
    DEFAULT_BUOYANCY,
    DEFAULT_BUOYANCY_OFFSET,
    DEFAULT_GRAVITY,
    DEFAULT_INERTIA,
    DEFAULT_MASS,
    ReducedState,
    VehicleParams,
    init_from_euler,
)

W_B_INTERPRETATION = "newtons_as_given"


class ConfigError(ValueError):
    pass


class ParseError(ConfigError):
    def __init__(self, line: int, message: str):
        super().__init__(f"line {line}: {message}")
        self.line = line


class ValidationError(ConfigError):
    pass


_RATE = 10.0 * math.pi / 180.0


@dataclass(frozen=True)
class SimConfig:
    m: float = DEFAULT_MASS
    M_A: tuple = tuple(np.diag(DEFAULT_ADDED_MASS).ravel())
    J: tuple = tuple(np.diag(DEFAULT_INERTIA).ravel())
    w_b: float = DEFAULT_BUOYANCY
    g: float = DEFAULT_GRAVITY
    r: tuple = DEFAULT_BUOYANCY_OFFSET
    euler_angles: tuple = (2.0 * math.pi, 0.0, 2.0 * math.pi)
    euler_rates: tuple = (_RATE, _RATE, _RATE)
    q0: tuple = (0.0, 0.0, 1.0)
    v0: tuple = (0.1, 0.1, 0.8)
    h: float = 0.01
    T: float = 500.0
    map: str = "cayley"
    tolerance: float = 1e-12
    max_iterations: int = 50
    record_stride: int = 10
    output: str = "trajectory"

    def validate(self) -> "SimConfig":
        checks = [
            (self.h > 0.0, "h > 0"),
            (self.T >= self.h, "T >= h"),
            (self.tolerance > 0.0, "tolerance > 0"),
            (self.max_iterations >= 1, "max_iterations >= 1"),
            (self.record_stride >= 1, "record_stride >= 1"),
        ]
        for ok, message in checks:
            if not ok:
                raise ValidationError(message)
        for name in ("m", "w_b", "g", "h", "T", "tolerance"):
            if not math.isfinite(getattr(self, name)):
                raise ValidationError(f"{name} must be finite")
        try:
            get_map(self.map)
        except ValueError:
            raise ValidationError("map must be 'cayley' or 'exp'") from None
        try:
            self.vehicle_params()
        except ValueError as exc:
            raise ValidationError(str(exc)) from None
        return self

    def vehicle_params(self) -> VehicleParams:
        return VehicleParams(
            m=self.m,
            M_A=np.array(self.M_A).reshape(3, 3),
            J=np.array(self.J).reshape(3, 3),
            w_b=self.w_b,
            g=self.g,
            r=np.array(self.r),
        )

    def initial_state(self) -> ReducedState:
        return init_from_euler(*self.euler_angles, *self.euler_rates, self.q0, self.v0)

    def solver_config(self) -> newton.SolverConfig:
        return newton.SolverConfig(tolerance=self.tolerance, max_iterations=self.max_iterations)

    def tau_map(self) -> GroupDifferenceMap:
        return get_map(self.map)

    def with_overrides(self, **kwargs) -> "SimConfig":
        kwargs = {k: v for k, v in kwargs.items() if v is not None}
        return replace(self, **kwargs).validate()


_SCALAR = {"m", "w_b", "g", "h", "T", "tolerance"}
_INTEGER = {"max_iterations", "record_stride"}
_VECTOR = {"r", "euler_angles", "euler_rates", "q0", "v0"}
_MATRIX = {"M_A", "J"}
_STRING = {"map", "output"}
_ALIASES = {
    "rho_v_g": "w_b",
    "stride": "record_stride",
    "tol": "tolerance",
    "max_iter": "max_iterations",
    "angles": "euler_angles",
    "rates": "euler_rates",
}

_BINOPS = {
    ast.Add: operator.add,
    ast.Sub: operator.sub,
    ast.Mult: operator.mul,
    ast.Div: operator.truediv,
    ast.Pow: operator.pow,
}
_NAMES = {"pi": math.pi, "tau": 2.0 * math.pi, "e": math.e}


def _eval(node):
    if isinstance(node, ast.Constant) and isinstance(node.value, (int, float)) and not isinstance(node.value, bool):
        return float(node.value)
    if isinstance(node, ast.Name) and node.id in _NAMES:
        return _NAMES[node.id]
    if isinstance(node, ast.UnaryOp) and isinstance(node.op, (ast.USub, ast.UAdd)):
        v = _eval(node.operand)
        if isinstance(v, list):
            raise ValueError("unary operator on a list")
        return -v if isinstance(node.op, ast.USub) else v
    if isinstance(node, ast.BinOp) and type(node.op) in _BINOPS:
        left, right = _eval(node.left), _eval(node.right)
        if isinstance(left, list) or isinstance(right, list):
            raise ValueError("arithmetic on a list")
        try:
            return float(_BINOPS[type(node.op)](left, right))
        except (ZeroDivisionError, OverflowError) as exc:
            raise ValueError(str(exc)) from None
        except TypeError:
            raise ValueError("result is not a real number") from None
    if isinstance(node, ast.Tuple):
        out = []
        for elt in node.elts:
            v = _eval(elt)
            if isinstance(v, list):
                raise ValueError("nested lists are not allowed")
            out.append(v)
        return out
    if isinstance(node, ast.Call) and isinstance(node.func, ast.Name) and not node.keywords:
        args = [_eval(a) for a in node.args]
        if node.func.id == "deg" and len(args) == 1 and not isinstance(args[0], list):
            return math.radians(args[0])
        if node.func.id == "diag" and len(args) == 3 and not any(isinstance(a, list) for a in args):
            return list(np.diag(args).ravel())
    raise ValueError(f"unsupported expression {ast.unparse(node)!r}")


def _evaluate(text: str):
    try:
        tree = ast.parse(text.strip(), mode="eval")
    except SyntaxError:
        raise ValueError(f"cannot parse {text.strip()!r}") from None
    value = _eval(tree.body)
    if isinstance(value, float) and not math.isfinite(value):
        raise ValueError("value must be finite")
    return value


def _convert(key: str, raw: str):
    if key in _STRING:
        value = raw.strip()
        if not value:
            raise ValueError("empty value")
        return value
    value = _evaluate(raw)
    if key in _SCALAR:
        if isinstance(value, list):
            raise ValueError("expected a scalar")
        return value
    if key in _INTEGER:
        if isinstance(value, list) or value != int(value):
            raise ValueError("expected an integer")
        return int(value)
    if key in _VECTOR:
        if not isinstance(value, list) or len(value) != 3:
            raise ValueError("expected three comma-separated values")
        return tuple(value)
    if key in _MATRIX:
        if not isinstance(value, list) or len(value) != 9:
            raise ValueError("expected diag(a, b, c) or nine comma-separated values")
        return tuple(value)
    raise AssertionError(key)


_KNOWN = {f.name for f in fields(SimConfig)}


def parse_config(text: str) -> SimConfig:
    """Parse configuration text; see the module docstring for the format."""
    values = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ParseError(lineno, f"expected 'key = value', got {line!r}")
        key, raw = (part.strip() for part in line.split("=", 1))
        key = _ALIASES.get(key, key)
        if key not in _KNOWN:
            raise ParseError(lineno, f"unknown key {key!r}")
        if key in values:
            raise ParseError(lineno, f"duplicate key {key!r}")
        try:
            values[key] = _convert(key, raw)
        except ValueError as exc:
            raise ParseError(lineno, f"{key}: {exc}") from None
    return SimConfig(**values).validate()


def load_config(path) -> SimConfig:
    with open(path, encoding="utf-8") as fh:
        return parse_config(fh.read())

"""Run configuration: flat ``key = value`` files with ``#`` comments."""

import ast
import math
import operator
from dataclasses import dataclass, fields, replace
from pathlib import Path

from .errors import CatBellError

DEFAULT_ANGLES = (0.0, -math.pi / 4, math.pi / 2, -3 * math.pi / 4)


class ConfigError(CatBellError):
    pass


_BINOPS = {ast.Add: operator.add, ast.Sub: operator.sub,
           ast.Mult: operator.mul, ast.Div: operator.truediv}


def parse_angle(text: str) -> float:
    """Radians from text such as ``0.5``, ``pi/4``, ``-3*pi/4`` or ``-3pi/4``."""
    cleaned = text.strip().lower().replace("π", "pi")
    # allow implicit multiplication like "3pi"
    for digit in "0123456789":
        cleaned = cleaned.replace(f"{digit}pi", f"{digit}*pi")
    try:
        tree = ast.parse(cleaned, mode="eval")
        return float(_eval(tree.body))
    except (SyntaxError, ValueError, ZeroDivisionError, TypeError) as exc:
        raise ConfigError(f"cannot parse angle {text!r}") from exc


def _eval(node):
    if isinstance(node, ast.Constant) and isinstance(node.value, (int, float)):
        return node.value
    if isinstance(node, ast.Name) and node.id == "pi":
        return math.pi
    if isinstance(node, ast.UnaryOp) and isinstance(node.op, (ast.USub, ast.UAdd)):
        value = _eval(node.operand)
        return -value if isinstance(node.op, ast.USub) else value
    if isinstance(node, ast.BinOp) and type(node.op) in _BINOPS:
        return _BINOPS[type(node.op)](_eval(node.left), _eval(node.right))
    raise ValueError("unsupported expression")


@dataclass(frozen=True)
class RunConfig:
    r0: float = 1.1
    alphas: tuple[float, ...] = (1.0, 2.0, 3.0, 4.0, 5.0, 6.0)
    angles: tuple[float, float, float, float] = DEFAULT_ANGLES  # theta, phi, theta', phi'
    n0_list: tuple[int, ...] = ()  # empty: 0, 1, ceil(alpha/2), ceil(alpha) per alpha
    k_points: int = 64
    sigma_factor: float = 8.0
    epsilon: float = 0.01
    output_dir: str = "."
    seed: int = 12345
    samples: int = 100_000
    workers: int = 1

    def __post_init__(self):
        if self.r0 < 0:
            raise ConfigError("r0 must be nonnegative")
        if any(a < 0 for a in self.alphas):
            raise ConfigError("alphas must be nonnegative")
        if len(self.angles) != 4:
            raise ConfigError("angles needs four values: theta, phi, theta', phi'")
        if any(n < 0 for n in self.n0_list):
            raise ConfigError("n0 values must be nonnegative")
        if self.k_points < 16:
            raise ConfigError("k_points must be at least 16")
        if self.sigma_factor <= 0:
            raise ConfigError("sigma_factor must be positive")
        if not 0 <= self.epsilon <= 1:
            raise ConfigError("epsilon must lie in [0, 1]")
        if self.samples < 0:
            raise ConfigError("samples must be nonnegative")
        if self.workers < 1:
            raise ConfigError("workers must be at least 1")

    def thresholds(self, alpha: float) -> list[int]:
        if self.n0_list:
            return list(self.n0_list)
        auto = [0, 1, math.ceil(alpha / 2), math.ceil(alpha)]
        return sorted(set(auto))

    def updated(self, **changes):
        return replace(self, **{k: v for k, v in changes.items() if v is not None})


_LISTS = {"alphas": float, "n0_list": int}


def _convert(name, raw: str):
    kind = {f.name: f.type for f in fields(RunConfig)}[name]
    if name == "angles":
        parts = [p for p in raw.split(",") if p.strip()]
        return tuple(parse_angle(p) for p in parts)
    if name in _LISTS:
        return tuple(_LISTS[name](p) for p in raw.split(",") if p.strip())
    return kind(raw.strip())


def parse_config(text: str) -> RunConfig:
    known = {f.name for f in fields(RunConfig)}
    values = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value'")
        key, raw = (part.strip() for part in line.split("=", 1))
        key = key.replace("-", "_")
        if key not in known:
            raise ConfigError(f"line {lineno}: unknown key {key!r}")
        try:
            values[key] = _convert(key, raw)
        except ValueError as exc:
            raise ConfigError(f"line {lineno}: bad value for {key}: {raw!r}") from exc
    return RunConfig(**values)


def serialize_config(config: RunConfig) -> str:
    lines = []
    for f in fields(RunConfig):
        value = getattr(config, f.name)
        if isinstance(value, tuple):
            text = ", ".join(repr(v) for v in value)
        elif isinstance(value, float):
            text = repr(value)
        else:
            text = str(value)
        lines.append(f"{f.name} = {text}")
    return "\n".join(lines) + "\n"


def load_config(path) -> RunConfig:
    try:
        return parse_config(Path(path).read_text())
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc

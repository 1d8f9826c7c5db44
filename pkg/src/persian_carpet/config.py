"""
Job configuration.

A job is one CLI subcommand with its parameters. The file form is a flat
JSON object mirroring the command-line flags:

    {"command": "render dynamical", "seed": 0, "lambda": [0.001, 0.0],
     "px": 256, "output.image": "carpet.ppm"}

Keys are validated against the command's parameter table; unknown keys are
rejected. Complex values are stored as [re, im] pairs and weights as
integer lists, so a config survives load/dump unchanged.
"""

import json
import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Callable, Dict, Optional, Tuple, Union

from .constants import (
    ANNULUS_SAMPLES,
    GROTZSCH_C,
    LADDER_K,
    LADDER_SAMPLES,
    LEVEL_MARGIN,
    MAX_ITER,
    REPRODUCE_PX,
    TILE_SIZE,
    TRAP_RADIUS,
)
from .errors import ConfigError

logger = logging.getLogger(__name__)

OUTPUT_PREFIX = "output."
RESERVED_KEYS = ("command", "seed")


# =============================================================================
# VALUE TYPES
# =============================================================================

def parse_complex(value: Any) -> complex:
    """[re, im], a number, ``"re,im"`` or Python syntax (``i`` accepted for ``j``)."""
    if isinstance(value, complex):
        return value
    if isinstance(value, (int, float)) and not isinstance(value, bool):
        return complex(value)
    if isinstance(value, (list, tuple)) and len(value) == 2:
        return complex(float(value[0]), float(value[1]))
    if isinstance(value, str):
        text = value.strip().replace(" ", "")
        try:
            if "," in text:
                re_, im_ = text.split(",", 1)
                return complex(float(re_), float(im_))
            return complex(text.replace("i", "j"))
        except ValueError:
            pass
    raise ConfigError(f"not a complex number: {value!r}")


def parse_int_list(value: Any) -> Tuple[int, ...]:
    if isinstance(value, str):
        value = [part for part in value.split(",") if part.strip()]
    try:
        out = tuple(int(v) for v in value)
    except (TypeError, ValueError):
        raise ConfigError(f"not a list of integers: {value!r}") from None
    if not out:
        raise ConfigError("empty integer list")
    return out


def _parse_scalar(kind: Callable) -> Callable[[Any], Any]:
    def parse(value: Any):
        if isinstance(value, bool):
            raise ConfigError(f"expected {kind.__name__}, got a boolean")
        try:
            return kind(value)
        except (TypeError, ValueError):
            raise ConfigError(f"expected {kind.__name__}, got {value!r}") from None
    return parse


def parse_bool(value: Any) -> bool:
    if isinstance(value, bool):
        return value
    if isinstance(value, str) and value.lower() in ("true", "false", "1", "0", "yes", "no"):
        return value.lower() in ("true", "1", "yes")
    raise ConfigError(f"expected a boolean, got {value!r}")


def _encode(value: Any) -> Any:
    """JSON form of a parameter value."""
    if isinstance(value, complex):
        return [value.real, value.imag]
    if isinstance(value, tuple):
        return list(value)
    return value


@dataclass(frozen=True)
class Param:
    name: str
    parse: Callable[[Any], Any]
    default: Any = None
    help: str = ""

    @property
    def flag(self) -> str:
        return "--" + self.name.replace("_", "-")


def _p(name, parse, default=None, help=""):
    return Param(name, parse, default, help)


INT = _parse_scalar(int)
FLOAT = _parse_scalar(float)
STR = _parse_scalar(str)
COMPLEX = parse_complex
INTS = parse_int_list
BOOL = parse_bool

_RENDER_COMMON = (
    _p("px", INT, 256, "pixels per side"),
    _p("max_iter", INT, MAX_ITER, "iteration cap per pixel"),
    _p("tile_size", INT, TILE_SIZE, "tile edge in pixels"),
    _p("workers", INT, None, "worker threads"),
)

COMMANDS: Dict[str, Dict[str, Any]] = {
    "tree check": {
        "params": (
            _p("kind", STR, "HP", "HP, HQ or HR"),
            _p("weights", INTS, None, "comma-separated edge weights"),
            _p("tree", STR, None, "tree JSON, inline or a file path (replaces --kind/--weights)"),
        ),
        "outputs": (),
    },
    "hurwitz check": {
        "params": (
            _p("degree", INT, None, "covering degree d"),
            _p("simple", INTS, None, "d11,d21[,d31] for (d_i1, 1, ..., 1) rows"),
            _p("rows", STR, None, "branch rows such as '3;2,1;2,1'"),
        ),
        "outputs": (),
    },
    "family derive": {
        "params": (_p("lambda", COMPLEX, 1e-3 + 0j, "parameter λ"),),
        "outputs": (),
    },
    "family pcf": {
        "params": (
            _p("period", INT, 4, "exact period of the critical point"),
            _p("selector", STR, "largest-imaginary-part", "which root to report"),
        ),
        "outputs": (),
    },
    "family ladder": {
        "params": (
            _p("lambda", COMPLEX, 1e-3 + 0j, "parameter λ"),
            _p("k", FLOAT, LADDER_K, "order-of-magnitude constant"),
            _p("samples", INT, LADDER_SAMPLES, "boundary samples per region"),
        ),
        "outputs": (),
    },
    "family orbit": {
        "params": (
            _p("lambda", COMPLEX, 1e-3 + 0j, "parameter λ"),
            _p("z0", COMPLEX, None, "start point (default: the free critical point)"),
            _p("steps", INT, 20, "number of iterations"),
        ),
        "outputs": ("csv",),
    },
    "family mcmullen": {
        "params": (
            _p("d_inf", INT, 3, "exponent at infinity"),
            _p("d_0", INT, 3, "exponent at the origin"),
            _p("c", COMPLEX, 0j, "additive constant"),
            _p("lambda", COMPLEX, 1e-6 + 0j, "perturbation"),
            _p("modified", BOOL, False, "use z²/(1−z²) + λ/z³ instead"),
        ),
        "outputs": (),
    },
    "symbolic words": {
        "params": (
            _p("depth", INT, 3, "word length"),
            _p("list", BOOL, False, "include the words themselves"),
        ),
        "outputs": (),
    },
    "symbolic quotient": {
        "params": (
            _p("s", STR, None, "first word, preperiod.period"),
            _p("sp", STR, None, "second word, preperiod.period"),
            _p("depth", INT, 30, "digits summed for the distance"),
        ),
        "outputs": (),
    },
    "symbolic model": {
        "params": (
            _p("word", STR, None, "finite admissible word"),
            _p("x", FLOAT, None, "point whose itinerary to report"),
            _p("length", INT, 8, "itinerary length for --x"),
        ),
        "outputs": (),
    },
    "moduli solve": {
        "params": (
            _p("weights", INTS, (1, 2, 2, 1), "HP weights d0..d3"),
            _p("c", FLOAT, GROTZSCH_C, "inverse Grötzsch constant"),
            _p("margin", FLOAT, LEVEL_MARGIN, "modulus between beta0 and beta3+"),
        ),
        "outputs": (),
    },
    "moduli bounds": {
        "params": (
            _p("n", INT, 1, "exponent n"),
            _p("n_prime", INT, 1, "exponent n'"),
            _p("eps", FLOAT, 1e-4, "epsilon of the separating circle"),
            _p("c", FLOAT, 2.0, "constant of the separating circle"),
            _p("samples", INT, ANNULUS_SAMPLES, "circle samples"),
        ),
        "outputs": (),
    },
    "render dynamical": {
        "params": (
            _p("lambda", COMPLEX, 1e-3 + 0j, "parameter λ (0 renders f₀)"),
            _p("chart", STR, "standard", "standard or inverted"),
            _p("trap_radius", FLOAT, None, "chordal trap radius"),
            _p("center", COMPLEX, 0.5 + 0j, "viewport centre, re,im"),
            _p("width", FLOAT, 5.0, "viewport width"),
        ) + _RENDER_COMMON,
        "outputs": ("image",),
    },
    "render parameter": {
        "params": (
            _p("trap_radius", FLOAT, TRAP_RADIUS, "largest chordal trap radius"),
            _p("center", COMPLEX, 0j, "viewport centre, re,im"),
            _p("width", FLOAT, 0.02, "viewport width"),
        ) + _RENDER_COMMON,
        "outputs": ("image",),
    },
    "reproduce": {
        "params": (
            _p("figure", STR, None, "fig2a, fig2b or fig8a"),
            _p("px", INT, REPRODUCE_PX, "pixels per side"),
            _p("workers", INT, None, "worker threads"),
        ),
        "outputs": ("image",),
    },
}


def command_params(command: str) -> Dict[str, Param]:
    if command not in COMMANDS:
        raise ConfigError(f"unknown command {command!r}; expected one of {sorted(COMMANDS)}")
    return {p.name: p for p in COMMANDS[command]["params"]}


def command_outputs(command: str) -> Tuple[str, ...]:
    command_params(command)
    return COMMANDS[command]["outputs"]


# =============================================================================
# JOB CONFIG
# =============================================================================

@dataclass
class JobConfig:
    command: str
    params: Dict[str, Any] = field(default_factory=dict)
    outputs: Dict[str, str] = field(default_factory=dict)
    seed: int = 0

    def __post_init__(self):
        known = command_params(self.command)
        parsed = {}
        for key, value in self.params.items():
            if key not in known:
                raise ConfigError(f"unknown parameter {key!r} for {self.command!r}")
            parsed[key] = None if value is None else known[key].parse(value)
        self.params = parsed
        allowed = command_outputs(self.command)
        for name in self.outputs:
            if name not in allowed:
                raise ConfigError(f"unknown output {name!r} for {self.command!r}")
        self.outputs = {k: str(v) for k, v in self.outputs.items()}
        if isinstance(self.seed, bool) or not isinstance(self.seed, int):
            raise ConfigError(f"seed must be an integer, got {self.seed!r}")

    def get(self, name: str) -> Any:
        """Explicit value, else the parameter's default."""
        value = self.params.get(name)
        if value is None:
            return command_params(self.command)[name].default
        return value

    def require(self, name: str) -> Any:
        value = self.get(name)
        if value is None:
            raise ConfigError(f"{self.command!r} needs --{name.replace('_', '-')}")
        return value

    def merged(self, overrides: Dict[str, Any]) -> "JobConfig":
        """A copy with non-None overrides applied on top (flags over file values)."""
        params = dict(self.params)
        params.update({k: v for k, v in overrides.items() if v is not None})
        return JobConfig(self.command, params, dict(self.outputs), self.seed)

    def to_dict(self) -> Dict[str, Any]:
        out: Dict[str, Any] = {"command": self.command, "seed": self.seed}
        for key in sorted(self.params):
            if self.params[key] is not None:
                out[key] = _encode(self.params[key])
        for name in sorted(self.outputs):
            out[OUTPUT_PREFIX + name] = self.outputs[name]
        return out

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "JobConfig":
        if "command" not in data:
            raise ConfigError("config has no 'command'")
        params, outputs = {}, {}
        for key, value in data.items():
            if key in RESERVED_KEYS:
                continue
            if key.startswith(OUTPUT_PREFIX):
                outputs[key[len(OUTPUT_PREFIX):]] = value
            else:
                params[key] = value
        return cls(data["command"], params, outputs, data.get("seed", 0))

    def dumps(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n"

    def dump(self, path: Union[str, Path]) -> Path:
        path = Path(path)
        path.write_text(self.dumps(), encoding="utf-8")
        return path

    @classmethod
    def load(cls, path: Union[str, Path]) -> "JobConfig":
        try:
            data = json.loads(Path(path).read_text(encoding="utf-8"))
        except json.JSONDecodeError as exc:
            raise ConfigError(f"{path}: not valid JSON ({exc})") from None
        if not isinstance(data, dict):
            raise ConfigError(f"{path}: expected a JSON object")
        logger.debug("loaded config %s for %r", path, data.get("command"))
        return cls.from_dict(data)


def load_config(path: Optional[Union[str, Path]], command: str) -> JobConfig:
    """The config at ``path`` (which must be for ``command``), or an empty one."""
    if path is None:
        return JobConfig(command)
    config = JobConfig.load(path)
    if config.command != command:
        raise ConfigError(f"config {path} is for {config.command!r}, not {command!r}")
    return config

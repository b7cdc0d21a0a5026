"""Scenario configuration: flag/JSON parsing and per-scenario validation."""
from __future__ import annotations

import argparse
import json
import math
import re
from dataclasses import asdict, dataclass, replace
from pathlib import Path

import numpy as np

SCENARIOS = ("cat", "ghz", "trapping", "holography", "field-cat", "validate-effective", "algebra-check")
FORMATS = ("json", "csv")
ANGLE_PARAMS = ("theta", "phi", "phi0t", "atom_basis_angle")
OUTPUT_DIR_ENV = "DICKEFIELD_OUTPUT_DIR"


class ConfigError(ValueError):
    pass


class UnknownScenarioError(ConfigError):
    pass


class MissingParameterError(ConfigError):
    pass


class ComplexLiteralError(ConfigError):
    pass


_NUM = r"(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?"
_COMPLEX_RE = re.compile(
    rf"^(?P<re>[+-]?{_NUM})?(?:(?P<im_sign>[+-])?(?P<im>{_NUM})?(?P<unit>[ij]))?$"
)


def parse_complex(text: str) -> complex:
    """Accept "re", "imi", "re+imi", "re-imi" (i or j as the imaginary unit)."""
    s = str(text).strip().replace(" ", "")
    m = _COMPLEX_RE.match(s)
    if not s or m is None or (m["re"] is None and m["unit"] is None):
        raise ComplexLiteralError(f"malformed complex literal {text!r}; expected forms like 0.6, 0.8i, 0.6-0.8i")
    real = float(m["re"]) if m["re"] else 0.0
    if m["unit"] is None:
        return complex(real, 0.0)
    if m["re"] and m["im_sign"] is None and m["im"] is None:
        # "2i" matched as re="2", unit="i"
        return complex(0.0, real)
    if m["re"] and m["im_sign"] is None:
        raise ComplexLiteralError(f"malformed complex literal {text!r}")
    mag = float(m["im"]) if m["im"] else 1.0
    sign = -1.0 if m["im_sign"] == "-" else 1.0
    return complex(real, sign * mag)


def _complex_from_json(value) -> complex:
    if isinstance(value, (list, tuple)) and len(value) == 2:
        return complex(float(value[0]), float(value[1]))
    if isinstance(value, (int, float)):
        return complex(value)
    return parse_complex(value)


@dataclass(frozen=True)
class Sweep:
    name: str
    start: float
    stop: float
    count: int

    def values(self) -> np.ndarray:
        if self.count == 1:
            return np.array([self.start])
        return np.linspace(self.start, self.stop, self.count)

    @classmethod
    def parse(cls, text: str) -> Sweep:
        parts = str(text).split(":")
        if len(parts) != 4:
            raise ConfigError(f"sweep must look like name:start:stop:count, got {text!r}")
        name, start, stop, count = parts
        try:
            sweep = cls(name.replace("-", "_"), float(start), float(stop), int(count))
        except ValueError as exc:
            raise ConfigError(f"bad sweep specification {text!r}: {exc}") from None
        if sweep.count < 1:
            raise ConfigError("sweep count must be >= 1")
        return sweep


SWEEPABLE = {
    "cat": ("theta", "phi", "phi0t", "t"),
    "ghz": ("theta", "phi", "phi0t", "t"),
    "trapping": ("theta", "phi", "phi0t", "t"),
    "holography": ("theta", "phi", "phi0t", "t"),
    "field-cat": ("theta", "phi", "phi0t", "t", "atom_basis_angle"),
    "validate-effective": ("theta", "phi", "phi0t"),
    "algebra-check": (),
}


@dataclass(frozen=True)
class ScenarioConfig:
    scenario: str
    n_atoms: int | None = None
    theta: float | None = None
    phi: float | None = None
    alpha: complex | None = None
    beta: complex | None = None
    phi0t: float | None = None
    omega: float | None = None
    delta: float | None = None
    t: float | None = None
    n_max: int | None = None
    atom_basis_angle: float | None = None
    delta_ratios: tuple[float, ...] = (100.0, 1000.0)
    j_max: float = 8.0
    sweep: Sweep | None = None
    output: str | None = None
    format: str = "json"
    dump_state: bool = False
    seed: int = 0
    jobs: int = 1
    timing: bool = False
    pi_units: bool = False

    def phi0_and_time(self) -> tuple[float, float]:
        """(phi0, t): phi0t alone means phi0 = 1 and t = phi0t."""
        if self.phi0t is not None:
            return 1.0, self.phi0t
        return self.omega**2 / self.delta, self.t

    def at(self, name: str, value: float) -> ScenarioConfig:
        """Copy with one sweep parameter set (value already in radians)."""
        if name == "t" and self.phi0t is not None:
            raise ConfigError("sweeping t requires --omega/--delta instead of --phi0t")
        return replace(self, **{name: float(value)})

    def echo(self) -> dict:
        out = {}
        for k, v in asdict(self).items():
            if k in ("output", "jobs", "timing"):
                continue
            out[k] = v
        return out


def _required(cfg: ScenarioConfig) -> list[str]:
    qubit_protocol = ["n_atoms", "theta", "phi", "alpha", "beta"]
    timed = [] if cfg.phi0t is not None else ["omega", "delta", "t"]
    return {
        "cat": qubit_protocol + timed,
        "ghz": qubit_protocol + timed,
        "trapping": qubit_protocol,
        "holography": qubit_protocol + timed,
        "field-cat": ["alpha", "beta", "theta", "phi"] + timed,
        "validate-effective": ["n_atoms"],
        "algebra-check": [],
    }[cfg.scenario]


def _flag(name: str) -> str:
    return "--" + name.replace("_", "-")


def validate(cfg: ScenarioConfig) -> ScenarioConfig:
    if cfg.scenario not in SCENARIOS:
        raise UnknownScenarioError(f"unknown scenario {cfg.scenario!r}; choose one of {', '.join(SCENARIOS)}")
    required = _required(cfg)
    swept = cfg.sweep.name if cfg.sweep else None
    missing = [name for name in required if getattr(cfg, name) is None and name != swept]
    if missing:
        if cfg.phi0t is None and set(missing) & {"omega", "delta", "t"}:
            hint = " (or give --phi0t)"
        else:
            hint = ""
        raise MissingParameterError(
            f"scenario {cfg.scenario!r} is missing required parameter(s) "
            + ", ".join(_flag(n) for n in missing)
            + hint
        )
    if cfg.format not in FORMATS:
        raise ConfigError(f"unknown format {cfg.format!r}; use json or csv")
    if cfg.format == "csv" and cfg.dump_state:
        raise ConfigError("CSV output carries scalar columns only; drop --dump-state or use --format json")
    if cfg.sweep is not None and cfg.sweep.name not in SWEEPABLE[cfg.scenario]:
        raise ConfigError(
            f"cannot sweep {cfg.sweep.name!r} in scenario {cfg.scenario!r}; "
            f"sweepable: {', '.join(SWEEPABLE[cfg.scenario]) or 'nothing'}"
        )
    if cfg.n_atoms is not None and cfg.n_atoms < 1:
        raise ConfigError("--n-atoms must be >= 1")
    if cfg.scenario == "ghz" and cfg.n_atoms is not None and cfg.n_atoms < 2:
        raise ConfigError("ghz needs --n-atoms >= 2")
    if cfg.scenario in ("cat", "ghz", "trapping", "holography", "validate-effective"):
        if cfg.alpha is not None and cfg.beta is not None:
            norm = abs(cfg.alpha) ** 2 + abs(cfg.beta) ** 2
            if abs(norm - 1.0) > 1e-6:
                raise ConfigError(f"polarization qubit must satisfy |alpha|^2 + |beta|^2 = 1 (got {norm:.9g})")
    if cfg.theta is not None and not 0.0 <= cfg.theta <= math.pi:
        raise ConfigError(f"--theta must lie in [0, pi] radians, got {cfg.theta!r}")
    if cfg.phi0t is None and cfg.delta == 0:
        raise ConfigError("--delta must be non-zero")
    if cfg.jobs < 1:
        raise ConfigError("--jobs must be >= 1")
    if not 0 <= cfg.seed < 2**64:
        raise ConfigError("--seed must be an unsigned 64-bit integer")
    if any(r <= 0 for r in cfg.delta_ratios):
        raise ConfigError("--delta-ratios must be positive")
    return cfg


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise ConfigError(message)


def _parser() -> _Parser:
    p = _Parser(prog="dickefield", add_help=False)
    p.add_argument("--config", type=Path)
    p.add_argument("--n-atoms", type=int)
    for name in ("theta", "phi", "phi0t", "omega", "delta", "t", "atom-basis-angle"):
        p.add_argument(f"--{name}", type=float)
    p.add_argument("--alpha", type=str)
    p.add_argument("--beta", type=str)
    p.add_argument("--n-max", type=int)
    p.add_argument("--delta-ratios", type=str)
    p.add_argument("--j-max", type=float)
    p.add_argument("--sweep", type=str)
    p.add_argument("--output", "-o", type=str)
    p.add_argument("--format", type=str)
    p.add_argument("--dump-state", action="store_true", default=None)
    p.add_argument("--seed", type=int)
    p.add_argument("--jobs", type=int)
    p.add_argument("--timing", action="store_true", default=None)
    p.add_argument("--pi-units", action="store_true", default=None)
    return p


def _scale_angles(values: dict, pi_units: bool) -> dict:
    if not pi_units:
        return values
    out = dict(values)
    for name in ANGLE_PARAMS:
        if out.get(name) is not None:
            out[name] = out[name] * math.pi
    sweep = out.get("sweep")
    if sweep is not None and sweep.name in ANGLE_PARAMS:
        out["sweep"] = replace(sweep, start=sweep.start * math.pi, stop=sweep.stop * math.pi)
    return out


def _normalize(raw: dict) -> dict:
    """Coerce JSON/flag values into ScenarioConfig field types."""
    out = {}
    known = {f for f in ScenarioConfig.__dataclass_fields__}
    for key, value in raw.items():
        key = key.replace("-", "_")
        if value is None:
            continue
        if key not in known:
            raise ConfigError(f"unknown configuration key {key!r}")
        if key in ("alpha", "beta"):
            value = _complex_from_json(value)
        elif key == "sweep" and not isinstance(value, Sweep):
            if isinstance(value, dict):
                value = Sweep(value["name"], float(value["start"]), float(value["stop"]), int(value["count"]))
                if value.count < 1:
                    raise ConfigError("sweep count must be >= 1")
            else:
                value = Sweep.parse(value)
        elif key == "delta_ratios":
            if isinstance(value, str):
                try:
                    value = tuple(float(v) for v in value.split(","))
                except ValueError:
                    raise ConfigError(f"--delta-ratios must be comma-separated numbers, got {value!r}") from None
            else:
                value = tuple(float(v) for v in value)
        out[key] = value
    return out


def config_from_dict(raw: dict) -> ScenarioConfig:
    raw = dict(raw)
    scenario = raw.pop("scenario", None)
    if scenario is None:
        raise MissingParameterError("configuration does not name a scenario")
    if scenario not in SCENARIOS:
        raise UnknownScenarioError(f"unknown scenario {scenario!r}; choose one of {', '.join(SCENARIOS)}")
    values = _normalize(raw)
    values = _scale_angles(values, bool(values.get("pi_units")))
    return validate(ScenarioConfig(scenario=scenario, **values))


def parse_config(argv: list[str]) -> ScenarioConfig:
    """Parse `<scenario> [flags]` or `--config file.json [flags]` into a validated config.

    Flags given on the command line override values from the config file.
    """
    argv = list(argv)
    scenario = None
    if argv and not argv[0].startswith("-"):
        scenario = argv.pop(0)
        if scenario not in SCENARIOS:
            raise UnknownScenarioError(f"unknown scenario {scenario!r}; choose one of {', '.join(SCENARIOS)}")
    ns = vars(_parser().parse_args(argv))
    raw: dict = {}
    path = ns.pop("config")
    if path is not None:
        try:
            raw = json.loads(Path(path).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config file {path}: {exc}") from None
        if not isinstance(raw, dict):
            raise ConfigError("config file must hold a JSON object")
    raw.update({k: v for k, v in ns.items() if v is not None})
    if scenario is not None:
        raw["scenario"] = scenario
    return config_from_dict(raw)

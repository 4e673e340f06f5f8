"""Run configuration: YAML schema, validation, defaults.

The configuration mirrors the solver structure: ``grid``, ``layout``,
``physics``, ``integrator`` (a list of (t_end, N_t) legs so multi-leg runs
are first-class), ``initial``, ``output``, ``detector``. Unknown keys are
rejected with their full path; the nonlinearity power may be written as an
exact rational string such as ``"7/3"``.
"""

from dataclasses import asdict, dataclass, field
from fractions import Fraction

import yaml

from .errors import ConfigurationError

__all__ = [
    "GridConfig",
    "LayoutConfig",
    "PhysicsConfig",
    "Leg",
    "IntegratorConfig",
    "InitialConfig",
    "OutputConfig",
    "DetectorConfig",
    "SimConfig",
    "load_config",
    "config_from_dict",
    "config_to_dict",
    "parse_power",
]

INITIAL_KINDS = ("ground-state", "scaled-ground-state", "gaussian", "file")


def parse_power(value, path="physics.p"):
    """Exact rational power from an int, a Fraction, or a string 'a/b'."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise ConfigurationError(f"{path}: expected a rational, got {value!r}")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, float):
        if value != int(value):
            raise ConfigurationError(
                f"{path}: floats are inexact; write the power as a string like '7/3'"
            )
        return Fraction(int(value))
    if isinstance(value, str):
        try:
            return Fraction(value)
        except (ValueError, ZeroDivisionError) as exc:
            raise ConfigurationError(f"{path}: not a rational: {value!r}") from exc
    raise ConfigurationError(f"{path}: cannot interpret {value!r} as a rational")


@dataclass
class GridConfig:
    L: float = 5.0
    N: int = 512


@dataclass
class LayoutConfig:
    rho0: float = 1.0
    rho1: float = 20.0
    N_I: int = 20
    N_II: int = 100


@dataclass
class PhysicsConfig:
    p: Fraction = Fraction(7, 3)
    c: float = 1.0


@dataclass
class Leg:
    t_end: float
    N_t: int


@dataclass
class IntegratorConfig:
    legs: list = field(default_factory=lambda: [Leg(1.0, 400)])
    newton_tol: float = 1e-6
    max_newton: int = 50
    max_halvings: int = 0


@dataclass
class InitialConfig:
    kind: str = "ground-state"
    lam: float = 1.0
    alpha: float = 1.0
    path: str = None


@dataclass
class OutputConfig:
    directory: str = "runs/out"
    snapshot_stride: int = 0      # 0: only the final snapshot
    diag_stride: int = 10


@dataclass
class DetectorConfig:
    enabled: bool = True
    linf_factor: float = 10.0
    newton_trigger: int = 12


@dataclass
class SimConfig:
    grid: GridConfig = field(default_factory=GridConfig)
    layout: LayoutConfig = field(default_factory=LayoutConfig)
    physics: PhysicsConfig = field(default_factory=PhysicsConfig)
    integrator: IntegratorConfig = field(default_factory=IntegratorConfig)
    initial: InitialConfig = field(default_factory=InitialConfig)
    output: OutputConfig = field(default_factory=OutputConfig)
    detector: DetectorConfig = field(default_factory=DetectorConfig)

    def validate(self):
        g, lay, phys = self.grid, self.layout, self.physics
        if g.L <= 0:
            raise ConfigurationError(f"grid.L: must be positive, got {g.L}")
        if g.N < 4 or (g.N & (g.N - 1)) != 0:
            raise ConfigurationError(f"grid.N: must be a power of two >= 4, got {g.N}")
        if not 0 < lay.rho0 < lay.rho1:
            raise ConfigurationError(
                f"layout: need 0 < rho0 < rho1, got rho0={lay.rho0}, rho1={lay.rho1}"
            )
        if lay.N_I < 4 or lay.N_II < 4:
            raise ConfigurationError("layout: N_I and N_II must be >= 4")
        phys.p = parse_power(phys.p)
        if phys.p <= 1:
            raise ConfigurationError(f"physics.p: must exceed 1, got {phys.p}")
        if phys.p.denominator % 2 == 0:
            raise ConfigurationError(
                f"physics.p: denominator must be odd, got {phys.p}"
            )
        if phys.c <= 0:
            raise ConfigurationError(f"physics.c: must be positive, got {phys.c}")
        if not self.integrator.legs:
            raise ConfigurationError("integrator.legs: at least one leg required")
        t_prev = 0.0
        for i, leg in enumerate(self.integrator.legs):
            if leg.N_t < 1:
                raise ConfigurationError(
                    f"integrator.legs[{i}].N_t: must be >= 1, got {leg.N_t}"
                )
            if leg.t_end <= t_prev:
                raise ConfigurationError(
                    f"integrator.legs[{i}].t_end: must exceed {t_prev}, got {leg.t_end}"
                )
            t_prev = leg.t_end
        if self.integrator.newton_tol <= 0:
            raise ConfigurationError("integrator.newton_tol: must be positive")
        if self.initial.kind not in INITIAL_KINDS:
            raise ConfigurationError(
                f"initial.kind: {self.initial.kind!r} not in {INITIAL_KINDS}"
            )
        if self.initial.kind == "gaussian" and self.initial.alpha <= 0:
            raise ConfigurationError("initial.alpha: must be positive")
        if self.initial.kind == "file" and not self.initial.path:
            raise ConfigurationError("initial.path: required for kind 'file'")
        if self.output.diag_stride < 1:
            raise ConfigurationError("output.diag_stride: must be >= 1")
        return self


_SECTIONS = {
    "grid": GridConfig,
    "layout": LayoutConfig,
    "physics": PhysicsConfig,
    "integrator": IntegratorConfig,
    "initial": InitialConfig,
    "output": OutputConfig,
    "detector": DetectorConfig,
}


def _fill_section(cls, data, path):
    obj = cls()
    known = set(vars(obj).keys())
    for key, val in data.items():
        if key not in known:
            raise ConfigurationError(f"{path}.{key}: unknown key")
        setattr(obj, key, val)
    return obj


def config_from_dict(data):
    if not isinstance(data, dict):
        raise ConfigurationError("config root must be a mapping")
    cfg = SimConfig()
    for key, val in data.items():
        if key not in _SECTIONS:
            raise ConfigurationError(f"{key}: unknown section")
        if not isinstance(val, dict):
            raise ConfigurationError(f"{key}: must be a mapping")
        if key == "integrator":
            raw = dict(val)
            legs = raw.pop("legs", None)
            section = _fill_section(IntegratorConfig, raw, "integrator")
            if legs is not None:
                if not isinstance(legs, list):
                    raise ConfigurationError("integrator.legs: must be a list")
                parsed = []
                for i, leg in enumerate(legs):
                    if not isinstance(leg, dict) or set(leg) != {"t_end", "N_t"}:
                        raise ConfigurationError(
                            f"integrator.legs[{i}]: expected mapping with t_end and N_t"
                        )
                    parsed.append(Leg(float(leg["t_end"]), int(leg["N_t"])))
                section.legs = parsed
            setattr(cfg, key, section)
        else:
            setattr(cfg, key, _fill_section(_SECTIONS[key], val, key))
    return cfg.validate()


def config_to_dict(cfg):
    """Plain-data echo of the configuration (powers become strings)."""
    data = asdict(cfg)
    data["physics"]["p"] = str(cfg.physics.p)
    data["integrator"]["legs"] = [
        {"t_end": leg.t_end, "N_t": leg.N_t} for leg in cfg.integrator.legs
    ]
    return data


def load_config(path):
    """Parse and validate a YAML configuration file."""
    try:
        with open(path) as fh:
            data = yaml.safe_load(fh)
    except yaml.YAMLError as exc:
        raise ConfigurationError(f"cannot parse {path}: {exc}") from exc
    if data is None:
        data = {}
    return config_from_dict(data)

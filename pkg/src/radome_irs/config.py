"""Simulation configuration and the flat key-value config file format."""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

SPEED_OF_LIGHT = 3e8

PATTERNS = ("isotropic", "tr38901")
SAMPLING_MODES = ("lcs-direct", "global-ground")


class ConfigError(ValueError):
    """Raised for invalid or inconsistent configuration values."""


def dbm_to_watt(dbm: float) -> float:
    return 10.0 ** ((dbm - 30.0) / 10.0)


@dataclass(frozen=True)
class SimConfig:
    """Full description of one radome/array/user setup.

    Distances in metres, angles in radians, powers configured in dBm.
    """

    carrier_frequency: float = 6e9
    M_x: int = 4
    M_z: int = 4
    antenna_spacing: float | None = None  # default lambda/2
    N_j1: int = 1
    N_j2: int = 8
    irs_spacing: float | None = None  # default lambda/2
    element_area: float | None = None  # default (lambda/2)^2
    initial_phases: tuple[float, float, float, float] = (0.0, 0.0, 0.0, 0.0)
    theta_tilt: float = 0.0
    H_AR: float = 10.0  # narrative altitude; metadata only
    eta: int = 1
    K: int = 3
    L_k: int = 4
    path_gain_variance: float = 2e-12
    P_dBm: float = 30.0
    sigma2_dBm: float = -70.0
    pattern: str = "tr38901"
    sampling_mode: str = "lcs-direct"
    master_seed: int = 0

    @property
    def wavelength(self) -> float:
        return SPEED_OF_LIGHT / self.carrier_frequency

    @property
    def d_A(self) -> float:
        return self.antenna_spacing if self.antenna_spacing is not None else self.wavelength / 2

    @property
    def d_I(self) -> float:
        return self.irs_spacing if self.irs_spacing is not None else self.wavelength / 2

    @property
    def area(self) -> float:
        return self.element_area if self.element_area is not None else (self.wavelength / 2) ** 2

    @property
    def M(self) -> int:
        return self.M_x * self.M_z

    @property
    def P(self) -> float:
        return dbm_to_watt(self.P_dBm)

    @property
    def sigma2(self) -> float:
        return dbm_to_watt(self.sigma2_dBm)

    @property
    def eta_side(self) -> int:
        return math.isqrt(self.eta)

    def validate(self) -> "SimConfig":
        if self.carrier_frequency <= 0:
            raise ConfigError("carrier_frequency must be > 0")
        for name in ("M_x", "M_z", "N_j1", "N_j2", "K", "L_k"):
            if getattr(self, name) < 1:
                raise ConfigError(f"{name} must be >= 1")
        for name, value in (
            ("antenna_spacing", self.d_A),
            ("irs_spacing", self.d_I),
            ("element_area", self.area),
        ):
            if value <= 0:
                raise ConfigError(f"{name} must be > 0")
        if not 0.0 <= self.theta_tilt <= math.pi / 2:
            raise ConfigError("theta_tilt must lie in [0, pi/2]")
        if self.path_gain_variance <= 0:
            raise ConfigError("path_gain_variance must be > 0")
        if self.eta < 1:
            raise ConfigError("eta must be >= 1")
        side = math.isqrt(self.eta)
        if side * side != self.eta:
            raise ConfigError("eta must be a perfect square (1, 4, 16, ...)")
        if self.M % self.eta != 0:
            raise ConfigError("M_x*M_z must be divisible by eta")
        if self.M_x % side != 0 or self.M_z % side != 0:
            raise ConfigError("eta must split the array into equal square modules")
        if self.N_j2 % side != 0:
            raise ConfigError("N_j2 must be divisible by sqrt(eta)")
        if len(self.initial_phases) != 4:
            raise ConfigError("initial_phases must hold one phase per surface orientation (4)")
        if self.pattern not in PATTERNS:
            raise ConfigError(f"pattern must be one of {PATTERNS}")
        if self.sampling_mode not in SAMPLING_MODES:
            raise ConfigError(f"sampling_mode must be one of {SAMPLING_MODES}")
        return self

    def with_(self, **kwargs) -> "SimConfig":
        return replace(self, **kwargs).validate()


_INT_KEYS = {"M_x", "M_z", "N_j1", "N_j2", "eta", "K", "L_k", "master_seed"}
_FLOAT_KEYS = {
    "carrier_frequency",
    "antenna_spacing",
    "irs_spacing",
    "element_area",
    "theta_tilt",
    "H_AR",
    "path_gain_variance",
    "P_dBm",
    "sigma2_dBm",
}
_STR_KEYS = {"pattern", "sampling_mode"}


def parse_config_text(text: str) -> SimConfig:
    """Parse the flat ``key = value`` config format; unknown keys are errors."""
    values: dict = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {raw!r}")
        key, _, value = line.partition("=")
        key, value = key.strip(), value.strip()
        if key in values:
            raise ConfigError(f"line {lineno}: duplicate key {key!r}")
        if key in _INT_KEYS:
            try:
                values[key] = int(value)
            except ValueError as exc:
                raise ConfigError(f"line {lineno}: {key} must be an integer") from exc
        elif key in _FLOAT_KEYS:
            try:
                values[key] = float(value)
            except ValueError as exc:
                raise ConfigError(f"line {lineno}: {key} must be a number") from exc
        elif key in _STR_KEYS:
            values[key] = value
        elif key == "initial_phases":
            try:
                phases = tuple(float(v) for v in value.split(","))
            except ValueError as exc:
                raise ConfigError(f"line {lineno}: initial_phases must be comma-separated numbers") from exc
            if len(phases) == 1:
                phases = phases * 4
            values[key] = phases
        else:
            raise ConfigError(f"line {lineno}: unknown key {key!r}")
    return SimConfig(**values).validate()


def load_config(path) -> SimConfig:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_config_text(fh.read())

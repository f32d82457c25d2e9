"""Device configuration: geometry, materials, fields, and operating point.

A ``DeviceConfig`` collects every parameter of the bridge / micromagnet /
chain-array design.  Configs are immutable; derived models take one as
input and never mutate it.  JSON documents with SI-unit numeric fields can
be loaded with :func:`load_config`; unknown keys are rejected so that a
typo in a physics parameter fails loudly instead of silently using a
default.
"""

from __future__ import annotations

import dataclasses
import json
from dataclasses import dataclass
from pathlib import Path
from typing import Optional


@dataclass(frozen=True)
class DeviceConfig:
    """All geometric, material, and field parameters of the device.

    Lengths are metres, fields tesla, temperatures kelvin.  ``field_gradient``
    is the design-point longitudinal gradient used to build spin-chain
    models; the magnetostatics module independently reports what the
    micromagnet actually produces.
    """

    bridge_length: float = 300e-6
    bridge_width: float = 4e-6
    bridge_thickness: float = 0.25e-6
    magnet_length: float = 400e-6
    magnet_width: float = 4e-6
    magnet_height: float = 10e-6
    magnet_separation: float = 2.1e-6
    magnet_remanence: float = 3.0  # mu0*M of the micromagnet, tesla
    b0: float = 7.0
    temperature: float = 4.0
    quality_factor: float = 1e4
    youngs_modulus: float = 130e9
    density: float = 2330.0
    lattice_step: float = 1.9e-10  # in-chain spacing along the field axis
    chain_count: float = 1e5
    chain_spacing: float = 15e-9  # chain-array pitch, both transverse axes
    active_length: float = 100e-6
    active_height: float = 0.2e-6
    dark_t1: Optional[float] = None  # informational only
    field_gradient: float = 1.4e6  # design-point dBz/dz, T/m
    pulse_length_factor: float = 1.0  # pi-pulse duration in units of 1/larmor_step
    measurement_bandwidth_hz: float = 1.0
    force_threshold: Optional[float] = None  # override for the noise floor, N
    feedback_factor: float = 1.0  # active-feedback gain applied to bridge T2

    def __post_init__(self):
        lengths = (
            "bridge_length",
            "bridge_width",
            "bridge_thickness",
            "magnet_length",
            "magnet_width",
            "magnet_height",
            "magnet_separation",
            "lattice_step",
            "chain_spacing",
            "active_length",
            "active_height",
        )
        for name in lengths:
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be strictly positive")
        if self.temperature <= 0:
            raise ValueError("temperature must be strictly positive")
        if self.quality_factor < 1:
            raise ValueError("quality_factor must be >= 1")
        if not 0 < self.lattice_step < self.chain_spacing:
            raise ValueError("lattice_step must satisfy 0 < a < chain spacing")
        if self.magnet_remanence <= 0:
            raise ValueError("magnet_remanence must be strictly positive")
        if self.field_gradient <= 0:
            raise ValueError("field_gradient must be strictly positive")
        if self.b0 <= 0 or self.youngs_modulus <= 0 or self.density <= 0:
            raise ValueError("b0, youngs_modulus, density must be strictly positive")
        if self.chain_count < 1:
            raise ValueError("chain_count must be >= 1")
        if self.pulse_length_factor <= 0:
            raise ValueError("pulse_length_factor must be strictly positive")
        if self.measurement_bandwidth_hz <= 0:
            raise ValueError("measurement_bandwidth_hz must be strictly positive")
        if self.force_threshold is not None and self.force_threshold <= 0:
            raise ValueError("force_threshold must be strictly positive when set")
        if self.feedback_factor < 1:
            raise ValueError("feedback_factor must be >= 1")
        if self.dark_t1 is not None and self.dark_t1 <= 0:
            raise ValueError("dark_t1 must be strictly positive when set")


_FIELD_NAMES = {f.name for f in dataclasses.fields(DeviceConfig)}


class ConfigError(ValueError):
    """Raised for malformed or physically invalid configuration input."""


def config_from_dict(data: dict) -> DeviceConfig:
    """Build a config from a plain dict, rejecting unknown keys."""
    if not isinstance(data, dict):
        raise ConfigError("config document must be a JSON object")
    unknown = sorted(set(data) - _FIELD_NAMES)
    if unknown:
        raise ConfigError(f"unknown config keys: {', '.join(unknown)}")
    for key, value in data.items():
        if value is not None and not isinstance(value, (int, float)):
            raise ConfigError(f"config key {key!r} must be numeric, got {value!r}")
    try:
        return DeviceConfig(**data)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc


def load_config(path: str | Path) -> DeviceConfig:
    """Load a DeviceConfig from a JSON file with SI-unit numeric fields."""
    try:
        data = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise ConfigError(f"invalid JSON in {path}: {exc}") from exc
    return config_from_dict(data)


def config_to_dict(config: DeviceConfig) -> dict:
    return dataclasses.asdict(config)

"""JSON configuration for the service and CLI.

One file describes the whole session: scene, stick, kernel timing, and the
service endpoint. Unknown keys are rejected so typos fail loudly at
startup instead of silently running defaults. The packaged default is a
nano scene at interactive rates; the sweep CLI falls back to the tuned
experiment defaults instead when no file is given.
"""

from __future__ import annotations

import json
import math
import os
from dataclasses import dataclass, field
from importlib import resources

from .forces import MacroContactParams, NanoForceParams, SceneConfig
from .stick import ConfigError, KernelConfig, StickParams

__all__ = ["ServiceConfig", "AppConfig", "load_config", "default_config", "CONFIG_ENV_VAR"]

CONFIG_ENV_VAR = "NANOTOUCH_CONFIG"


@dataclass(frozen=True, slots=True)
class ServiceConfig:
    port: int = 8787
    snapshot_hz: float = 60.0
    telemetry_dir: str = "telemetry"
    initial_handle_pos: float = 2e-8
    # None means the loop default (twice its batch interval). Raising it is
    # only appropriate on hosts whose scheduler steals the CPU in long
    # chunks; the missed-deadline metric then reports service-caused misses
    # rather than hypervisor noise.
    miss_tolerance_s: float | None = None

    def __post_init__(self) -> None:
        if not (0 < self.port < 65536):
            raise ConfigError(f"port must be in 1..65535, got {self.port}")
        if not (0 < self.snapshot_hz and math.isfinite(self.snapshot_hz)):
            raise ConfigError(f"snapshot_hz must be > 0, got {self.snapshot_hz}")
        if self.miss_tolerance_s is not None and not self.miss_tolerance_s > 0:
            raise ConfigError(f"miss_tolerance_s must be > 0, got {self.miss_tolerance_s}")


@dataclass(frozen=True, slots=True)
class AppConfig:
    kernel: KernelConfig
    service: ServiceConfig = field(default_factory=ServiceConfig)


def _take(section: dict, key: str, default):
    return section.pop(key, default)


def _no_leftovers(section: dict, where: str) -> None:
    if section:
        raise ConfigError(f"unknown keys in {where}: {sorted(section)}")


def _parse(doc: dict) -> AppConfig:
    if not isinstance(doc, dict):
        raise ConfigError("config root must be a JSON object")
    doc = dict(doc)

    scene_doc = dict(_take(doc, "scene", {}))
    nano_doc = dict(_take(scene_doc, "nano", {}))
    nano = NanoForceParams(
        hamaker=float(_take(nano_doc, "hamaker_J", 1e-19)),
        tip_radius=float(_take(nano_doc, "tip_radius_m", 2e-8)),
        repulsion_length=float(_take(nano_doc, "repulsion_length_m", 3.4e-10)),
    )
    _no_leftovers(nano_doc, "scene.nano")
    macro_doc = dict(_take(scene_doc, "macro", {}))
    macro = MacroContactParams(
        wall_stiffness=float(_take(macro_doc, "wall_stiffness_N_per_m", 1e3)),
        wall_damping=float(_take(macro_doc, "wall_damping_Ns_per_m", 0.5)),
    )
    _no_leftovers(macro_doc, "scene.macro")
    scene = SceneConfig(
        blend=float(_take(scene_doc, "blend", 0.0)),
        nano=nano,
        macro=macro,
        length_unit=float(_take(scene_doc, "length_unit_m", 1.0)),
        force_unit=float(_take(scene_doc, "force_unit_N", 1.0)),
    )
    _no_leftovers(scene_doc, "scene")

    stick_doc = dict(_take(doc, "stick", {}))
    stick = StickParams(
        mass=float(_take(stick_doc, "mass_kg", 8e-5)),
        stiffness=float(_take(stick_doc, "stiffness_N_per_m", 0.1)),
        damping=float(_take(stick_doc, "damping_Ns_per_m", 1e-3)),
    )
    _no_leftovers(stick_doc, "stick")

    kernel_doc = dict(_take(doc, "kernel", {}))
    kernel = KernelConfig(
        dt=float(_take(kernel_doc, "dt_s", 1e-4)),
        scene=scene,
        stick=stick,
        gap_floor_fraction=float(_take(kernel_doc, "gap_floor_fraction", 0.49)),
    )
    _no_leftovers(kernel_doc, "kernel")

    service_doc = dict(_take(doc, "service", {}))
    miss_tol = _take(service_doc, "miss_tolerance_s", None)
    service = ServiceConfig(
        port=int(_take(service_doc, "port", 8787)),
        snapshot_hz=float(_take(service_doc, "snapshot_hz", 60.0)),
        telemetry_dir=str(_take(service_doc, "telemetry_dir", "telemetry")),
        initial_handle_pos=float(_take(service_doc, "initial_handle_pos_m", 2e-8)),
        miss_tolerance_s=None if miss_tol is None else float(miss_tol),
    )
    _no_leftovers(service_doc, "service")
    _no_leftovers(doc, "config")

    # A blended scene must stay inside the stability bound at every slider
    # position, not just the configured one.
    for blend in (0.0, 1.0):
        kernel.with_blend(blend)

    return AppConfig(kernel=kernel, service=service)


def default_config() -> AppConfig:
    """The packaged interactive default (macro scene, nano constants ready)."""
    text = resources.files("nanotouch").joinpath("data/default_config.json").read_text()
    return _parse(json.loads(text))


def load_config(path: str | None = None) -> AppConfig:
    """Load a config file, falling back to $NANOTOUCH_CONFIG, then defaults.

    Raises ConfigError for anything wrong with the file: syntax, unknown
    keys, invalid values, or an unstable kernel configuration.
    """
    if path is None:
        path = os.environ.get(CONFIG_ENV_VAR) or None
    if path is None:
        return default_config()
    try:
        with open(path, "r", encoding="utf-8") as fh:
            doc = json.load(fh)
    except FileNotFoundError as exc:
        raise ConfigError(f"config file not found: {path}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config file {path} is not valid JSON: {exc}") from exc
    try:
        return _parse(doc)
    except (ValueError, TypeError) as exc:
        raise ConfigError(f"config file {path}: {exc}") from exc

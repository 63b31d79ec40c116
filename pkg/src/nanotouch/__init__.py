"""nanotouch: a 1D virtual nanomanipulator.

An elastic virtual probe, driven by an operator or a scripted trajectory,
touches either a macroscopic table or a nanoscale surface whose long-range
attraction produces the snap-in instability and hysteretic force-approach
curves. The package splits into pure force laws (:mod:`.forces`), the
deterministic stepping kernel (:mod:`.stick`), headless experiments with
an independent quasi-static oracle (:mod:`.experiments`), and a realtime
streaming service (:mod:`.server`, :mod:`.realtime`) with a CLI
(:mod:`.cli`).
"""

from .forces import (
    GapDomainError,
    MacroContactParams,
    NanoForceParams,
    SceneConfig,
    macro_force,
    nano_force,
    nano_force_gradient,
    scene_force,
)
from .stick import (
    ConfigError,
    KernelConfig,
    StepError,
    StickParams,
    StickState,
    handle_force,
    run,
    step,
)

__version__ = "0.1.0"

__all__ = [
    "GapDomainError",
    "MacroContactParams",
    "NanoForceParams",
    "SceneConfig",
    "macro_force",
    "nano_force",
    "nano_force_gradient",
    "scene_force",
    "ConfigError",
    "KernelConfig",
    "StepError",
    "StickParams",
    "StickState",
    "handle_force",
    "run",
    "step",
    "__version__",
]

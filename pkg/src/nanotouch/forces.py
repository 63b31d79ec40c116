"""Tip-surface force laws for the macro table, the nano surface, and blends.

All functions here are pure and stateless; they may be called from any
thread. Quantities are SI unless a :class:`SceneConfig` says otherwise:
the nano force law is always evaluated in meters/newtons, while the scene
("simulation") coordinate is converted through ``length_unit`` /
``force_unit``. With both units at 1.0 the scene coordinate simply is
meters, which is how the headless experiment configs run.

Geometry convention: the surface lies at coordinate 0 and positions are
heights above it, so a probe tip at height ``d > 0`` has gap ``d`` and a
negative force pulls it toward the surface.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

__all__ = [
    "GapDomainError",
    "NanoForceParams",
    "MacroContactParams",
    "SceneConfig",
    "nano_force",
    "nano_force_gradient",
    "macro_force",
    "scene_force",
    "scene_force_gradient",
]

# F(d) crosses zero at d0 = repulsion_length / 30**(1/6).
_THIRTY_SIXTH_ROOT = 30.0 ** (1.0 / 6.0)


class GapDomainError(ValueError):
    """Raised when a nano-scale force is queried at gap <= 0.

    The sphere-plane law is singular at contact; the dynamics kernel keeps
    the tip above a positive gap floor so this never fires mid-run.
    """


@dataclass(frozen=True, slots=True)
class NanoForceParams:
    """Physical constants of the nanoscale tip-surface interaction.

    hamaker: attraction strength (J), tip_radius: probe apex radius (m),
    repulsion_length: short-range length scale sigma (m).
    """

    hamaker: float = 1e-19
    tip_radius: float = 2e-8
    repulsion_length: float = 3.4e-10

    def __post_init__(self) -> None:
        if not (self.hamaker > 0 and math.isfinite(self.hamaker)):
            raise ValueError(f"hamaker must be finite and > 0, got {self.hamaker}")
        if not (self.tip_radius > 0 and math.isfinite(self.tip_radius)):
            raise ValueError(f"tip_radius must be finite and > 0, got {self.tip_radius}")
        if not (self.repulsion_length > 0 and math.isfinite(self.repulsion_length)):
            raise ValueError(
                f"repulsion_length must be finite and > 0, got {self.repulsion_length}"
            )

    @property
    def equilibrium_gap(self) -> float:
        """Gap where the force crosses zero: repulsion_length / 30**(1/6)."""
        return self.repulsion_length / _THIRTY_SIXTH_ROOT


@dataclass(frozen=True, slots=True)
class MacroContactParams:
    """Penalty contact for the meter-scale table: no force until touch."""

    wall_stiffness: float = 1e3
    wall_damping: float = 0.5

    def __post_init__(self) -> None:
        if not (self.wall_stiffness > 0 and math.isfinite(self.wall_stiffness)):
            raise ValueError(f"wall_stiffness must be > 0, got {self.wall_stiffness}")
        if not (self.wall_damping >= 0 and math.isfinite(self.wall_damping)):
            raise ValueError(f"wall_damping must be >= 0, got {self.wall_damping}")


@dataclass(frozen=True, slots=True)
class SceneConfig:
    """Which world the probe touches and how scene coordinates map to SI.

    blend interpolates the surface force: 0 is the pure macro table, 1 the
    pure nano surface. length_unit is meters per scene length unit and
    force_unit newtons per scene force unit; the macro contact is defined
    directly in scene units, the nano law in SI.
    """

    blend: float = 1.0
    nano: NanoForceParams = field(default_factory=NanoForceParams)
    macro: MacroContactParams = field(default_factory=MacroContactParams)
    length_unit: float = 1.0
    force_unit: float = 1.0

    def __post_init__(self) -> None:
        if not (0.0 <= self.blend <= 1.0):
            raise ValueError(f"blend must be in [0, 1], got {self.blend}")
        if not (self.length_unit > 0 and math.isfinite(self.length_unit)):
            raise ValueError(f"length_unit must be > 0, got {self.length_unit}")
        if not (self.force_unit > 0 and math.isfinite(self.force_unit)):
            raise ValueError(f"force_unit must be > 0, got {self.force_unit}")


def nano_force(gap: float, p: NanoForceParams) -> float:
    """Sphere-plane force on the tip at the given gap (m), in newtons.

    F(d) = (H*R/6) * (sigma^6/(30*d^8) - 1/d^2): attractive (negative) in
    the far field, repulsive below the zero at sigma/30**(1/6), singular
    at contact. Callers must keep gap > 0.
    """
    if not gap > 0.0:
        raise GapDomainError(f"nano force needs gap > 0, got {gap!r}")
    s_over_d6 = (p.repulsion_length / gap) ** 6
    return p.hamaker * p.tip_radius / (6.0 * gap * gap) * (s_over_d6 / 30.0 - 1.0)


def nano_force_gradient(gap: float, p: NanoForceParams) -> float:
    """dF/dd of :func:`nano_force` (N/m); +H*R/(3 d^3) on the far branch.

    The snap-in instability happens where this exceeds the probe spring
    stiffness, so the zero-crossing structure matters: positive for
    gap > sigma*(2/15)**(1/6), negative (restoring) below.
    """
    if not gap > 0.0:
        raise GapDomainError(f"nano force gradient needs gap > 0, got {gap!r}")
    s_over_d6 = (p.repulsion_length / gap) ** 6
    return p.hamaker * p.tip_radius / (6.0 * gap ** 3) * (2.0 - (4.0 / 15.0) * s_over_d6)


def macro_force(gap: float, tip_velocity: float, p: MacroContactParams) -> float:
    """Penalty contact force for the macro table, in scene force units.

    Zero for any positive gap (no long-range pull at our scale); while
    penetrating, a Hooke penalty plus damping, clamped at zero so the
    contact can only push, never suck the tip in.
    """
    if gap > 0.0:
        return 0.0
    raw = -p.wall_stiffness * gap - p.wall_damping * tip_velocity
    return raw if raw > 0.0 else 0.0


def scene_force(gap: float, tip_velocity: float, s: SceneConfig) -> float:
    """Blended surface force at a scene-unit gap, in scene force units.

    Each endpoint is evaluated in its own unit system: macro directly in
    scene units, nano at gap*length_unit with the result divided by
    force_unit. blend=0 and blend=1 reduce exactly to the pure scenes;
    the nano domain error can only propagate when blend > 0.
    """
    b = s.blend
    total = 0.0
    if b < 1.0:
        total += (1.0 - b) * macro_force(gap, tip_velocity, s.macro)
    if b > 0.0:
        total += b * nano_force(gap * s.length_unit, s.nano) / s.force_unit
    return total


def scene_force_gradient(gap: float, s: SceneConfig) -> float:
    """Stiffness dF/dgap of the blended surface force, scene units.

    The macro side contributes -wall_stiffness while penetrating and 0
    otherwise (the velocity term carries no positional stiffness); used by
    the kernel's configuration-time stability check at the gap floor.
    """
    b = s.blend
    total = 0.0
    if b < 1.0 and gap <= 0.0:
        total += -(1.0 - b) * s.macro.wall_stiffness
    if b > 0.0:
        grad_si = nano_force_gradient(gap * s.length_unit, s.nano)
        total += b * grad_si * s.length_unit / s.force_unit
    return total

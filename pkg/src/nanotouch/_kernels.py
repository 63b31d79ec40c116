"""Jitted hot paths: the integrator step, batch drivers, and sweep loop.

Everything here operates on plain float64 arrays so the realtime loop and
the headless sweeps never touch Python objects per step. The force
expressions mirror :mod:`nanotouch.forces` operation-for-operation so both
paths produce bitwise-identical values (no fastmath, no reassociation).

State vector layout (scene units):
    s[0] tip_pos   s[1] tip_vel   s[2] handle_pos
    s[3] time      s[4] last_force_on_handle   s[5] last_surface_force

Parameter vector layout (see :func:`nanotouch.stick.pack_params`):
    p[0] dt    p[1] mass  p[2] stiffness  p[3] damping  p[4] blend
    p[5] hamaker  p[6] tip_radius  p[7] repulsion_length
    p[8] wall_stiffness  p[9] wall_damping
    p[10] length_unit  p[11] force_unit  p[12] gap_floor (scene units)
"""

from __future__ import annotations

import math

import numpy as np
from numba import njit

STATE_SIZE = 6
PARAM_SIZE = 13


@njit(cache=True, inline="always")
def surface_force(gap: float, tip_vel: float, p: np.ndarray) -> float:
    """Blended surface force at a scene-unit gap; gap > 0 required when blend > 0."""
    b = p[4]
    total = 0.0
    if b < 1.0:
        if gap <= 0.0:
            raw = -p[8] * gap - p[9] * tip_vel
            if raw > 0.0:
                total += (1.0 - b) * raw
    if b > 0.0:
        d = gap * p[10]
        s_over_d6 = (p[7] / d) ** 6
        f_si = p[5] * p[6] / (6.0 * d * d) * (s_over_d6 / 30.0 - 1.0)
        total += b * f_si / p[11]
    return total


@njit(cache=True, inline="always")
def _advance(s: np.ndarray, p: np.ndarray, handle_target: float) -> None:
    """The semi-implicit Euler update, shared verbatim by every driver.

    The acceleration uses the handle position from before the step; the
    commanded target takes over afterwards, so a fresh command acts on the
    next tick. When blend > 0 the tip gap is clamped to the floor with its
    velocity zeroed (hard core below the repulsion length).
    """
    dt = p[0]
    f_surf = surface_force(s[0], s[1], p)
    a = (p[2] * (s[2] - s[0]) - p[3] * s[1] + f_surf) / p[1]
    s[1] += a * dt
    s[0] += s[1] * dt
    if p[4] > 0.0 and s[0] < p[12]:
        s[0] = p[12]
        s[1] = 0.0
    s[2] = handle_target
    s[3] += dt
    s[4] = p[2] * (s[0] - s[2])
    s[5] = f_surf


@njit(cache=True)
def step(s: np.ndarray, p: np.ndarray, handle_target: float) -> int:
    """One checked step in place. Returns 0, or 1 on non-finite state/input."""
    if not (math.isfinite(handle_target) and math.isfinite(s[0]) and math.isfinite(s[1])):
        return 1
    _advance(s, p, handle_target)
    if not (math.isfinite(s[0]) and math.isfinite(s[1])):
        return 1
    return 0


@njit(cache=True)
def run_recorded(s: np.ndarray, p: np.ndarray, targets: np.ndarray, out: np.ndarray) -> int:
    """Step once per target, recording the full state row-wise into ``out``.

    Returns -1 on success or the index of the failing step.
    """
    n = targets.shape[0]
    for i in range(n):
        if step(s, p, targets[i]) != 0:
            return i
        for j in range(STATE_SIZE):
            out[i, j] = s[j]
    return -1


@njit(cache=True)
def run_tips(s: np.ndarray, p: np.ndarray, targets: np.ndarray, tips: np.ndarray) -> int:
    """Step once per target recording only the tip position (event replay)."""
    n = targets.shape[0]
    for i in range(n):
        if step(s, p, targets[i]) != 0:
            return i
        tips[i] = s[0]
    return -1


@njit(cache=True, inline="always")
def ramp_target(i: int, z_start: float, z_end: float, n_down: int, n_up: int) -> float:
    """Handle target at 1-based step ``i`` of a down-then-up triangle drive.

    Shared by the sweep loop and the event-replay path so both see
    bitwise-identical commands.
    """
    if i <= n_down:
        return z_start + (z_end - z_start) * (i / n_down)
    j = i - n_down
    return z_end + (z_start - z_end) * (j / n_up)


@njit(cache=True)
def ramp_targets(
    out: np.ndarray, i0: int, z_start: float, z_end: float, n_down: int, n_up: int
) -> None:
    """Fill ``out`` with ramp targets for steps i0+1 .. i0+len(out)."""
    for w in range(out.shape[0]):
        out[w] = ramp_target(i0 + w + 1, z_start, z_end, n_down, n_up)


@njit(cache=True)
def sweep(
    s: np.ndarray,
    p: np.ndarray,
    z_start: float,
    z_end: float,
    n_down: int,
    n_up: int,
    sample_every: int,
    preroll: int,
    out: np.ndarray,
    out_step_motion: np.ndarray,
) -> int:
    """Drive the triangle sweep, sampling every ``sample_every`` steps.

    ``out`` must have shape (1 + n_down//sample_every + n_up//sample_every,
    STATE_SIZE); row 0 is the settled pre-sweep state. ``out_step_motion``
    (same length) receives each sample window's maximum per-step tip
    motion, which is what the snap detector thresholds. Finiteness is
    checked at sample boundaries (the inner loop stays branch-light).
    Returns 0 on success, 1 on a non-finite sample.
    """
    for i in range(preroll):
        _advance(s, p, z_start)
    if not (math.isfinite(s[0]) and math.isfinite(s[1])):
        return 1
    for j in range(STATE_SIZE):
        out[0, j] = s[j]
    out_step_motion[0] = 0.0
    k = 1
    max_motion = 0.0
    total = n_down + n_up
    for i in range(1, total + 1):
        tip_old = s[0]
        _advance(s, p, ramp_target(i, z_start, z_end, n_down, n_up))
        motion = abs(s[0] - tip_old)
        if motion > max_motion:
            max_motion = motion
        if i % sample_every == 0:
            if not (math.isfinite(s[0]) and math.isfinite(s[1])):
                return 1
            for j in range(STATE_SIZE):
                out[k, j] = s[j]
            out_step_motion[k] = max_motion
            max_motion = 0.0
            k += 1
    return 0


@njit(cache=True)
def potential_increment(gap_a: float, gap_b: float, p: np.ndarray, du_step: float) -> float:
    """U(gap_b) - U(gap_a) by trapezoid quadrature of -F at <= du_step spacing."""
    span = gap_b - gap_a
    if span == 0.0:
        return 0.0
    n = int(math.ceil(abs(span) / du_step))
    if n < 1:
        n = 1
    h = span / n
    acc = 0.5 * (surface_force(gap_a, 0.0, p) + surface_force(gap_b, 0.0, p))
    for i in range(1, n):
        acc += surface_force(gap_a + h * i, 0.0, p)
    return -acc * h


@njit(cache=True)
def passivity_run(
    s: np.ndarray,
    p: np.ndarray,
    handle: float,
    n_steps: int,
    rel_slack: float,
    u0: float,
) -> tuple[int, float, float, float]:
    """Hold the handle for n_steps and audit E = KE + spring + U every step.

    U is accumulated by trapezoid quadrature of the surface force along the
    trajectory (spacing sigma/100 in scene units). Returns (violations,
    worst_excess, E_first, E_last) where a violation is any step with
    E_new > E_old + rel_slack * |E_old|.
    """
    du_step = (p[7] / p[10]) / 100.0
    u = u0
    e_prev = 0.5 * p[1] * s[1] * s[1] + 0.5 * p[2] * (s[2] - s[0]) ** 2 + u
    e_first = e_prev
    violations = 0
    worst = -1.0e300
    for _ in range(n_steps):
        tip_old = s[0]
        if step(s, p, handle) != 0:
            return (-1, 0.0, e_first, e_prev)
        u += potential_increment(tip_old, s[0], p, du_step)
        e = 0.5 * p[1] * s[1] * s[1] + 0.5 * p[2] * (s[2] - s[0]) ** 2 + u
        excess = e - e_prev - rel_slack * abs(e_prev)
        if excess > 0.0:
            violations += 1
        if excess > worst:
            worst = excess
        e_prev = e
    return (violations, worst, e_first, e_prev)


def warmup() -> None:
    """Force-compile the jitted paths once (cached to disk afterwards)."""
    p = np.array(
        [1e-4, 8e-5, 0.1, 1e-3, 1.0, 1e-19, 2e-8, 3.4e-10, 1e3, 0.5, 1.0, 1.0, 1.666e-10],
        dtype=np.float64,
    )
    s = np.array([2e-8, 0.0, 2e-8, 0.0, 0.0, 0.0], dtype=np.float64)
    step(s, p, 2e-8)
    targets = np.full(4, 2e-8, dtype=np.float64)
    run_recorded(s.copy(), p, targets, np.empty((4, STATE_SIZE)))
    run_tips(s.copy(), p, targets, np.empty(4))
    ramp_targets(np.empty(2), 0, 2e-8, 1e-8, 2, 2)
    out = np.empty((3, STATE_SIZE))
    sweep(s.copy(), p, 2e-8, 1.9e-8, 2, 2, 2, 2, out, np.empty(3))
    passivity_run(s.copy(), p, 2e-8, 2, 1e-12, 0.0)

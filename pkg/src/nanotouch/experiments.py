"""Headless force-curve science: sweeps, snap events, hysteresis, oracle.

A quasi-static sweep drives the kernel's handle down to the surface and
back while sampling the reaction force, then detects snap events from the
sampled tip motion. The equilibrium oracle is the independent cross-check:
it never integrates anything, it brute-force scans the static force
balance and refines roots by bisection, so agreement between the two is
meaningful evidence the dynamics are right.

All public values in this module are SI (meters, newtons, seconds); scene
units are converted at the kernel boundary.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .forces import SceneConfig, nano_force, nano_force_gradient
from .stick import KernelConfig, StickParams, pack_params

__all__ = [
    "PreconditionError",
    "MismatchedRangesError",
    "SnapEvent",
    "CurveBranch",
    "ForceCurve",
    "EquilibriumSet",
    "OracleValidationReport",
    "default_sweep_config",
    "quasi_static_sweep",
    "equilibrium_oracle",
    "equilibrium_count",
    "find_bistable_window",
    "fold_gap",
    "hysteresis_energy",
    "validate_against_oracle",
    "curve_csv_text",
    "write_curve_csv",
    "read_curve_csv",
    "CURVE_CSV_HEADER",
]

# Sweep defaults, tuned together: the damping*speed product bounds the
# lag-dissipation that separates the no-snap branches, while damping also
# sets how many steps the post-snap transient needs to die inside the
# detector's exclusion window. See tests/test_acceptance.py for the
# tolerances these must meet.
SWEEP_DT = 1e-5
SWEEP_MASS = 8e-7
SWEEP_DAMPING = 2.5e-5
SWEEP_GAP_FLOOR_FRACTION = 0.49
DEFAULT_Z_START = 4.4e-8
DEFAULT_Z_END = 1e-9
DEFAULT_SPEED = 1.4e-10
DEFAULT_SAMPLE_EVERY = 100_000
DEFAULT_PREROLL = 100_000

# Per-step handle motion must stay below this fraction of the repulsion
# length or the sweep is rejected outright.
SPEED_BOUND_SIGMA_FRACTION = 0.01

EVENT_THRESHOLD_FACTOR = 10.0
EVENT_MEDIAN_WINDOW = 100
EVENT_EXCLUSION_SAMPLES = 3

ORACLE_RESOLUTION_FRACTION = 1e-3
ORACLE_SPAN_SIGMA = 10.0
ORACLE_BISECT_TOL = 1e-12
VALIDATION_TOL_SIGMA = 1e-2

CURVE_CSV_HEADER = "branch,handle_pos_m,handle_force_N,tip_gap_m,time_s"


class PreconditionError(ValueError):
    """A sweep or oracle query was asked outside its contract."""


class MismatchedRangesError(ValueError):
    """Approach and retract branches do not cover the same handle range."""


@dataclass(frozen=True, slots=True)
class SnapEvent:
    """One detected jump of the tip.

    kind is "snap_in" (gap shrank) or "snap_off" (gap grew); handle_pos and
    tip gaps are SI. first_sample/last_sample delimit the detector run in
    the sweep's sample series and are None for curves loaded from CSV.
    """

    kind: str
    handle_pos: float
    tip_gap_before: float
    tip_gap_after: float
    time: float = 0.0
    first_sample: int | None = None
    last_sample: int | None = None

    def __post_init__(self) -> None:
        if self.kind not in ("snap_in", "snap_off"):
            raise ValueError(f"unknown event kind {self.kind!r}")
        if self.kind == "snap_in" and not self.tip_gap_after < self.tip_gap_before:
            raise ValueError("snap_in must reduce the tip gap")
        if self.kind == "snap_off" and not self.tip_gap_after > self.tip_gap_before:
            raise ValueError("snap_off must increase the tip gap")


@dataclass(frozen=True)
class CurveBranch:
    """One direction of a force curve: aligned arrays over the samples."""

    handle: np.ndarray
    force: np.ndarray
    gap: np.ndarray
    time: np.ndarray

    def __len__(self) -> int:
        return len(self.handle)


@dataclass(frozen=True)
class ForceCurve:
    """Approach and retract branches of handle force vs handle position.

    Both branches include the turnaround sample, so together they cover the
    same handle range by construction.
    """

    approach: CurveBranch
    retract: CurveBranch
    events: tuple[SnapEvent, ...] = ()
    params_snapshot: KernelConfig | None = None

    def __post_init__(self) -> None:
        if len(self.approach) < 2 or len(self.retract) < 2:
            raise ValueError("both branches need at least two samples")
        if not np.all(np.diff(self.approach.handle) < 0):
            raise ValueError("approach handle positions must be strictly decreasing")
        if not np.all(np.diff(self.retract.handle) > 0):
            raise ValueError("retract handle positions must be strictly increasing")

    @property
    def sample_spacing(self) -> float:
        """Median handle spacing between consecutive samples."""
        return float(np.median(np.abs(np.diff(self.approach.handle))))

    def series(self) -> tuple[np.ndarray, np.ndarray]:
        """(handle, gap) over the full sweep, turnaround sample once."""
        handle = np.concatenate([self.approach.handle, self.retract.handle[1:]])
        gap = np.concatenate([self.approach.gap, self.retract.gap[1:]])
        return handle, gap


@dataclass(frozen=True)
class EquilibriumSet:
    """Static force-balance roots at one handle height, with stability."""

    handle_pos: float
    equilibria: tuple[tuple[float, bool], ...]

    @property
    def stable_gaps(self) -> tuple[float, ...]:
        return tuple(g for g, stable in self.equilibria if stable)


@dataclass(frozen=True)
class OracleValidationReport:
    """Outcome of checking a dynamic curve against the static oracle."""

    passed: bool
    worst_gap_deviation_m: float
    worst_handle_pos_m: float
    tolerance_m: float
    samples_checked: int
    events: tuple[dict, ...]

    def to_json(self) -> str:
        return json.dumps(
            {
                "pass": self.passed,
                "worst_gap_deviation_m": self.worst_gap_deviation_m,
                "worst_handle_pos_m": self.worst_handle_pos_m,
                "tolerance_m": self.tolerance_m,
                "samples_checked": self.samples_checked,
                "events": list(self.events),
            }
        )


def default_sweep_config(stiffness: float = 0.1, scene: SceneConfig | None = None) -> KernelConfig:
    """Kernel config tuned for oracle-grade quasi-static sweeps."""
    return KernelConfig(
        dt=SWEEP_DT,
        scene=scene if scene is not None else SceneConfig(blend=1.0),
        stick=StickParams(mass=SWEEP_MASS, stiffness=stiffness, damping=SWEEP_DAMPING),
        gap_floor_fraction=SWEEP_GAP_FLOOR_FRACTION,
    )


def _speed_bound(cfg: KernelConfig) -> float:
    """Maximum permitted handle speed (SI m/s) for quasi-static sweeps."""
    sigma = cfg.scene.nano.repulsion_length
    return SPEED_BOUND_SIGMA_FRACTION * sigma / cfg.dt


def quasi_static_sweep(
    cfg: KernelConfig,
    z_start: float = DEFAULT_Z_START,
    z_end: float = DEFAULT_Z_END,
    speed: float = DEFAULT_SPEED,
    *,
    sample_every: int = DEFAULT_SAMPLE_EVERY,
    preroll: int = DEFAULT_PREROLL,
) -> ForceCurve:
    """Drive the handle z_start -> z_end -> z_start and record the curve.

    Arguments are SI; speed is the handle speed in m/s. The tip starts
    co-located with the handle and is given ``preroll`` steps to settle
    before sampling begins. Snap events are detected from the sampled tip
    motion (threshold: EVENT_THRESHOLD_FACTOR times the rolling median per
    step over EVENT_MEDIAN_WINDOW samples) and anchored to the exact step
    where the jump began by deterministically replaying the event window.
    """
    if not (z_start > z_end >= 0.0):
        raise PreconditionError(f"need z_start > z_end >= 0, got {z_start}, {z_end}")
    if not speed > 0.0:
        raise PreconditionError(f"speed must be > 0, got {speed}")
    bound = _speed_bound(cfg)
    if not speed < bound:
        raise PreconditionError(
            f"sweep speed {speed:g} m/s is not quasi-static: per-step handle motion "
            f"{speed * cfg.dt:g} m exceeds {SPEED_BOUND_SIGMA_FRACTION:g}*sigma = "
            f"{bound * cfg.dt:g} m (speed bound {bound:g} m/s)"
        )
    if sample_every < 1 or preroll < 0:
        raise PreconditionError("sample_every must be >= 1 and preroll >= 0")

    lu, fu = cfg.scene.length_unit, cfg.scene.force_unit
    za, zb = z_start / lu, z_end / lu
    h_step = speed * cfg.dt / lu
    n_down = max(1, round((za - zb) / h_step / sample_every)) * sample_every
    n_up = n_down

    p = pack_params(cfg)
    s = np.array([za, 0.0, za, 0.0, 0.0, 0.0], dtype=np.float64)
    n_samples = 1 + n_down // sample_every + n_up // sample_every
    raw = np.empty((n_samples, _kernels.STATE_SIZE), dtype=np.float64)
    step_motion = np.empty(n_samples, dtype=np.float64)
    status = _kernels.sweep(
        s, p, za, zb, n_down, n_up, sample_every, preroll, raw, step_motion
    )
    if status != 0:
        raise RuntimeError("sweep diverged to a non-finite state; check the configuration")

    events = _detect_events(raw, step_motion, p, za, zb, n_down, n_up, sample_every, lu)

    turn = n_down // sample_every
    handle = raw[:, 2] * lu
    force = raw[:, 4] * fu
    gap = raw[:, 0] * lu
    t = raw[:, 3]

    approach = CurveBranch(handle[: turn + 1], force[: turn + 1], gap[: turn + 1], t[: turn + 1])
    retract = CurveBranch(handle[turn:], force[turn:], gap[turn:], t[turn:])
    return ForceCurve(approach=approach, retract=retract, events=tuple(events), params_snapshot=cfg)


def _rolling_median_thresholds(step_motion: np.ndarray) -> np.ndarray:
    """Per-step event thresholds per sample; +inf while the window fills."""
    w = EVENT_MEDIAN_WINDOW
    thr = np.full(step_motion.shape, np.inf)
    for i in range(w + 1, len(step_motion)):
        thr[i] = EVENT_THRESHOLD_FACTOR * float(np.median(step_motion[i - w : i]))
    return thr


def _detect_events(
    raw: np.ndarray,
    step_motion: np.ndarray,
    p: np.ndarray,
    za: float,
    zb: float,
    n_down: int,
    n_up: int,
    sample_every: int,
    lu: float,
) -> list[SnapEvent]:
    """Flag samples whose peak per-step tip motion beats the rolling median.

    A run of consecutive flagged samples is one event: the jump plus its
    settling transient. The pre-jump anchor is refined to step resolution
    by deterministic replay; the landing gap is read at the first clean
    sample after the run.
    """
    gap = raw[:, 0]
    thr = _rolling_median_thresholds(step_motion)
    exceed = step_motion > thr

    events: list[SnapEvent] = []
    n = len(gap)
    i = 0
    while i < n:
        if not exceed[i]:
            i += 1
            continue
        j = i
        while j + 1 < n and exceed[j + 1]:
            j += 1
        anchor_gap, anchor_handle, anchor_time = _anchor_event(
            raw, p, za, zb, n_down, n_up, sample_every, i, thr[i]
        )
        gap_after = float(gap[min(j + 1, n - 1)])
        kind = "snap_in" if gap_after < anchor_gap else "snap_off"
        events.append(
            SnapEvent(
                kind=kind,
                handle_pos=anchor_handle * lu,
                tip_gap_before=anchor_gap * lu,
                tip_gap_after=gap_after * lu,
                time=anchor_time,
                first_sample=i,
                last_sample=j,
            )
        )
        i = j + 1
    return events


def _anchor_event(
    raw: np.ndarray,
    p: np.ndarray,
    za: float,
    zb: float,
    n_down: int,
    n_up: int,
    sample_every: int,
    first_sample: int,
    step_threshold: float,
) -> tuple[float, float, float]:
    """Pin an event to the step where the jump began.

    Replays the flagged sample's window deterministically (same update,
    same ramp targets) and finds the first step whose tip motion exceeds
    the per-step threshold; the state just before it is the pre-jump
    anchor.
    """
    total = n_down + n_up
    g0 = (first_sample - 1) * sample_every
    n_win = min(2 * sample_every, total - g0)
    start = raw[first_sample - 1]

    targets = np.empty(n_win, dtype=np.float64)
    _kernels.ramp_targets(targets, g0, za, zb, n_down, n_up)
    s = np.array([start[0], start[1], start[2], start[3], start[4], start[5]])
    tips = np.empty(n_win, dtype=np.float64)
    bad = _kernels.run_tips(s, p, targets, tips)
    if bad >= 0:
        return float(start[0]), float(start[2]), float(start[3])

    prev_gap = start[0]
    for w in range(n_win):
        if abs(tips[w] - prev_gap) > step_threshold:
            if w == 0:
                return float(start[0]), float(start[2]), float(start[3])
            return float(tips[w - 1]), float(targets[w - 1]), float(start[3] + w * p[0])
        prev_gap = tips[w]
    return float(start[0]), float(start[2]), float(start[3])


def _oracle_cfg_si(cfg: KernelConfig) -> tuple[float, float, float]:
    """(stiffness_si, floor_si, sigma) for static balance work, nano scene only."""
    if cfg.scene.blend != 1.0:
        raise PreconditionError("the equilibrium oracle requires the pure nano scene (blend=1)")
    lu, fu = cfg.scene.length_unit, cfg.scene.force_unit
    k_si = cfg.stick.stiffness * fu / lu
    floor_si = cfg.gap_floor * lu
    return k_si, floor_si, cfg.scene.nano.repulsion_length


def _balance_grid(cfg: KernelConfig, z: float) -> tuple[np.ndarray, np.ndarray]:
    """g(d) = k(z - d) + F(d) on the oracle's scan grid, all SI."""
    k_si, floor_si, sigma = _oracle_cfg_si(cfg)
    nano = cfg.scene.nano
    d = np.arange(floor_si, z + ORACLE_SPAN_SIGMA * sigma, sigma * ORACLE_RESOLUTION_FRACTION)
    ratio6 = (nano.repulsion_length / d) ** 6
    f = nano.hamaker * nano.tip_radius / (6.0 * d * d) * (ratio6 / 30.0 - 1.0)
    return d, k_si * (z - d) + f


def _bisect_balance(cfg: KernelConfig, z: float, a: float, b: float) -> float:
    """Refine a bracketed root of the static balance to ORACLE_BISECT_TOL."""
    k_si, _, _ = _oracle_cfg_si(cfg)
    nano = cfg.scene.nano

    def g(d: float) -> float:
        return k_si * (z - d) + nano_force(d, nano)

    ga = g(a)
    while b - a > ORACLE_BISECT_TOL:
        m = 0.5 * (a + b)
        gm = g(m)
        if (ga < 0.0) == (gm < 0.0):
            a, ga = m, gm
        else:
            b = m
    return 0.5 * (a + b)


def equilibrium_oracle(cfg: KernelConfig, handle_pos: float) -> EquilibriumSet:
    """All static equilibria of the tip at one handle height (SI).

    Brute force by construction: scan the force balance at sigma/1000
    resolution from the gap floor to handle_pos + 10 sigma, bracket every
    sign change, refine each by bisection, and classify stability by
    comparing the force gradient with the spring stiffness. Shares no
    machinery with the dynamics kernel.
    """
    k_si, _, _ = _oracle_cfg_si(cfg)
    d, g = _balance_grid(cfg, handle_pos)
    crossings = np.nonzero(np.signbit(g[1:]) != np.signbit(g[:-1]))[0]
    nano = cfg.scene.nano
    equilibria = []
    for idx in crossings:
        root = _bisect_balance(cfg, handle_pos, float(d[idx]), float(d[idx + 1]))
        stable = (k_si - nano_force_gradient(root, nano)) > 0.0
        equilibria.append((root, stable))
    return EquilibriumSet(handle_pos=handle_pos, equilibria=tuple(equilibria))


def equilibrium_count(cfg: KernelConfig, handle_pos: float) -> int:
    """Number of static equilibria at a handle height (scan only)."""
    _, g = _balance_grid(cfg, handle_pos)
    return int(np.sum(np.signbit(g[1:]) != np.signbit(g[:-1])))


def find_bistable_window(
    cfg: KernelConfig,
    z_lo: float,
    z_hi: float,
    coarse: int = 1024,
    z_tol: float = 1e-13,
) -> tuple[float, float] | None:
    """Handle range [z_lower, z_upper] with three equilibria, or None.

    The lower boundary is the fold where the far branch vanishes (the
    snap-in height on approach); the upper one is where the near branch
    vanishes (the snap-off height on retract). Boundaries are located by
    bisection on the oracle's equilibrium count.
    """
    zs = np.linspace(z_lo, z_hi, coarse)
    counts = np.array([equilibrium_count(cfg, z) for z in zs])
    multi = np.nonzero(counts >= 3)[0]
    if len(multi) == 0:
        return None

    def bisect_boundary(z_single: float, z_multi: float) -> float:
        while abs(z_multi - z_single) > z_tol:
            m = 0.5 * (z_single + z_multi)
            if equilibrium_count(cfg, m) >= 3:
                z_multi = m
            else:
                z_single = m
        return 0.5 * (z_single + z_multi)

    lo_idx, hi_idx = multi[0], multi[-1]
    z_lower = zs[lo_idx] if lo_idx == 0 else bisect_boundary(zs[lo_idx - 1], zs[lo_idx])
    z_upper = zs[hi_idx] if hi_idx == len(zs) - 1 else bisect_boundary(zs[hi_idx + 1], zs[hi_idx])
    return float(z_lower), float(z_upper)


def fold_gap(cfg: KernelConfig, z_fold: float, side: str, probe_offset: float = 2e-12) -> float:
    """Tip gap where two equilibria merge at a fold, by probing just inside.

    side "lower": the far-stable/unstable pair that disappears on approach;
    side "upper": the near-stable/unstable pair that disappears on retract.
    """
    if side == "lower":
        z_probe = z_fold + probe_offset
        eq = equilibrium_oracle(cfg, z_probe)
        gaps = sorted(g for g, _ in eq.equilibria)
        if len(gaps) < 2:
            raise RuntimeError(f"no equilibrium pair just above the lower fold at z={z_probe}")
        return 0.5 * (gaps[-1] + gaps[-2])
    if side == "upper":
        z_probe = z_fold - probe_offset
        eq = equilibrium_oracle(cfg, z_probe)
        gaps = sorted(g for g, _ in eq.equilibria)
        if len(gaps) < 2:
            raise RuntimeError(f"no equilibrium pair just below the upper fold at z={z_probe}")
        return 0.5 * (gaps[0] + gaps[1])
    raise ValueError(f"side must be 'lower' or 'upper', got {side!r}")


def hysteresis_energy(curve: ForceCurve) -> float:
    """Signed area between approach and retract force branches, in joules.

    Positive when the cycle dissipates (approach force above retract over
    the common range), which is exactly the snap-hysteresis case. Branches
    must cover the same handle range.
    """
    za = curve.approach.handle[::-1]
    fa = curve.approach.force[::-1]
    zr = curve.retract.handle
    fr = curve.retract.force
    span = float(za[-1] - za[0])
    if abs(za[0] - zr[0]) > 1e-9 * abs(span) or abs(za[-1] - zr[-1]) > 1e-9 * abs(span):
        raise MismatchedRangesError(
            f"branch ranges differ: approach [{za[0]!r}, {za[-1]!r}] vs "
            f"retract [{zr[0]!r}, {zr[-1]!r}]"
        )
    fr_on_a = np.interp(za, zr, fr)
    return float(np.trapezoid(fa - fr_on_a, za))


def _nearest_stable_gap(cfg: KernelConfig, z: float, gap_guess: float, tol: float) -> float | None:
    """Nearest stable balance root to gap_guess, searched locally first."""
    k_si, floor_si, sigma = _oracle_cfg_si(cfg)
    nano = cfg.scene.nano

    lo = max(floor_si, gap_guess - 8.0 * tol)
    hi = gap_guess + 8.0 * tol
    d = np.linspace(lo, hi, 65)
    ratio6 = (nano.repulsion_length / d) ** 6
    f = nano.hamaker * nano.tip_radius / (6.0 * d * d) * (ratio6 / 30.0 - 1.0)
    g = k_si * (z - d) + f
    crossings = np.nonzero(np.signbit(g[1:]) != np.signbit(g[:-1]))[0]
    best: float | None = None
    for idx in crossings:
        root = _bisect_balance(cfg, z, float(d[idx]), float(d[idx + 1]))
        if (k_si - nano_force_gradient(root, nano)) > 0.0:
            if best is None or abs(root - gap_guess) < abs(best - gap_guess):
                best = root
    if best is not None:
        return best
    stable = equilibrium_oracle(cfg, z).stable_gaps
    if not stable:
        return None
    return min(stable, key=lambda r: abs(r - gap_guess))


# Fallback exclusion half-width (in samples) around an event whose detector
# run span was lost to CSV serialization; sized to cover the settling runs
# the detector produces at the shipped sweep tuning.
_CSV_EXCLUSION_SAMPLES = EVENT_EXCLUSION_SAMPLES + 8


def _excluded_mask(curve: ForceCurve, n_series: int) -> np.ndarray:
    """Samples within EVENT_EXCLUSION_SAMPLES of any event's detector run."""
    excluded = np.zeros(n_series, dtype=bool)
    spacing = curve.sample_spacing
    handle, _ = curve.series()
    for ev in curve.events:
        if ev.first_sample is not None and ev.last_sample is not None:
            a = max(0, ev.first_sample - EVENT_EXCLUSION_SAMPLES)
            b = min(n_series, ev.last_sample + EVENT_EXCLUSION_SAMPLES + 1)
            excluded[a:b] = True
        else:
            near = np.abs(handle - ev.handle_pos) <= _CSV_EXCLUSION_SAMPLES * spacing
            excluded |= near
    return excluded


def validate_against_oracle(
    curve: ForceCurve,
    cfg: KernelConfig | None = None,
    tolerance: float | None = None,
) -> OracleValidationReport:
    """Check that the dynamic tip tracked a stable oracle equilibrium.

    Every sample outside EVENT_EXCLUSION_SAMPLES of an event run must sit
    within the tolerance (default 0.01 sigma) of a stable static
    equilibrium. The report carries the worst deviation and the events.
    """
    if cfg is None:
        cfg = curve.params_snapshot
    if cfg is None:
        raise ValueError("curve carries no config snapshot; pass cfg explicitly")
    sigma = cfg.scene.nano.repulsion_length
    tol = VALIDATION_TOL_SIGMA * sigma if tolerance is None else tolerance

    handle, gap = curve.series()
    excluded = _excluded_mask(curve, len(handle))
    worst = 0.0
    worst_z = float("nan")
    checked = 0
    for i in range(len(handle)):
        if excluded[i]:
            continue
        nearest = _nearest_stable_gap(cfg, float(handle[i]), float(gap[i]), tol)
        dev = abs(gap[i] - nearest) if nearest is not None else float("inf")
        checked += 1
        if dev > worst:
            worst = float(dev)
            worst_z = float(handle[i])
    event_dicts = tuple(
        {
            "kind": ev.kind,
            "handle_pos_m": ev.handle_pos,
            "tip_gap_before_m": ev.tip_gap_before,
            "tip_gap_after_m": ev.tip_gap_after,
        }
        for ev in curve.events
    )
    return OracleValidationReport(
        passed=bool(worst <= tol),
        worst_gap_deviation_m=worst,
        worst_handle_pos_m=worst_z,
        tolerance_m=tol,
        samples_checked=checked,
        events=event_dicts,
    )


def curve_csv_text(curve: ForceCurve) -> str:
    """The curve in the interchange schema (events as trailing comments).

    Floats are serialized with repr, the shortest decimal that round-trips
    exactly, so identical curves produce identical bytes.
    """
    lines = [CURVE_CSV_HEADER]
    for branch_name, branch in (("approach", curve.approach), ("retract", curve.retract)):
        for i in range(len(branch)):
            lines.append(
                f"{branch_name},{float(branch.handle[i])!r},{float(branch.force[i])!r},"
                f"{float(branch.gap[i])!r},{float(branch.time[i])!r}"
            )
    for ev in curve.events:
        lines.append(
            f"# event,{ev.kind},{float(ev.handle_pos)!r},"
            f"{float(ev.tip_gap_before)!r},{float(ev.tip_gap_after)!r}"
        )
    return "\n".join(lines) + "\n"


def write_curve_csv(curve: ForceCurve, path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(curve_csv_text(curve))


def read_curve_csv(path) -> ForceCurve:
    """Read a curve written by :func:`write_curve_csv` (no config snapshot)."""
    branches: dict[str, list[list[float]]] = {"approach": [], "retract": []}
    events: list[SnapEvent] = []
    with open(path, "r", encoding="utf-8") as fh:
        header = fh.readline().rstrip("\n")
        if header != CURVE_CSV_HEADER:
            raise ValueError(f"unexpected curve CSV header: {header!r}")
        for line in fh:
            line = line.rstrip("\n")
            if not line:
                continue
            if line.startswith("#"):
                parts = [p.strip() for p in line.lstrip("# ").split(",")]
                if parts and parts[0] == "event":
                    kind = parts[1]
                    z, gb, ga = (float(x) for x in parts[2:5])
                    events.append(
                        SnapEvent(kind=kind, handle_pos=z, tip_gap_before=gb, tip_gap_after=ga)
                    )
                continue
            name, *values = line.split(",")
            if name not in branches:
                raise ValueError(f"unknown branch {name!r} in curve CSV")
            branches[name].append([float(v) for v in values])
    made = {}
    for name, rows in branches.items():
        arr = np.asarray(rows, dtype=np.float64)
        if arr.size == 0:
            raise ValueError(f"curve CSV has no {name} rows")
        made[name] = CurveBranch(handle=arr[:, 0], force=arr[:, 1], gap=arr[:, 2], time=arr[:, 3])
    return ForceCurve(approach=made["approach"], retract=made["retract"], events=tuple(events))

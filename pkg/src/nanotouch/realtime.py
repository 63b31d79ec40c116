"""The realtime session core: one thread owns the kernel and steps it on a
wall-clock schedule.

Commands reach the loop through a :class:`CommandMailbox`: handle targets
are last-writer-wins (the kernel wants the freshest human intent; stale
pointer positions are useless), control commands queue reliably up to a
bound. Snapshots leave through a caller-supplied sink that must never
block; if a consumer is slow, frames drop, physics time does not pause.

Scheduling is batched catch-up: the thread wakes every ``batch_interval``
seconds (default 4 ms) and executes every tick whose deadline
``start + n*dt`` has passed, so the long-run stepping rate is exactly
1/dt without pinning a core the way per-tick spinning would. Tick n is
missed when it executes more than ``miss_tolerance`` (two batch
intervals) past its deadline, which only happens when the OS withholds
the CPU longer than a whole batch. After a pathological pause (suspend,
debugger) the schedule resynchronizes and the skipped ticks all count as
missed.
"""

from __future__ import annotations

import threading
import time
from collections import deque
from dataclasses import dataclass, replace

import numpy as np

from . import _kernels
from .protocol import (
    CommandMessage,
    Reset,
    SetBlend,
    SetHandle,
    SetParams,
    WireEvent,
    WireSnapshot,
)
from .stick import ConfigError, KernelConfig, StickParams, pack_params

__all__ = ["CommandMailbox", "LoopMetrics", "RealtimeLoop", "CONTROL_QUEUE_CAPACITY"]

CONTROL_QUEUE_CAPACITY = 64

# Online jump detector at snapshot cadence (UI notifications only; the
# scientific detector lives in experiments).
_DETECTOR_WINDOW = 100
_DETECTOR_FACTOR = 10.0


@dataclass
class LoopMetrics:
    ticks: int = 0
    missed_deadlines: int = 0
    snapshots_published: int = 0
    snapshot_drops: int = 0
    commands_seen: int = 0
    control_rejected: int = 0
    config_errors: int = 0


class CommandMailbox:
    """Thread-safe command intake for exactly one consumer (the loop)."""

    def __init__(self):
        self._handle_cell: tuple[int, float] | None = None
        self._control: deque[CommandMessage] = deque()
        self._lock = threading.Lock()
        self.rejected = 0

    def push(self, cmd: CommandMessage) -> bool:
        """Deliver a command; False if a control command was rejected (full)."""
        if isinstance(cmd, SetHandle):
            # Plain replacement: the newest handle target wins.
            self._handle_cell = (cmd.seq, cmd.pos)
            return True
        with self._lock:
            if len(self._control) >= CONTROL_QUEUE_CAPACITY:
                self.rejected += 1
                return False
            self._control.append(cmd)
            return True

    def take_handle(self) -> float | None:
        cell = self._handle_cell
        if cell is None:
            return None
        self._handle_cell = None
        return cell[1]

    def take_control(self) -> list[CommandMessage]:
        with self._lock:
            cmds = list(self._control)
            self._control.clear()
        return cmds


class RealtimeLoop:
    """Steps one kernel instance at 1/dt Hz and publishes downsampled state.

    The loop is the only writer of kernel state. ``snapshot_sink`` is
    called from the loop thread and must return quickly: True if the frame
    was queued, False if it was dropped. ``notice_sink`` receives
    (kind, message) for config errors.
    """

    def __init__(
        self,
        cfg: KernelConfig,
        mailbox: CommandMailbox,
        snapshot_sink,
        snapshot_hz: float = 60.0,
        initial_handle_pos: float = 2e-8,
        notice_sink=None,
        paced: bool = True,
        clock=time.perf_counter,
        batch_interval: float | None = None,
        miss_tolerance: float | None = None,
    ):
        self.cfg = cfg
        self.mailbox = mailbox
        self.snapshot_sink = snapshot_sink
        self.notice_sink = notice_sink
        self.paced = paced
        self.clock = clock
        self.metrics = LoopMetrics()
        self.snapshot_every = max(1, round(1.0 / (cfg.dt * snapshot_hz)))
        self.batch_interval = batch_interval if batch_interval is not None else max(cfg.dt, 0.004)
        self.miss_tolerance = (
            miss_tolerance if miss_tolerance is not None else 2.0 * self.batch_interval
        )
        # After a pause longer than this, resync instead of fast-forwarding;
        # always beyond the miss tolerance so resyncs never mask misses.
        self.max_backlog_s = max(0.5, 2.0 * self.miss_tolerance)
        self._params = pack_params(cfg)
        h0 = initial_handle_pos / cfg.scene.length_unit
        self._state = np.array([h0, 0.0, h0, 0.0, 0.0, 0.0], dtype=np.float64)
        self._target = h0
        self._stop = threading.Event()
        # Set once the jitted paths are warm and the schedule is live.
        self.ready = threading.Event()
        # Ring of recent per-snapshot tip motions; order is irrelevant for
        # the median, so the ring is never rotated.
        self._motion_ring = np.zeros(_DETECTOR_WINDOW, dtype=np.float64)
        self._motion_count = 0
        self._prev_gap: float | None = None
        self._pending_events: list[WireEvent] = []
        self.latest_snapshot: WireSnapshot | None = None

    def stop(self) -> None:
        self._stop.set()

    # -- command application ------------------------------------------------

    def _apply_control(self, cmd: CommandMessage) -> None:
        try:
            if isinstance(cmd, SetBlend):
                self.cfg = self.cfg.with_blend(cmd.value)
            elif isinstance(cmd, SetParams):
                self.cfg = self._merged_config(cmd.params)
            elif isinstance(cmd, Reset):
                self._state[0] = self._state[2]
                self._state[1] = 0.0
                self._state[4] = 0.0
                self._state[5] = 0.0
                self._motion_count = 0
                self._prev_gap = None
                return
            else:
                return
            self._params = pack_params(self.cfg)
        except (ConfigError, ValueError) as exc:
            self.metrics.config_errors += 1
            if self.notice_sink is not None:
                self.notice_sink("error", f"rejected parameter change: {exc}")

    def _merged_config(self, params: dict) -> KernelConfig:
        """New validated config from a partial update; raises on bad values."""
        cfg = self.cfg
        stick_doc = params.get("stick", {})
        if stick_doc:
            cfg = replace(
                cfg,
                stick=StickParams(
                    mass=float(stick_doc.get("mass_kg", cfg.stick.mass)),
                    stiffness=float(stick_doc.get("stiffness_N_per_m", cfg.stick.stiffness)),
                    damping=float(stick_doc.get("damping_Ns_per_m", cfg.stick.damping)),
                ),
            )
        scene_doc = params.get("scene", {})
        if "blend" in scene_doc:
            cfg = cfg.with_blend(float(scene_doc["blend"]))
        return cfg

    # -- stepping -------------------------------------------------------------

    def _tick(self) -> None:
        handle = self.mailbox.take_handle()
        if handle is not None:
            self.metrics.commands_seen += 1
            self._target = handle / self.cfg.scene.length_unit
        for cmd in self.mailbox.take_control():
            self.metrics.commands_seen += 1
            self._apply_control(cmd)
        if _kernels.step(self._state, self._params, self._target) != 0:
            # Non-finite input cannot originate here (commands are checked
            # at parse time), but never let the loop die silently.
            self._state[1] = 0.0
            self._state[0] = self._target
        self.metrics.ticks += 1
        if self.metrics.ticks % self.snapshot_every == 0:
            self._publish()

    def _publish(self) -> None:
        s = self._state
        lu, fu = self.cfg.scene.length_unit, self.cfg.scene.force_unit
        self._detect_online(s[0] * lu, s[2] * lu)
        snap = WireSnapshot(
            time=float(s[3]),
            handle_pos=float(s[2] * lu),
            tip_pos=float(s[0] * lu),
            handle_force=float(s[4] * fu),
            surface_force=float(s[5] * fu),
            blend=float(self.cfg.scene.blend),
            events_since_last=tuple(self._pending_events),
        )
        self._pending_events.clear()
        self.latest_snapshot = snap
        self.metrics.snapshots_published += 1
        if not self.snapshot_sink(snap):
            self.metrics.snapshot_drops += 1

    def _detect_online(self, gap: float, handle: float) -> None:
        prev = self._prev_gap
        self._prev_gap = gap
        if prev is None:
            return
        motion = abs(gap - prev)
        if self._motion_count >= _DETECTOR_WINDOW:
            # Floor the baseline at a small fraction of the repulsion length
            # so a perfectly still probe cannot zero the threshold out.
            noise_floor = 1e-4 * self.cfg.scene.nano.repulsion_length
            baseline = max(float(np.median(self._motion_ring)), noise_floor)
            threshold = _DETECTOR_FACTOR * baseline
            if motion > threshold > 0.0:
                kind = "snap_in" if gap < prev else "snap_off"
                self._pending_events.append(
                    WireEvent(
                        kind=kind,
                        handle_pos=handle,
                        tip_gap_before=prev,
                        tip_gap_after=gap,
                    )
                )
        self._motion_ring[self._motion_count % _DETECTOR_WINDOW] = motion
        self._motion_count += 1

    # -- run ------------------------------------------------------------------

    def run(self, max_ticks: int | None = None) -> None:
        """Block stepping until stop() (or max_ticks, for tests)."""
        period = self.cfg.dt
        clock = self.clock
        # Pull the jitted step and the median through their first-call cost
        # before the schedule starts counting.
        scratch = self._state.copy()
        _kernels.step(scratch, self._params, float(scratch[2]))
        np.median(self._motion_ring)
        self.ready.set()

        if not self.paced:
            n = 0
            while not self._stop.is_set():
                if max_ticks is not None and n >= max_ticks:
                    return
                self._tick()
                n += 1
            return

        miss_tol = self.miss_tolerance
        max_backlog = max(1, int(self.max_backlog_s / period))
        start = clock()
        n = 0
        while not self._stop.is_set():
            now = clock()
            due = int((now - start) / period) + 1
            if due - n > max_backlog:
                skipped = due - n - max_backlog
                self.metrics.missed_deadlines += skipped
                n = due - max_backlog
            while n < due and not self._stop.is_set():
                if max_ticks is not None and n >= max_ticks:
                    return
                self._tick()
                if clock() - (start + n * period) > miss_tol:
                    self.metrics.missed_deadlines += 1
                n += 1
            if max_ticks is not None and n >= max_ticks:
                return
            wait = (start + n * period) - clock()
            if wait > 0:
                time.sleep(max(wait, self.batch_interval))

"""Session host: WebSocket streaming plus a couple of plain HTTP routes.

One realtime thread owns the kernel (see :mod:`.realtime`); asyncio owns
all client I/O. A slow or stalled client can only fill its own outbound
queue and start dropping frames, it can never stall the stepping thread.

Routes:
    /ws       WebSocket: CommandMessage in, WireSnapshot + notices out
    /metrics  GET: telemetry aggregate + loop counters, JSON
    /healthz  GET: liveness + build info, JSON
    /...      optional static files when a directory is configured
"""

from __future__ import annotations

import asyncio
import gc
import json
import logging
import mimetypes
import os
import sys
import threading
import time
from collections import deque
from websockets.asyncio.server import serve as ws_serve
from websockets.exceptions import ConnectionClosed
from websockets.http11 import Response
from websockets.datastructures import Headers

from . import __version__, experiments
from .config import AppConfig
from .protocol import (
    ProtocolError,
    SetBlend,
    SetHandle,
    StartSweep,
    encode_notice,
    encode_snapshot,
    parse_command,
)
from .realtime import CommandMailbox, RealtimeLoop
from .telemetry import SessionTelemetry, TelemetryStore, telemetry_report

__all__ = ["SessionServer"]

log = logging.getLogger("nanotouch.server")

# Both buffers absorb scheduler hiccups without ever blocking the stepping
# thread; when a consumer lags past them, frames drop and the drop counts.
_OUTBOX_CAPACITY = 64
_CLIENT_QUEUE_CAPACITY = 16


def _json_response(status: int, payload: dict) -> Response:
    body = json.dumps(payload, indent=1).encode()
    return Response(
        status, "OK" if status == 200 else "Error",
        Headers([("Content-Type", "application/json"), ("Content-Length", str(len(body)))]),
        body,
    )


class _Client:
    def __init__(self, ws, session: SessionTelemetry):
        self.ws = ws
        self.session = session
        self.queue: asyncio.Queue[str] = asyncio.Queue(maxsize=_CLIENT_QUEUE_CAPACITY)
        self.last_seq: int | None = None
        self.drops = 0
        self.bad_seq = 0
        self.recorded = False


class SessionServer:
    """Wires the realtime loop, telemetry, and the network together."""

    def __init__(self, app_cfg: AppConfig, static_dir: str | None = None,
                 telemetry_store: TelemetryStore | None = None):
        self.app_cfg = app_cfg
        self.static_dir = os.path.abspath(static_dir) if static_dir else None
        self.store = telemetry_store if telemetry_store is not None else TelemetryStore(
            app_cfg.service.telemetry_dir
        )
        self.mailbox = CommandMailbox()
        self._outbox: deque = deque(maxlen=_OUTBOX_CAPACITY)
        self._notices: deque = deque(maxlen=64)
        self.loop = RealtimeLoop(
            app_cfg.kernel,
            self.mailbox,
            snapshot_sink=self._sink,
            snapshot_hz=app_cfg.service.snapshot_hz,
            initial_handle_pos=app_cfg.service.initial_handle_pos,
            notice_sink=self._notice,
            miss_tolerance=app_cfg.service.miss_tolerance_s,
        )
        self._clients: set[_Client] = set()
        self._loop_thread: threading.Thread | None = None
        self._stopping = asyncio.Event()

    # Called from the realtime thread: must stay allocation-light and never block.
    def _sink(self, snap) -> bool:
        dropped = len(self._outbox) == _OUTBOX_CAPACITY
        self._outbox.append(snap)
        return not dropped

    def _notice(self, kind: str, message: str) -> None:
        self._notices.append(encode_notice(kind, message=message))

    # -- HTTP ---------------------------------------------------------------

    def _metrics_payload(self) -> dict:
        m = self.loop.metrics
        return {
            "telemetry": telemetry_report(self.store),
            "loop": {
                "ticks": m.ticks,
                "missed_deadlines": m.missed_deadlines,
                "snapshots_published": m.snapshots_published,
                "snapshot_drops": m.snapshot_drops + sum(c.drops for c in self._clients),
                "commands_seen": m.commands_seen,
                "config_errors": m.config_errors,
            },
            "open_sessions": len(self._clients),
        }

    def _static_response(self, path: str) -> Response | None:
        if self.static_dir is None:
            return None
        rel = path.lstrip("/") or "index.html"
        full = os.path.abspath(os.path.join(self.static_dir, rel))
        if not full.startswith(self.static_dir + os.sep) and full != self.static_dir:
            return None
        if os.path.isdir(full):
            full = os.path.join(full, "index.html")
        if not os.path.isfile(full):
            return None
        ctype = mimetypes.guess_type(full)[0] or "application/octet-stream"
        with open(full, "rb") as fh:
            body = fh.read()
        return Response(
            200, "OK",
            Headers([("Content-Type", ctype), ("Content-Length", str(len(body)))]),
            body,
        )

    def _process_request(self, connection, request):
        path = request.path.split("?", 1)[0]
        if path == "/ws":
            return None  # proceed with the WebSocket handshake
        if path == "/healthz":
            return _json_response(
                200,
                {
                    "status": "ok",
                    "version": __version__,
                    "python": sys.version.split()[0],
                    "dt_s": self.app_cfg.kernel.dt,
                    "snapshot_hz": self.app_cfg.service.snapshot_hz,
                },
            )
        if path == "/metrics":
            return _json_response(200, self._metrics_payload())
        static = self._static_response(path)
        if static is not None:
            return static
        return _json_response(404, {"error": f"no route for {path}"})

    # -- WebSocket ----------------------------------------------------------

    async def _handler(self, ws) -> None:
        session = SessionTelemetry(started_at=time.monotonic())
        client = _Client(ws, session)
        self._clients.add(client)
        sender = asyncio.create_task(self._send_to(client))
        try:
            async for message in ws:
                now = time.monotonic()
                try:
                    cmd = parse_command(message)
                except ProtocolError as exc:
                    await ws.send(encode_notice("error", message=str(exc)))
                    continue
                if client.last_seq is not None and cmd.seq <= client.last_seq:
                    client.bad_seq += 1
                    continue
                client.last_seq = cmd.seq
                if isinstance(cmd, SetHandle):
                    session.on_handle_input(cmd.pos, now)
                elif isinstance(cmd, SetBlend):
                    session.on_scene_switch()
                if isinstance(cmd, StartSweep):
                    threading.Thread(
                        target=self._run_sweep_job, args=(cmd.args,), daemon=True
                    ).start()
                    continue
                if not self.mailbox.push(cmd):
                    await ws.send(encode_notice("error", message="control queue full"))
        except ConnectionClosed:
            pass
        finally:
            sender.cancel()
            self._clients.discard(client)
            self._finalize_session(client)

    def _finalize_session(self, client: _Client) -> None:
        """Record the closed session exactly once (close or shutdown path)."""
        if client.recorded:
            return
        client.recorded = True
        self.store.record(client.session.close(time.monotonic()))

    async def _send_to(self, client: _Client) -> None:
        while True:
            text = await client.queue.get()
            try:
                await client.ws.send(text)
            except ConnectionClosed:
                return

    async def _broadcaster(self) -> None:
        """Forward snapshots and notices to every client, dropping when full."""
        poll = min(0.004, self.app_cfg.kernel.dt * self.loop.snapshot_every / 2.0)
        while not self._stopping.is_set():
            while self._outbox:
                snap = self._outbox.popleft()
                text = encode_snapshot(snap)
                for client in list(self._clients):
                    try:
                        client.queue.put_nowait(text)
                    except asyncio.QueueFull:
                        client.drops += 1
            while self._notices:
                text = self._notices.popleft()
                for client in list(self._clients):
                    try:
                        client.queue.put_nowait(text)
                    except asyncio.QueueFull:
                        client.drops += 1
            await asyncio.sleep(poll)

    # -- sweep jobs -----------------------------------------------------------

    def _run_sweep_job(self, args: dict) -> None:
        """Headless sweep on its own kernel instance; never touches the loop."""
        try:
            out = str(args.get("out", "sweep.csv"))
            out = os.path.basename(out) or "sweep.csv"
            cfg = experiments.default_sweep_config(
                stiffness=float(args.get("stiffness_N_per_m", self.loop.cfg.stick.stiffness))
            )
            curve = experiments.quasi_static_sweep(
                cfg,
                z_start=float(args.get("z_start", experiments.DEFAULT_Z_START)),
                z_end=float(args.get("z_end", experiments.DEFAULT_Z_END)),
                speed=float(args.get("speed", experiments.DEFAULT_SPEED)),
            )
            experiments.write_curve_csv(curve, out)
            self._notices.append(
                encode_notice("sweep_done", out=out, events=len(curve.events))
            )
        except Exception as exc:  # job failure must reach the UI, not kill the server
            self._notices.append(encode_notice("error", message=f"sweep failed: {exc}"))

    # -- lifecycle ------------------------------------------------------------

    def start_loop_thread(self) -> None:
        self._loop_thread = threading.Thread(
            target=self.loop.run, name="nanotouch-realtime", daemon=True
        )
        self._loop_thread.start()

    def shutdown(self) -> None:
        self.loop.stop()
        if self._loop_thread is not None:
            self._loop_thread.join(timeout=2.0)
        for client in list(self._clients):
            self._finalize_session(client)
        self._clients.clear()

    async def serve_forever(self, stop_event: asyncio.Event | None = None) -> None:
        """Run until the stop event (or forever); installs no signal handlers."""
        # The realtime thread competes with asyncio for the GIL; keep holds
        # short and stop the collector from pausing the world mid-tick.
        sys.setswitchinterval(5e-5)
        gc.collect()
        gc.freeze()
        gc.disable()
        self.start_loop_thread()
        # Do not accept clients until the jitted kernel is warm and the
        # stepping schedule is live; /healthz meaning "ok" depends on it.
        await asyncio.to_thread(self.loop.ready.wait, 30.0)
        broadcaster = asyncio.create_task(self._broadcaster())
        try:
            async with ws_serve(
                self._handler,
                host="0.0.0.0",
                port=self.app_cfg.service.port,
                process_request=self._process_request,
                close_timeout=1.0,
            ):
                log.info(
                    "serving on port %d (dt=%gs, snapshots at %g Hz)",
                    self.app_cfg.service.port,
                    self.app_cfg.kernel.dt,
                    self.app_cfg.service.snapshot_hz,
                )
                if stop_event is None:
                    await asyncio.Future()
                else:
                    await stop_event.wait()
                # Flush telemetry while the event loop is still healthy; a
                # stalled peer must not hold the final records hostage to
                # its close handshake.
                self._stopping.set()
                self.shutdown()
        finally:
            self._stopping.set()
            broadcaster.cancel()
            gc.enable()
            self.shutdown()

"""Session telemetry: who connected, for how long, how long they steered.

Mirrors exhibition-style visit counters: presence is the connection span,
manipulation is the total time with recent handle input (an input keeps
the visitor "manipulating" for ACTIVITY_WINDOW_S afterwards). Closed
sessions append to a newline-delimited JSON file per day; no database, so
the records stay greppable if the kiosk dies mid-run.

All methods take explicit timestamps so tests can drive a synthetic clock;
the server passes wall time.
"""

from __future__ import annotations

import json
import os
import threading
import time
import uuid
from datetime import datetime, timezone

__all__ = ["ACTIVITY_WINDOW_S", "SessionTelemetry", "TelemetryStore", "telemetry_report"]

ACTIVITY_WINDOW_S = 2.0


class SessionTelemetry:
    """Counters for one live session; monotone while the session is open."""

    def __init__(self, started_at: float, session_id: str | None = None,
                 wall_started_at: float | None = None):
        self.session_id = session_id if session_id is not None else uuid.uuid4().hex
        self.started_at = started_at
        self.wall_started_at = time.time() if wall_started_at is None else wall_started_at
        self.scene_switches = 0
        self._last_handle_pos: float | None = None
        self._active_start: float | None = None
        self._active_until: float = -1.0
        self._manipulation_closed = 0.0

    def on_handle_input(self, pos: float, now: float) -> None:
        """Register handle input; only a changed position counts as activity."""
        if self._last_handle_pos is not None and pos == self._last_handle_pos:
            return
        self._last_handle_pos = pos
        if self._active_start is None or now > self._active_until:
            if self._active_start is not None:
                self._manipulation_closed += self._active_until - self._active_start
            self._active_start = now
        self._active_until = now + ACTIVITY_WINDOW_S

    def on_scene_switch(self) -> None:
        self.scene_switches += 1

    def presence_s(self, now: float) -> float:
        return max(0.0, now - self.started_at)

    def manipulation_s(self, now: float) -> float:
        total = self._manipulation_closed
        if self._active_start is not None:
            total += max(0.0, min(now, self._active_until) - self._active_start)
        return min(total, self.presence_s(now))

    def close(self, now: float) -> dict:
        """Freeze the session into its telemetry record."""
        return {
            "session_id": self.session_id,
            "started_at": datetime.fromtimestamp(
                self.wall_started_at, tz=timezone.utc
            ).isoformat(),
            "presence_s": self.presence_s(now),
            "manipulation_s": self.manipulation_s(now),
            "scene_switches": self.scene_switches,
        }


# Presence histogram bin edges (seconds); last bin is open-ended.
_HISTOGRAM_EDGES = (0, 60, 120, 180, 240, 300, 420, 600)


class TelemetryStore:
    """Closed-session records: in memory, optionally mirrored to NDJSON files."""

    def __init__(self, directory: str | None = None):
        self.directory = directory
        self._lock = threading.Lock()
        self._closed: list[dict] = []
        if directory is not None:
            os.makedirs(directory, exist_ok=True)

    def record(self, session: dict) -> None:
        line = json.dumps(session, separators=(",", ":"))
        with self._lock:
            self._closed.append(dict(session))
            if self.directory is not None:
                day = datetime.now(tz=timezone.utc).strftime("%Y-%m-%d")
                path = os.path.join(self.directory, f"sessions-{day}.ndjson")
                with open(path, "a", encoding="utf-8") as fh:
                    fh.write(line + "\n")

    def closed_sessions(self) -> list[dict]:
        with self._lock:
            return [dict(s) for s in self._closed]

    @classmethod
    def from_files(cls, directory: str) -> "TelemetryStore":
        """Rehydrate a store from its NDJSON files (analysis/reporting)."""
        store = cls(directory=None)
        if os.path.isdir(directory):
            for name in sorted(os.listdir(directory)):
                if not name.endswith(".ndjson"):
                    continue
                with open(os.path.join(directory, name), "r", encoding="utf-8") as fh:
                    for line in fh:
                        line = line.strip()
                        if line:
                            store._closed.append(json.loads(line))
        return store


def _presence_histogram(values: list[float]) -> dict[str, int]:
    edges = _HISTOGRAM_EDGES
    bins = {f"{edges[i]}-{edges[i + 1]}s": 0 for i in range(len(edges) - 1)}
    bins[f">={edges[-1]}s"] = 0
    for v in values:
        for i in range(len(edges) - 1):
            if edges[i] <= v < edges[i + 1]:
                bins[f"{edges[i]}-{edges[i + 1]}s"] += 1
                break
        else:
            bins[f">={edges[-1]}s"] += 1
    return bins


def telemetry_report(store: TelemetryStore) -> dict:
    """Aggregate over closed sessions only; zeros for an empty store."""
    sessions = store.closed_sessions()
    n = len(sessions)
    presence = [float(s.get("presence_s", 0.0)) for s in sessions]
    manipulation = [float(s.get("manipulation_s", 0.0)) for s in sessions]
    return {
        "session_count": n,
        "mean_presence_s": sum(presence) / n if n else 0.0,
        "mean_manipulation_s": sum(manipulation) / n if n else 0.0,
        "presence_histogram": _presence_histogram(presence),
    }

"""Wire protocol between the session host and its UI clients.

JSON text frames, versioned with a ``v`` field. Unknown fields are ignored
on parse so older servers tolerate newer clients; unknown commands are a
:class:`ProtocolError`. Commands carry a per-client sequence number that
must be strictly increasing; the server drops violations.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

__all__ = [
    "ProtocolError",
    "SetHandle",
    "SetBlend",
    "SetParams",
    "Reset",
    "StartSweep",
    "CommandMessage",
    "WireSnapshot",
    "WireEvent",
    "parse_command",
    "encode_command",
    "encode_snapshot",
    "parse_snapshot",
    "encode_notice",
    "PROTOCOL_VERSION",
]

PROTOCOL_VERSION = 1


class ProtocolError(ValueError):
    """Malformed or unknown wire frame."""


@dataclass(frozen=True, slots=True)
class SetHandle:
    seq: int
    pos: float


@dataclass(frozen=True, slots=True)
class SetBlend:
    seq: int
    value: float


@dataclass(frozen=True, slots=True)
class SetParams:
    seq: int
    params: dict


@dataclass(frozen=True, slots=True)
class Reset:
    seq: int


@dataclass(frozen=True, slots=True)
class StartSweep:
    seq: int
    args: dict


CommandMessage = SetHandle | SetBlend | SetParams | Reset | StartSweep


@dataclass(frozen=True, slots=True)
class WireEvent:
    kind: str
    handle_pos: float
    tip_gap_before: float
    tip_gap_after: float

    def to_dict(self) -> dict:
        return {
            "kind": self.kind,
            "handle_pos": self.handle_pos,
            "tip_gap_before": self.tip_gap_before,
            "tip_gap_after": self.tip_gap_after,
        }


@dataclass(frozen=True, slots=True)
class WireSnapshot:
    """One frame of the perception stream (<= snapshot_hz per second)."""

    time: float
    handle_pos: float
    tip_pos: float
    handle_force: float
    surface_force: float
    blend: float
    events_since_last: tuple[WireEvent, ...] = ()

    def __post_init__(self) -> None:
        for name in ("time", "handle_pos", "tip_pos", "handle_force", "surface_force", "blend"):
            if not math.isfinite(getattr(self, name)):
                raise ProtocolError(f"snapshot field {name} is not finite")


def _require_number(doc: dict, key: str) -> float:
    v = doc.get(key)
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise ProtocolError(f"field {key!r} must be a number, got {v!r}")
    if not math.isfinite(float(v)):
        raise ProtocolError(f"field {key!r} must be finite, got {v!r}")
    return float(v)


def _require_seq(doc: dict) -> int:
    v = doc.get("seq")
    if isinstance(v, bool) or not isinstance(v, int):
        raise ProtocolError(f"field 'seq' must be an integer, got {v!r}")
    return v


def parse_command(text: str | bytes) -> CommandMessage:
    """Decode one client frame into a command."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ProtocolError(f"not valid JSON: {exc}") from exc
    if not isinstance(doc, dict):
        raise ProtocolError("command frame must be a JSON object")
    cmd = doc.get("cmd")
    seq = _require_seq(doc)
    if cmd == "set_handle":
        return SetHandle(seq=seq, pos=_require_number(doc, "pos"))
    if cmd == "set_blend":
        value = _require_number(doc, "value")
        if not 0.0 <= value <= 1.0:
            raise ProtocolError(f"blend must be in [0, 1], got {value}")
        return SetBlend(seq=seq, value=value)
    if cmd == "set_params":
        params = doc.get("params")
        if not isinstance(params, dict):
            raise ProtocolError("set_params needs an object field 'params'")
        return SetParams(seq=seq, params=params)
    if cmd == "reset":
        return Reset(seq=seq)
    if cmd == "start_sweep":
        args = doc.get("args")
        if not isinstance(args, dict):
            raise ProtocolError("start_sweep needs an object field 'args'")
        return StartSweep(seq=seq, args=args)
    raise ProtocolError(f"unknown command {cmd!r}")


def encode_command(cmd: CommandMessage) -> str:
    doc: dict = {"v": PROTOCOL_VERSION, "seq": cmd.seq}
    if isinstance(cmd, SetHandle):
        doc["cmd"] = "set_handle"
        doc["pos"] = cmd.pos
    elif isinstance(cmd, SetBlend):
        doc["cmd"] = "set_blend"
        doc["value"] = cmd.value
    elif isinstance(cmd, SetParams):
        doc["cmd"] = "set_params"
        doc["params"] = cmd.params
    elif isinstance(cmd, Reset):
        doc["cmd"] = "reset"
    elif isinstance(cmd, StartSweep):
        doc["cmd"] = "start_sweep"
        doc["args"] = cmd.args
    else:
        raise ProtocolError(f"cannot encode {cmd!r}")
    return json.dumps(doc, separators=(",", ":"))


def encode_snapshot(snap: WireSnapshot) -> str:
    return json.dumps(
        {
            "v": PROTOCOL_VERSION,
            "type": "snapshot",
            "time": snap.time,
            "handle_pos": snap.handle_pos,
            "tip_pos": snap.tip_pos,
            "handle_force": snap.handle_force,
            "surface_force": snap.surface_force,
            "blend": snap.blend,
            "events_since_last": [ev.to_dict() for ev in snap.events_since_last],
        },
        separators=(",", ":"),
    )


def parse_snapshot(text: str | bytes) -> WireSnapshot:
    """Decode a snapshot frame (the client half; also used by tests)."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ProtocolError(f"not valid JSON: {exc}") from exc
    if not isinstance(doc, dict) or doc.get("type") != "snapshot":
        raise ProtocolError("not a snapshot frame")
    events = []
    for ev in doc.get("events_since_last", []):
        if not isinstance(ev, dict):
            raise ProtocolError("event entries must be objects")
        events.append(
            WireEvent(
                kind=str(ev.get("kind")),
                handle_pos=_require_number(ev, "handle_pos"),
                tip_gap_before=_require_number(ev, "tip_gap_before"),
                tip_gap_after=_require_number(ev, "tip_gap_after"),
            )
        )
    return WireSnapshot(
        time=_require_number(doc, "time"),
        handle_pos=_require_number(doc, "handle_pos"),
        tip_pos=_require_number(doc, "tip_pos"),
        handle_force=_require_number(doc, "handle_force"),
        surface_force=_require_number(doc, "surface_force"),
        blend=_require_number(doc, "blend"),
        events_since_last=tuple(events),
    )


def encode_notice(kind: str, **fields) -> str:
    """Out-of-band server frame: errors, sweep completion, shutdown."""
    doc = {"v": PROTOCOL_VERSION, "type": kind}
    doc.update(fields)
    return json.dumps(doc, separators=(",", ":"))

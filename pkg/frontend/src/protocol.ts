/**
 * Wire types shared with the session host: JSON text frames, versioned
 * with a `v` field. Unknown fields are ignored on parse so the console
 * keeps working against newer servers.
 */

export const PROTOCOL_VERSION = 1;

export interface WireEvent {
  kind: "snap_in" | "snap_off";
  handle_pos: number;
  tip_gap_before: number;
  tip_gap_after: number;
}

export interface WireSnapshot {
  time: number;
  handlePos: number;
  tipPos: number;
  handleForce: number;
  surfaceForce: number;
  blend: number;
  events: WireEvent[];
}

export interface ServerNotice {
  type: string;
  message?: string;
  out?: string;
}

export type ServerFrame =
  | { type: "snapshot"; snapshot: WireSnapshot }
  | { type: "notice"; notice: ServerNotice };

function num(doc: Record<string, unknown>, key: string): number {
  const v = doc[key];
  if (typeof v !== "number" || !Number.isFinite(v)) {
    throw new Error(`frame field ${key} is not a finite number`);
  }
  return v;
}

/** Decode one server frame; throws on malformed input. */
export function parseServerFrame(text: string): ServerFrame {
  const doc = JSON.parse(text) as Record<string, unknown>;
  if (typeof doc !== "object" || doc === null) {
    throw new Error("frame is not an object");
  }
  if (doc.type === "snapshot") {
    const rawEvents = Array.isArray(doc.events_since_last) ? doc.events_since_last : [];
    const events: WireEvent[] = rawEvents.map((e) => {
      const ev = e as Record<string, unknown>;
      return {
        kind: ev.kind === "snap_off" ? "snap_off" : "snap_in",
        handle_pos: num(ev, "handle_pos"),
        tip_gap_before: num(ev, "tip_gap_before"),
        tip_gap_after: num(ev, "tip_gap_after"),
      };
    });
    return {
      type: "snapshot",
      snapshot: {
        time: num(doc, "time"),
        handlePos: num(doc, "handle_pos"),
        tipPos: num(doc, "tip_pos"),
        handleForce: num(doc, "handle_force"),
        surfaceForce: num(doc, "surface_force"),
        blend: num(doc, "blend"),
        events,
      },
    };
  }
  return {
    type: "notice",
    notice: {
      type: String(doc.type ?? "unknown"),
      message: typeof doc.message === "string" ? doc.message : undefined,
      out: typeof doc.out === "string" ? doc.out : undefined,
    },
  };
}

export function encodeSetHandle(seq: number, pos: number): string {
  return JSON.stringify({ v: PROTOCOL_VERSION, seq, cmd: "set_handle", pos });
}

export function encodeSetBlend(seq: number, value: number): string {
  return JSON.stringify({ v: PROTOCOL_VERSION, seq, cmd: "set_blend", value });
}

export function encodeReset(seq: number): string {
  return JSON.stringify({ v: PROTOCOL_VERSION, seq, cmd: "reset" });
}

/**
 * Wire protocol shared with the teleoperation service: one JSON object per
 * line over a byte stream, at most 4 KiB per line.  This module defines the
 * message types, strict runtime parsing of inbound server lines, and the
 * builders for outbound client messages.  The committed schema fixture
 * (tests/fixtures/teleop_messages.schema.json in the repository root) is the
 * authority; the test suite validates both directions against it.
 */

export const N_JOINTS = 5;
export const MAX_LINE_BYTES = 4096;

export type Stage =
  | "pre_pick"
  | "grasped"
  | "moving"
  | "placed"
  | "dropped"
  | "crushed";

export const STAGES: readonly Stage[] = [
  "pre_pick",
  "grasped",
  "moving",
  "placed",
  "dropped",
  "crushed",
];

export interface LeadMessage {
  type: "lead";
  q: number[];
}

export interface StartMessage {
  type: "start";
  object: string;
}

export interface StopMessage {
  type: "stop";
}

export interface SaveMessage {
  type: "save";
}

export type ClientMessage = LeadMessage | StartMessage | StopMessage | SaveMessage;

export interface ArmTelemetry {
  th: number[];
  om: number[];
  tau: number[];
}

export interface HelloMessage {
  type: "hello";
  theta_min: number[];
  theta_max: number[];
  objects: string[];
  control_hz: number;
  telemetry_hz: number;
}

export interface StateMessage {
  type: "state";
  t: number;
  leader: ArmTelemetry;
  follower: ArmTelemetry;
  grip_force: number;
  stage: Stage;
}

export interface EpisodeSavedMessage {
  type: "episode_saved";
  path: string;
}

export interface ErrorMessage {
  type: "error";
  msg: string;
}

export type ServerMessage =
  | HelloMessage
  | StateMessage
  | EpisodeSavedMessage
  | ErrorMessage;

export function leadMessage(q: readonly number[]): LeadMessage {
  return { type: "lead", q: [...q] };
}

export function startMessage(object: string): StartMessage {
  return { type: "start", object };
}

export function stopMessage(): StopMessage {
  return { type: "stop" };
}

export function saveMessage(): SaveMessage {
  return { type: "save" };
}

/** Serialize an outbound message as one protocol line. */
export function encode(msg: ClientMessage): string {
  return JSON.stringify(msg) + "\n";
}

function isJointVector(v: unknown): v is number[] {
  return (
    Array.isArray(v) &&
    v.length === N_JOINTS &&
    v.every((x) => typeof x === "number" && Number.isFinite(x))
  );
}

function isArmTelemetry(v: unknown): v is ArmTelemetry {
  if (typeof v !== "object" || v === null) return false;
  const o = v as Record<string, unknown>;
  return isJointVector(o.th) && isJointVector(o.om) && isJointVector(o.tau);
}

function isStage(v: unknown): v is Stage {
  return typeof v === "string" && (STAGES as readonly string[]).includes(v);
}

/**
 * Parse one inbound line.  Returns null for anything that is not a valid
 * server message; the caller counts those instead of crashing the panel.
 */
export function parseServerMessage(line: string): ServerMessage | null {
  let raw: unknown;
  try {
    raw = JSON.parse(line);
  } catch {
    return null;
  }
  if (typeof raw !== "object" || raw === null || Array.isArray(raw)) return null;
  const o = raw as Record<string, unknown>;
  switch (o.type) {
    case "hello":
      if (
        isJointVector(o.theta_min) &&
        isJointVector(o.theta_max) &&
        Array.isArray(o.objects) &&
        o.objects.length > 0 &&
        o.objects.every((s) => typeof s === "string") &&
        Number.isInteger(o.control_hz) &&
        Number.isInteger(o.telemetry_hz)
      ) {
        return o as unknown as HelloMessage;
      }
      return null;
    case "state":
      if (
        typeof o.t === "number" &&
        o.t >= 0 &&
        isArmTelemetry(o.leader) &&
        isArmTelemetry(o.follower) &&
        typeof o.grip_force === "number" &&
        isStage(o.stage)
      ) {
        return o as unknown as StateMessage;
      }
      return null;
    case "episode_saved":
      if (typeof o.path === "string" && o.path.length > 0) {
        return o as unknown as EpisodeSavedMessage;
      }
      return null;
    case "error":
      if (typeof o.msg === "string") {
        return o as unknown as ErrorMessage;
      }
      return null;
    default:
      return null;
  }
}

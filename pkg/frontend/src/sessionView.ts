/**
 * Panel state.  The view is a plain data structure advanced by pure
 * functions: socket lines and user input go in, a new view comes out, and
 * the renderer reads whatever the latest view holds.  The panel never
 * computes physics or control; every displayed number originates from a
 * server message or is an echo of user input.
 */

import {
  HelloMessage,
  N_JOINTS,
  parseServerMessage,
  StateMessage,
} from "./protocol.js";

export type Connection = "disconnected" | "connecting" | "connected";

export interface SessionView {
  connection: Connection;
  hello: HelloMessage | null;
  state: StateMessage | null;
  leadTargets: number[];
  recording: boolean;
  savedEpisodes: string[];
  malformedCount: number;
  lastError: string | null;
}

export function initialView(): SessionView {
  return {
    connection: "disconnected",
    hello: null,
    state: null,
    leadTargets: new Array(N_JOINTS).fill(0),
    recording: false,
    savedEpisodes: [],
    malformedCount: 0,
    lastError: null,
  };
}

export function onConnecting(view: SessionView): SessionView {
  return { ...view, connection: "connecting" };
}

export function onDisconnected(view: SessionView): SessionView {
  return { ...view, connection: "disconnected", recording: false };
}

/** Controls stay disabled until the server has advertised its limits. */
export function controlsEnabled(view: SessionView): boolean {
  return view.connection === "connected" && view.hello !== null;
}

function clamp(value: number, lo: number, hi: number): number {
  return Math.min(hi, Math.max(lo, value));
}

/**
 * Set one lead target, clamped to the joint limits from the hello message.
 * Before the hello arrives there are no known limits and no target moves.
 */
export function setLeadTarget(
  view: SessionView,
  joint: number,
  value: number,
): SessionView {
  if (view.hello === null || joint < 0 || joint >= N_JOINTS) return view;
  const targets = [...view.leadTargets];
  targets[joint] = clamp(value, view.hello.theta_min[joint], view.hello.theta_max[joint]);
  return { ...view, leadTargets: targets };
}

/** Keyboard nudge for fine gripper control (the hardest action by hand). */
export function nudgeGripper(view: SessionView, delta: number): SessionView {
  const grip = N_JOINTS - 1;
  return setLeadTarget(view, grip, view.leadTargets[grip] + delta);
}

/**
 * Apply one inbound line.  Malformed lines are counted, never thrown; a
 * hello snaps the lead targets to the current leader pose once state
 * arrives so the panel does not yank the arm on first touch.
 */
export function applyServerLine(view: SessionView, line: string): SessionView {
  const msg = parseServerMessage(line);
  if (msg === null) {
    return { ...view, malformedCount: view.malformedCount + 1 };
  }
  switch (msg.type) {
    case "hello":
      return { ...view, connection: "connected", hello: msg };
    case "state": {
      const next: SessionView = { ...view, state: msg };
      if (view.state === null) {
        // First telemetry frame: adopt the leader's pose as the target.
        next.leadTargets = [...msg.leader.th];
      }
      return next;
    }
    case "episode_saved":
      return {
        ...view,
        recording: false,
        savedEpisodes: [...view.savedEpisodes, msg.path],
      };
    case "error":
      return { ...view, lastError: msg.msg };
  }
}

export function startRecording(view: SessionView): SessionView {
  return { ...view, recording: true, state: null };
}

export function stopRecording(view: SessionView): SessionView {
  return { ...view, recording: false };
}

/** Per-joint leader-vs-follower angle error, or null before telemetry. */
export function trackingError(view: SessionView): number[] | null {
  if (view.state === null) return null;
  return view.state.leader.th.map((v, i) => v - view.state!.follower.th[i]);
}

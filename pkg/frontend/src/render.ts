/**
 * Pure view-to-draw-list projection.  The renderer produces primitive
 * descriptions (lines, circles, bars, text); the canvas layer replays them
 * verbatim.  Tests assert on the draw list, which keeps the visual logic
 * covered without pixel comparisons.
 */

import { aperture, sideView } from "./kinematics.js";
import { SessionView, trackingError } from "./sessionView.js";

export interface Line {
  kind: "line";
  from: [number, number];
  to: [number, number];
  color: string;
  width: number;
}

export interface Circle {
  kind: "circle";
  at: [number, number];
  radius: number;
  color: string;
  fill: boolean;
}

export interface Bar {
  kind: "bar";
  id: string;
  value: number;
  max: number;
  color: string;
}

export interface Label {
  kind: "label";
  id: string;
  text: string;
}

export type DrawOp = Line | Circle | Bar | Label;

export const LEADER_COLOR = "#3a7bd5";
export const FOLLOWER_COLOR = "#d9534f";
export const GRIP_GAUGE_MAX = 20; // N, full-scale deflection

function armOps(thetas: readonly number[], color: string): DrawOp[] {
  const [shoulder, elbow, ee] = sideView(thetas);
  const ops: DrawOp[] = [
    { kind: "line", from: shoulder, to: elbow, color, width: 3 },
    { kind: "line", from: elbow, to: ee, color, width: 3 },
    { kind: "circle", at: shoulder, radius: 0.008, color, fill: true },
    { kind: "circle", at: elbow, radius: 0.006, color, fill: true },
  ];
  // Gripper fingers: two short verticals separated by the aperture.
  const half = aperture(thetas[4]) / 2;
  ops.push(
    { kind: "line", from: [ee[0] - half, ee[1]], to: [ee[0] - half, ee[1] - 0.03], color, width: 2 },
    { kind: "line", from: [ee[0] + half, ee[1]], to: [ee[0] + half, ee[1] - 0.03], color, width: 2 },
  );
  return ops;
}

/**
 * Build the draw list for the current view.  Pre-connection there is
 * nothing to dereference, so the list is a single prompt label.
 */
export function buildDrawList(view: SessionView): DrawOp[] {
  if (view.connection !== "connected" || view.hello === null) {
    return [{ kind: "label", id: "status", text: "not connected" }];
  }
  if (view.state === null) {
    return [
      { kind: "label", id: "status", text: "connected; start a session" },
    ];
  }
  const state = view.state;
  const ops: DrawOp[] = [];
  ops.push({ kind: "label", id: "status", text: "connected" });
  ops.push({ kind: "label", id: "stage", text: state.stage });
  ops.push({ kind: "label", id: "clock", text: `t = ${state.t.toFixed(2)} s` });
  ops.push(...armOps(state.leader.th, LEADER_COLOR));
  ops.push(...armOps(state.follower.th, FOLLOWER_COLOR));
  ops.push({
    kind: "bar",
    id: "grip_force",
    value: Math.abs(state.grip_force),
    max: GRIP_GAUGE_MAX,
    color: "#5cb85c",
  });
  const err = trackingError(view);
  if (err !== null) {
    err.forEach((value, joint) => {
      ops.push({
        kind: "bar",
        id: `track_err_${joint + 1}`,
        value: Math.abs(value),
        max: 0.05,
        color: "#f0ad4e",
      });
    });
  }
  if (view.recording) {
    ops.push({ kind: "label", id: "recording", text: "REC" });
  }
  view.savedEpisodes.forEach((path, i) => {
    ops.push({ kind: "label", id: `saved_${i}`, text: path });
  });
  if (view.lastError !== null) {
    ops.push({ kind: "label", id: "error", text: view.lastError });
  }
  return ops;
}

/**
 * The 2-link kinematic map used for the stick-figure display.  Joint 1 is
 * base yaw, joints 2-3 a planar chain in the vertical plane, joint 5 the
 * gripper.  The constants mirror the simulator defaults; the parity test
 * pins this module to a fixture generated from the simulator, so the two
 * can't drift apart silently.
 */

export const LINK1 = 0.13;
export const LINK2 = 0.13;
export const SHOULDER_HEIGHT = 0.12;
export const OPEN_APERTURE = 0.09;
export const APERTURE_PER_RAD = 0.1;

export type Point2 = [number, number];

/** End-effector position (x, y, z) for five joint angles. */
export function forward(theta: readonly number[]): [number, number, number] {
  const [psi, q2, q3] = theta;
  const r = LINK1 * Math.cos(q2) + LINK2 * Math.cos(q2 + q3);
  const z = SHOULDER_HEIGHT + LINK1 * Math.sin(q2) + LINK2 * Math.sin(q2 + q3);
  return [r * Math.cos(psi), r * Math.sin(psi), z];
}

/**
 * Shoulder, elbow and end-effector points in the vertical working plane
 * (radial distance, height), the geometry the stick figure draws.
 */
export function sideView(theta: readonly number[]): [Point2, Point2, Point2] {
  const q2 = theta[1];
  const q3 = theta[2];
  const elbow: Point2 = [
    LINK1 * Math.cos(q2),
    SHOULDER_HEIGHT + LINK1 * Math.sin(q2),
  ];
  const ee: Point2 = [
    elbow[0] + LINK2 * Math.cos(q2 + q3),
    elbow[1] + LINK2 * Math.sin(q2 + q3),
  ];
  return [[0, SHOULDER_HEIGHT], elbow, ee];
}

/** Finger aperture [m] for a gripper joint angle. */
export function aperture(theta5: number): number {
  return OPEN_APERTURE - APERTURE_PER_RAD * theta5;
}

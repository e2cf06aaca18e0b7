/**
 * Camera-head avatar: turns a broadcast motion plan into an animation
 * timeline the renderer can sample.
 *
 * The client recomputes per-segment travel times from the same default
 * kinematics the camera uses, then scales the whole timeline to the
 * server's authoritative duration_ms, so the drawn gesture and the real
 * head stay in lockstep even if the client's starting pose is off.
 */

import type { GestureInfo, MotionPlan } from "./protocol.js";

export interface Pose {
  pan: number;
  tilt: number;
}

export const NEUTRAL_POSE: Pose = { pan: 0, tilt: 0 };

/** Degrees per second at full speed; matches the engine's defaults. */
export const KINEMATICS = { panDegPerS: 120, tiltDegPerS: 80 };

interface Keyframe {
  /** Time the head arrives at `pose` (ms from gesture start, unscaled). */
  atMs: number;
  pose: Pose;
  /** Dwell after arrival. */
  holdMs: number;
}

export interface AvatarTimeline {
  /** Sum of travel + hold times computed from client-side kinematics. */
  analyticMs: number;
  /** Playback length after scaling to the server's duration_ms. */
  durationMs: number;
  /** Final pose; the next gesture's travel starts here. */
  endPose: Pose;
  /** Number of upward or downward nod excursions (1 = half, 2 = whole). */
  nodCount: number;
  poseAt(tMs: number): Pose;
}

function segmentTravelMs(from: Pose, to: Pose, speed: number): number {
  const panS = Math.abs(to.pan - from.pan) / (KINEMATICS.panDegPerS * speed);
  const tiltS = Math.abs(to.tilt - from.tilt) / (KINEMATICS.tiltDegPerS * speed);
  return Math.max(panS, tiltS) * 1000;
}

export function buildTimeline(
  plan: MotionPlan,
  durationMs: number,
  start: Pose = NEUTRAL_POSE,
): AvatarTimeline {
  const frames: Keyframe[] = [];
  let cursor = start;
  let t = 0;
  let nodCount = 0;
  for (const seg of plan.segments) {
    const target: Pose = { pan: seg.pan, tilt: seg.tilt };
    t += segmentTravelMs(cursor, target, seg.speed);
    frames.push({ atMs: t, pose: target, holdMs: seg.hold_ms });
    t += seg.hold_ms;
    if (target.tilt > cursor.tilt) nodCount += 1; // each upward leg is one nod
    cursor = target;
  }
  const analyticMs = t;
  const scale = analyticMs > 0 ? durationMs / analyticMs : 1;

  function poseAt(tMs: number): Pose {
    const clamped = Math.max(0, Math.min(tMs, durationMs)) / scale;
    let prevPose = start;
    let segStart = 0;
    for (const frame of frames) {
      if (clamped <= frame.atMs) {
        const travel = frame.atMs - segStart;
        const f = travel > 0 ? (clamped - segStart) / travel : 1;
        return {
          pan: prevPose.pan + (frame.pose.pan - prevPose.pan) * f,
          tilt: prevPose.tilt + (frame.pose.tilt - prevPose.tilt) * f,
        };
      }
      if (clamped <= frame.atMs + frame.holdMs) return frame.pose;
      segStart = frame.atMs + frame.holdMs;
      prevPose = frame.pose;
    }
    return cursor;
  }

  return { analyticMs, durationMs, endPose: cursor, nodCount, poseAt };
}

/**
 * Teach-mode caption: the decoded meaning of a gesture. Defaults to OFF
 * in the UI so players have to read the head, not the subtitles.
 */
export function describeGesture(gesture: GestureInfo): string | null {
  const at = gesture.part ? ` — ${gesture.part}` : "";
  switch (gesture.type) {
    case "eye_contact":
      return `your turn${at}`;
    case "nod_up_half":
      return `up a half step${at}`;
    case "nod_up_whole":
      return `up a whole step${at}`;
    case "nod_down_half":
      return `down a half step${at}`;
    case "nod_down_whole":
      return `down a whole step${at}`;
    case "downbeat":
      return "all together — next chord";
    case "end_of_piece":
      return "piece complete";
    default:
      return null; // unknown gesture: caller shows a neutral pose
  }
}

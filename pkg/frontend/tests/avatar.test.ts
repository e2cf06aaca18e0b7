import { describe, expect, it } from "vitest";

import { buildTimeline, describeGesture, KINEMATICS, NEUTRAL_POSE } from "../src/avatar.js";
import type { MotionPlan } from "../src/protocol.js";

// Mirrors the engine's default codebook: nods are ±12° tilt excursions at
// speed 0.9 with a 200 ms dwell on each return, downbeat is 0→+15→−20→0.
function nodUpPlan(reps: number, seatPan: number): MotionPlan {
  const segments = [];
  for (let i = 0; i < reps; i++) {
    segments.push({ pan: seatPan, tilt: 12, speed: 0.9, hold_ms: 0 });
    segments.push({ pan: seatPan, tilt: 0, speed: 0.9, hold_ms: 200 });
  }
  return { gesture_id: "g1", segments };
}

const DOWNBEAT_PLAN: MotionPlan = {
  gesture_id: "g2",
  segments: [
    { pan: 0, tilt: 15, speed: 1.0, hold_ms: 0 },
    { pan: 0, tilt: -20, speed: 1.0, hold_ms: 0 },
    { pan: 0, tilt: 0, speed: 1.0, hold_ms: 0 },
  ],
};

function analyticDuration(plan: MotionPlan, start = NEUTRAL_POSE): number {
  let t = 0;
  let pose = start;
  for (const seg of plan.segments) {
    const panMs = (Math.abs(seg.pan - pose.pan) / (KINEMATICS.panDegPerS * seg.speed)) * 1000;
    const tiltMs = (Math.abs(seg.tilt - pose.tilt) / (KINEMATICS.tiltDegPerS * seg.speed)) * 1000;
    t += Math.max(panMs, tiltMs) + seg.hold_ms;
    pose = { pan: seg.pan, tilt: seg.tilt };
  }
  return t;
}

describe("buildTimeline", () => {
  it("matches the hand-computed downbeat duration", () => {
    // 15/80 + 35/80 + 20/80 seconds = 875 ms at full speed.
    const timeline = buildTimeline(DOWNBEAT_PLAN, 875);
    expect(timeline.analyticMs).toBeCloseTo(875, 6);
    expect(timeline.durationMs).toBe(875);
  });

  it("scales playback to the server's authoritative duration", () => {
    const timeline = buildTimeline(DOWNBEAT_PLAN, 1000);
    expect(timeline.durationMs).toBe(1000);
    // End pose is reached exactly at the scaled end.
    expect(timeline.poseAt(1000)).toEqual({ pan: 0, tilt: 0 });
  });

  it("distinguishes one nod from two", () => {
    const half = buildTimeline(nodUpPlan(1, -30), analyticDuration(nodUpPlan(1, -30)));
    const whole = buildTimeline(nodUpPlan(2, -30), analyticDuration(nodUpPlan(2, -30)));
    expect(half.nodCount).toBe(1);
    expect(whole.nodCount).toBe(2);
  });

  it("pans to the target seat and samples intermediate poses", () => {
    const plan = nodUpPlan(1, -30);
    const start = { pan: 0, tilt: 0 };
    const timeline = buildTimeline(plan, analyticDuration(plan, start), start);
    expect(timeline.endPose.pan).toBe(-30);
    // Midway through the first segment the head is between start and seat.
    const mid = timeline.poseAt(timeline.durationMs * 0.1);
    expect(mid.pan).toBeLessThan(0);
    expect(mid.pan).toBeGreaterThan(-30);
    // Clamps outside the window.
    expect(timeline.poseAt(-50)).toEqual(start);
    expect(timeline.poseAt(timeline.durationMs + 1000)).toEqual(timeline.endPose);
  });

  it("holds the pose during dwell", () => {
    const plan = nodUpPlan(1, 0);
    const timeline = buildTimeline(plan, analyticDuration(plan));
    // The trailing 200 ms of the gesture is the hold at the rest pose.
    const nearEnd = timeline.poseAt(timeline.durationMs - 10);
    expect(nearEnd).toEqual({ pan: 0, tilt: 0 });
  });
});

describe("describeGesture", () => {
  it("captions every codebook gesture", () => {
    expect(describeGesture({ type: "eye_contact", gesture_id: "g", part: "vln" })).toContain(
      "vln",
    );
    expect(describeGesture({ type: "nod_up_half", gesture_id: "g", part: "vla" })).toContain(
      "half",
    );
    expect(describeGesture({ type: "nod_down_whole", gesture_id: "g", part: "vc" })).toContain(
      "whole",
    );
    expect(describeGesture({ type: "downbeat", gesture_id: "g" })).toContain("next chord");
    expect(describeGesture({ type: "end_of_piece", gesture_id: "g" })).toContain("complete");
  });

  it("returns null for unknown gestures so the UI goes neutral", () => {
    expect(describeGesture({ type: "jazz_hands", gesture_id: "g" })).toBeNull();
  });
});

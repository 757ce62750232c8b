import { describe, expect, it } from "vitest";

import {
  MIN_CONTROL_SPACING,
  canvasToImage,
  decimateStroke,
  strokeToTrajectory,
  type StrokeSample,
} from "../src/geometry.js";
import type { Point } from "../src/types.js";

function segmentDistance(p: Point, a: StrokeSample, b: StrokeSample): number {
  const vx = b.x - a.x;
  const vy = b.y - a.y;
  const len2 = vx * vx + vy * vy;
  const t = len2 === 0 ? 0 : Math.max(0, Math.min(1, ((p[0] - a.x) * vx + (p[1] - a.y) * vy) / len2));
  return Math.hypot(p[0] - (a.x + t * vx), p[1] - (a.y + t * vy));
}

// Oracle: distance from a control point to the drawn stroke polyline.
function distToStroke(p: Point, samples: StrokeSample[]): number {
  let best = Infinity;
  for (let i = 1; i < samples.length; i++) {
    best = Math.min(best, segmentDistance(p, samples[i - 1]!, samples[i]!));
  }
  return best;
}

function line(x0: number, y0: number, x1: number, y1: number, count: number): StrokeSample[] {
  const out: StrokeSample[] = [];
  for (let i = 0; i < count; i++) {
    const t = i / (count - 1);
    out.push({ x: x0 + t * (x1 - x0), y: y0 + t * (y1 - y0) });
  }
  return out;
}

describe("decimateStroke", () => {
  it("keeps the endpoints of a straight 100 px drag within 1 px", () => {
    const samples = line(10, 20, 110, 20, 101); // one sample per pixel
    const points = decimateStroke(samples);
    expect(points.length).toBeGreaterThan(2);
    const first = points[0]!;
    const last = points[points.length - 1]!;
    expect(Math.hypot(first[0] - 10, first[1] - 20)).toBeLessThanOrEqual(1);
    expect(Math.hypot(last[0] - 110, last[1] - 20)).toBeLessThanOrEqual(1);
  });

  it("spaces control points by at least the minimum, except the appended tail", () => {
    const samples = line(0, 0, 50, 0, 201); // samples every quarter pixel
    const points = decimateStroke(samples);
    for (let i = 1; i < points.length - 1; i++) {
      const gap = Math.hypot(points[i]![0] - points[i - 1]![0], points[i]![1] - points[i - 1]![1]);
      expect(gap).toBeGreaterThanOrEqual(MIN_CONTROL_SPACING);
    }
  });

  it("keeps every control point on a freehand curve within 1 px of the stroke", () => {
    const samples: StrokeSample[] = [];
    for (let i = 0; i <= 200; i++) {
      samples.push({ x: 5 + i * 0.5, y: 40 + 15 * Math.sin(i / 12) });
    }
    const points = decimateStroke(samples);
    for (const p of points) {
      expect(distToStroke(p, samples)).toBeLessThanOrEqual(1);
    }
    // control points are verbatim samples, so the bound is actually exact
    for (const p of points) {
      expect(samples.some((s) => s.x === p[0] && s.y === p[1])).toBe(true);
    }
  });

  it("returns an empty list for no samples", () => {
    expect(decimateStroke([])).toEqual([]);
  });
});

describe("strokeToTrajectory", () => {
  it("rejects a click without drag", () => {
    expect(strokeToTrajectory([{ x: 30, y: 30 }])).toBeNull();
  });

  it("rejects sub-pixel jitter around a click", () => {
    const jitter = [
      { x: 30, y: 30 },
      { x: 30.2, y: 30.1 },
      { x: 29.9, y: 30.2 },
      { x: 30.1, y: 29.95 },
    ];
    expect(strokeToTrajectory(jitter)).toBeNull();
  });

  it("accepts a short but real drag as two control points", () => {
    const points = strokeToTrajectory(line(10, 10, 12, 10, 5));
    expect(points).not.toBeNull();
    expect(points!.length).toBe(2);
    expect(points![0]).toEqual([10, 10]);
    expect(points![1]).toEqual([12, 10]);
  });

  it("serializes a full drag with exact endpoints", () => {
    const points = strokeToTrajectory(line(3, 7, 83, 47, 160))!;
    expect(points[0]).toEqual([3, 7]);
    expect(points[points.length - 1]).toEqual([83, 47]);
  });
});

describe("canvasToImage", () => {
  it("is the identity at 1:1 zoom", () => {
    const rect = { left: 100, top: 50, width: 64, height: 48 };
    expect(canvasToImage(100 + 17, 50 + 33, rect, 64, 48)).toEqual([17, 33]);
  });

  it("rescales when the canvas is displayed larger than the image", () => {
    const rect = { left: 0, top: 0, width: 128, height: 96 };
    expect(canvasToImage(64, 48, rect, 64, 48)).toEqual([32, 24]);
  });
});

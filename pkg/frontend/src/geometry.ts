/** Stroke decimation and canvas coordinate mapping. */

import type { Point } from "./types.js";

export interface StrokeSample {
  x: number;
  y: number;
}

/** Minimum spacing between kept control points, in image pixels. */
export const MIN_CONTROL_SPACING = 3;

function dist(a: StrokeSample, b: StrokeSample): number {
  return Math.hypot(a.x - b.x, a.y - b.y);
}

/**
 * Thin raw pointer samples to trajectory control points.
 *
 * Keeps the first sample, then every sample at least minSpacing away from
 * the last kept one. The final sample is always appended when it moved at
 * all (more than half a pixel), even if that breaks the spacing rule:
 * endpoint fidelity matters more than an even gap.
 */
export function decimateStroke(
  samples: readonly StrokeSample[],
  minSpacing: number = MIN_CONTROL_SPACING,
): Point[] {
  if (samples.length === 0) {
    return [];
  }
  const first = samples[0]!;
  const kept: StrokeSample[] = [first];
  for (let i = 1; i < samples.length - 1; i++) {
    const sample = samples[i]!;
    if (dist(kept[kept.length - 1]!, sample) >= minSpacing) {
      kept.push(sample);
    }
  }
  if (samples.length > 1) {
    const last = samples[samples.length - 1]!;
    if (dist(kept[kept.length - 1]!, last) > 0.5) {
      kept.push(last);
    }
  }
  return kept.map((s) => [s.x, s.y]);
}

/** Null when the stroke has fewer than two distinct samples (a bare click). */
export function strokeToTrajectory(
  samples: readonly StrokeSample[],
  minSpacing: number = MIN_CONTROL_SPACING,
): Point[] | null {
  const points = decimateStroke(samples, minSpacing);
  return points.length >= 2 ? points : null;
}

export interface CanvasRect {
  left: number;
  top: number;
  width: number;
  height: number;
}

/**
 * Map a pointer position (client coordinates) into engine pixels. At 1:1
 * zoom the rect size equals the image size and the mapping is the identity
 * shifted by the rect origin.
 */
export function canvasToImage(
  clientX: number,
  clientY: number,
  rect: CanvasRect,
  imageWidth: number,
  imageHeight: number,
): Point {
  return [
    ((clientX - rect.left) * imageWidth) / rect.width,
    ((clientY - rect.top) * imageHeight) / rect.height,
  ];
}

/** Wing points of a direction arrowhead ending at `to`. */
export function arrowHead(from: Point, to: Point, size = 6): [Point, Point] {
  const angle = Math.atan2(to[1] - from[1], to[0] - from[0]);
  const spread = Math.PI / 7;
  return [
    [to[0] - size * Math.cos(angle - spread), to[1] - size * Math.sin(angle - spread)],
    [to[0] - size * Math.cos(angle + spread), to[1] - size * Math.sin(angle + spread)],
  ];
}

/** Editable session state and its serializations.
 *
 * Edits live here until the user syncs; the wire document only exists at
 * sync time, assembled from uploaded asset refs. Session export/import is a
 * separate, lossless format that embeds mask pixels directly.
 */

import { MaskGrid } from "./maskgrid.js";
import type { Camera, DensifyParams, Point, ProjectDocument, SchedulePair } from "./types.js";

export type LandmarkGrid = number[][][]; // [frame][point] = [x, y]

export interface SessionState {
  frameCount: number;
  trajectories: Point[][];
  masks: MaskGrid[];
  landmarks: LandmarkGrid | null;
  camera: Camera | null;
  densify: DensifyParams;
  schedule: SchedulePair;
}

export function newSession(): SessionState {
  return {
    frameCount: 8,
    trajectories: [],
    masks: [],
    landmarks: null,
    camera: null,
    densify: { lambda: 0, tol: 1e-8 },
    schedule: { window: 14, stride: 7 },
  };
}

export interface AssetRefs {
  image: string;
  masks: string[];
  landmarks: string | null;
}

/** Assemble the wire document from session layers plus uploaded asset refs. */
export function buildDocument(state: SessionState, refs: AssetRefs): ProjectDocument {
  if (refs.masks.length !== state.masks.length) {
    throw new Error(`got ${refs.masks.length} mask refs for ${state.masks.length} masks`);
  }
  if ((state.landmarks === null) !== (refs.landmarks === null)) {
    throw new Error("landmark layer and landmark asset ref must both be set or both empty");
  }
  return {
    version: 1,
    image: refs.image,
    L: state.frameCount,
    trajectories: state.trajectories.map((t) => t.map((p) => [p[0], p[1]] as Point)),
    masks: [...refs.masks],
    landmarks: refs.landmarks,
    camera: state.camera === null ? null : { ...state.camera },
    densify: { ...state.densify },
    schedule: { ...state.schedule },
  };
}

/** Pure landmark drag: returns a new grid with point k of one frame moved. */
export function moveLandmark(
  landmarks: LandmarkGrid,
  frame: number,
  k: number,
  pos: Point,
): LandmarkGrid {
  if (frame < 0 || frame >= landmarks.length) {
    throw new Error(`frame ${frame} out of range`);
  }
  if (k < 0 || k >= (landmarks[frame]?.length ?? 0)) {
    throw new Error(`landmark ${k} out of range`);
  }
  return landmarks.map((pts, f) =>
    f === frame ? pts.map((p, i) => (i === k ? [pos[0], pos[1]] : [...p])) : pts.map((p) => [...p]),
  );
}

/** Index of the landmark within reach of pos, or -1. */
export function hitLandmark(points: readonly number[][], pos: Point, reach = 8): number {
  let best = -1;
  let bestDist = reach;
  points.forEach((p, i) => {
    const d = Math.hypot(p[0]! - pos[0], p[1]! - pos[1]);
    if (d <= bestDist) {
      best = i;
      bestDist = d;
    }
  });
  return best;
}

interface SessionFile {
  version: 1;
  frameCount: number;
  trajectories: Point[][];
  masks: { rows: string[] }[];
  landmarks: LandmarkGrid | null;
  camera: Camera | null;
  densify: DensifyParams;
  schedule: SchedulePair;
}

export function exportSession(state: SessionState): string {
  const file: SessionFile = {
    version: 1,
    frameCount: state.frameCount,
    trajectories: state.trajectories,
    masks: state.masks.map((m) => ({ rows: m.rows() })),
    landmarks: state.landmarks,
    camera: state.camera,
    densify: state.densify,
    schedule: state.schedule,
  };
  return JSON.stringify(file, null, 2);
}

export function importSession(text: string): SessionState {
  let file: unknown;
  try {
    file = JSON.parse(text);
  } catch (err) {
    throw new Error(`session file is not JSON: ${(err as Error).message}`);
  }
  const doc = file as Partial<SessionFile>;
  if (doc.version !== 1) {
    throw new Error(`unsupported session version ${String(doc.version)}`);
  }
  if (typeof doc.frameCount !== "number" || !Array.isArray(doc.trajectories) || !Array.isArray(doc.masks)) {
    throw new Error("session file is missing required layers");
  }
  return {
    frameCount: doc.frameCount,
    trajectories: doc.trajectories,
    masks: doc.masks.map((m) => MaskGrid.fromRows(m.rows)),
    landmarks: doc.landmarks ?? null,
    camera: doc.camera ?? null,
    densify: doc.densify ?? { lambda: 0, tol: 1e-8 },
    schedule: doc.schedule ?? { window: 14, stride: 7 },
  };
}

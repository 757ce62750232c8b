/** Wire types shared with the preview service.
 *
 * Coordinates are engine pixels everywhere: x = column, y = row, origin
 * top-left, y pointing down. The canvas renders the image 1:1 at zoom 1,
 * so a point drawn at canvas pixel (x, y) serializes as engine (x, y).
 */

export type Point = [number, number];

export interface CameraPan {
  kind: "pan";
  dx: number;
  dy: number;
}

export interface CameraZoom {
  kind: "zoom";
  scale: number;
  center?: Point;
}

export interface CameraRotate {
  kind: "rotate";
  degrees: number;
  center?: Point;
}

export type Camera = CameraPan | CameraZoom | CameraRotate;

export interface DensifyParams {
  lambda: number;
  tol: number;
}

export interface SchedulePair {
  window: number;
  stride: number;
}

/** Document accepted by POST/PUT /projects. Asset fields hold "asset:<id>" refs. */
export interface ProjectDocument {
  version: 1;
  image: string;
  L: number;
  trajectories: Point[][];
  masks: string[];
  landmarks: string | null;
  camera: Camera | null;
  densify: DensifyParams;
  schedule: SchedulePair;
}

export interface Diagnostics {
  hint_count: number;
  collisions: number;
  clamped: number;
  max_residual: number;
  solver_iterations: number;
  hole_pixels: number[];
}

/** Body returned by POST /projects/{id}/preview. */
export interface PreviewResponse {
  frames: string[];
  flow: string[];
  diagnostics: Diagnostics;
}

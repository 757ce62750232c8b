import { describe, expect, it } from "vitest";

import { MaskGrid } from "../src/maskgrid.js";
import {
  buildDocument,
  exportSession,
  hitLandmark,
  importSession,
  moveLandmark,
  newSession,
  type SessionState,
} from "../src/session.js";

function populatedSession(): SessionState {
  const state = newSession();
  state.frameCount = 5;
  state.trajectories = [
    [
      [10, 12],
      [20, 12],
      [30, 14],
    ],
    [
      [4.5, 7.25],
      [9, 3],
    ],
  ];
  const mask = new MaskGrid(6, 9);
  mask.stampDot(4, 2, 2, 1);
  state.masks = [mask];
  state.landmarks = [
    [
      [1, 2],
      [3, 4],
    ],
    [
      [1.5, 2.5],
      [3.5, 4.5],
    ],
  ];
  state.camera = { kind: "zoom", scale: 1.4, center: [4, 3] };
  state.densify = { lambda: 0.25, tol: 1e-7 };
  state.schedule = { window: 4, stride: 2 };
  return state;
}

describe("session export and import", () => {
  it("round-trips every layer", () => {
    const state = populatedSession();
    const back = importSession(exportSession(state));
    expect(back.frameCount).toBe(5);
    expect(back.trajectories).toEqual(state.trajectories);
    expect(back.masks).toHaveLength(1);
    expect(back.masks[0]!.rows()).toEqual(state.masks[0]!.rows());
    expect(back.landmarks).toEqual(state.landmarks);
    expect(back.camera).toEqual(state.camera);
    expect(back.densify).toEqual(state.densify);
    expect(back.schedule).toEqual(state.schedule);
  });

  it("fills defaults for optional knobs missing from older files", () => {
    const minimal = JSON.stringify({
      version: 1,
      frameCount: 3,
      trajectories: [],
      masks: [],
    });
    const back = importSession(minimal);
    expect(back.landmarks).toBeNull();
    expect(back.camera).toBeNull();
    expect(back.densify).toEqual({ lambda: 0, tol: 1e-8 });
    expect(back.schedule).toEqual({ window: 14, stride: 7 });
  });

  it("rejects non-JSON, wrong versions, and missing layers", () => {
    expect(() => importSession("{nope")).toThrow(/not JSON/);
    expect(() => importSession('{"version": 2}')).toThrow(/unsupported session version 2/);
    expect(() => importSession('{"version": 1, "frameCount": 4}')).toThrow(/missing required layers/);
  });
});

describe("buildDocument", () => {
  it("assembles the wire shape from layers and refs", () => {
    const state = populatedSession();
    const doc = buildDocument(state, {
      image: "asset:img",
      masks: ["asset:m0"],
      landmarks: "asset:lm",
    });
    expect(doc).toEqual({
      version: 1,
      image: "asset:img",
      L: 5,
      trajectories: state.trajectories,
      masks: ["asset:m0"],
      landmarks: "asset:lm",
      camera: { kind: "zoom", scale: 1.4, center: [4, 3] },
      densify: { lambda: 0.25, tol: 1e-7 },
      schedule: { window: 4, stride: 2 },
    });
    // Copies, not aliases: later edits to the session must not leak in.
    state.trajectories[0]![0]![0] = 999;
    state.densify.lambda = 9;
    expect(doc.trajectories[0]![0]![0]).toBe(10);
    expect(doc.densify.lambda).toBe(0.25);
  });

  it("maps an empty session with no optional layers", () => {
    const doc = buildDocument(newSession(), { image: "asset:img", masks: [], landmarks: null });
    expect(doc.L).toBe(8);
    expect(doc.trajectories).toEqual([]);
    expect(doc.masks).toEqual([]);
    expect(doc.landmarks).toBeNull();
    expect(doc.camera).toBeNull();
  });

  it("refuses mismatched refs", () => {
    const state = populatedSession();
    expect(() => buildDocument(state, { image: "asset:img", masks: [], landmarks: "asset:lm" })).toThrow(
      /1 masks/,
    );
    expect(() => buildDocument(state, { image: "asset:img", masks: ["asset:m0"], landmarks: null })).toThrow(
      /both be set or both empty/,
    );
  });
});

describe("landmark editing", () => {
  const grid = [
    [
      [10, 10],
      [30, 10],
    ],
    [
      [12, 11],
      [32, 11],
    ],
  ];

  it("moveLandmark returns a fresh grid and leaves the input alone", () => {
    const moved = moveLandmark(grid, 1, 0, [99, 98]);
    expect(moved[1]![0]).toEqual([99, 98]);
    expect(moved[1]![1]).toEqual([32, 11]);
    expect(moved[0]).toEqual(grid[0]);
    expect(grid[1]![0]).toEqual([12, 11]);
    expect(moved[0]).not.toBe(grid[0]);
  });

  it("moveLandmark bounds-checks frame and point", () => {
    expect(() => moveLandmark(grid, 2, 0, [0, 0])).toThrow(/frame 2 out of range/);
    expect(() => moveLandmark(grid, 0, 5, [0, 0])).toThrow(/landmark 5 out of range/);
  });

  it("hitLandmark picks the nearest point within reach", () => {
    const points = [
      [10, 10],
      [14, 10],
      [50, 50],
    ];
    expect(hitLandmark(points, [13, 10])).toBe(1);
    expect(hitLandmark(points, [11, 10])).toBe(0);
    expect(hitLandmark(points, [30, 30])).toBe(-1);
    expect(hitLandmark(points, [53, 54], 8)).toBe(2);
    expect(hitLandmark(points, [53, 54], 3)).toBe(-1);
  });
});

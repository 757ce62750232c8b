/** The studio application: canvas editing wired to the preview service.
 *
 * All geometry/mask/serialization logic lives in the imported modules where
 * it is unit-tested; this file is DOM plumbing.
 */

import { ApiError, EngineClient, debounce } from "./api.js";
import { arrowHead, canvasToImage, strokeToTrajectory, type StrokeSample } from "./geometry.js";
import { MaskGrid } from "./maskgrid.js";
import { encodeGrayPng } from "./png.js";
import {
  buildDocument,
  exportSession,
  hitLandmark,
  importSession,
  moveLandmark,
  newSession,
  type SessionState,
} from "./session.js";
import type { Camera, PreviewResponse } from "./types.js";

type Tool = "trajectory" | "brush" | "erase" | "landmark";

function must<T extends HTMLElement>(root: Document, id: string): T {
  const el = root.getElementById(id);
  if (el === null) {
    throw new Error(`missing element #${id}`);
  }
  return el as T;
}

function loadImageElement(url: string): Promise<HTMLImageElement> {
  return new Promise((resolve, reject) => {
    const img = new Image();
    img.onload = () => resolve(img);
    img.onerror = () => reject(new Error(`failed to load ${url}`));
    img.src = url;
  });
}

export class StudioApp {
  private readonly client: EngineClient;
  private state: SessionState = newSession();

  private readonly canvas: HTMLCanvasElement;
  private readonly ctx: CanvasRenderingContext2D;
  private readonly noticeBox: HTMLElement;
  private readonly diagnosticsBox: HTMLElement;
  private readonly scrubber: HTMLInputElement;
  private readonly frameLabel: HTMLElement;
  private readonly toolSelect: HTMLSelectElement;
  private readonly radiusInput: HTMLInputElement;
  private readonly maskSelect: HTMLSelectElement;
  private readonly overlayToggle: HTMLInputElement;
  private readonly autoToggle: HTMLInputElement;

  private imageBytes: Uint8Array | null = null;
  private imageEl: HTMLImageElement | null = null;
  private imageRef: string | null = null; // invalidated when a new file loads

  private projectId: string | null = null;
  private preview: PreviewResponse | null = null;
  private frameImages: (HTMLImageElement | null)[] = [];
  private flowImages: (HTMLImageElement | null)[] = [];

  private cursor = 0;
  private playTimer: ReturnType<typeof setInterval> | null = null;

  private stroke: StrokeSample[] = [];
  private draggingLandmark = -1;

  private readonly autoPreview: () => void;

  constructor(root: Document, client: EngineClient) {
    this.client = client;
    this.canvas = must<HTMLCanvasElement>(root, "canvas");
    const ctx = this.canvas.getContext("2d");
    if (ctx === null) {
      throw new Error("canvas 2d context unavailable");
    }
    this.ctx = ctx;
    this.noticeBox = must(root, "notice");
    this.diagnosticsBox = must(root, "diagnostics");
    this.scrubber = must<HTMLInputElement>(root, "scrubber");
    this.frameLabel = must(root, "frame-label");
    this.toolSelect = must<HTMLSelectElement>(root, "tool");
    this.radiusInput = must<HTMLInputElement>(root, "brush-radius");
    this.maskSelect = must<HTMLSelectElement>(root, "active-mask");
    this.overlayToggle = must<HTMLInputElement>(root, "overlay-flow");
    this.autoToggle = must<HTMLInputElement>(root, "auto-preview");

    this.autoPreview = debounce(() => {
      void this.runPreview();
    }, 600);

    this.bind(root);
    this.redraw();
  }

  private bind(root: Document): void {
    must<HTMLInputElement>(root, "file-image").addEventListener("change", (ev) => {
      const input = ev.target as HTMLInputElement;
      const file = input.files?.[0];
      if (file) {
        void this.loadImageFile(file);
      }
    });

    this.canvas.addEventListener("pointerdown", (ev) => this.pointerDown(ev));
    this.canvas.addEventListener("pointermove", (ev) => this.pointerMove(ev));
    this.canvas.addEventListener("pointerup", (ev) => this.pointerUp(ev));
    this.canvas.addEventListener("pointerleave", (ev) => this.pointerUp(ev));

    must<HTMLButtonElement>(root, "add-mask").addEventListener("click", () => this.addMask());
    must<HTMLButtonElement>(root, "fill-mask").addEventListener("click", () => {
      this.activeMask()?.fill(1);
      this.edited();
    });
    must<HTMLButtonElement>(root, "clear-mask").addEventListener("click", () => {
      this.activeMask()?.fill(0);
      this.edited();
    });
    must<HTMLButtonElement>(root, "undo-trajectory").addEventListener("click", () => {
      this.state.trajectories.pop();
      this.edited();
    });

    const cameraKind = must<HTMLSelectElement>(root, "camera-kind");
    const readCamera = () => {
      this.state.camera = this.readCamera(root, cameraKind.value);
      this.edited();
    };
    cameraKind.addEventListener("change", readCamera);
    for (const id of ["cam-dx", "cam-dy", "cam-scale", "cam-degrees"]) {
      must<HTMLInputElement>(root, id).addEventListener("change", readCamera);
    }

    const numeric = (id: string, apply: (value: number) => void) => {
      const input = must<HTMLInputElement>(root, id);
      input.addEventListener("change", () => {
        const value = Number(input.value);
        if (Number.isFinite(value)) {
          apply(value);
          this.edited();
        }
      });
    };
    numeric("frame-count", (v) => {
      this.state.frameCount = Math.max(2, Math.round(v));
    });
    numeric("densify-lambda", (v) => {
      this.state.densify = { ...this.state.densify, lambda: v };
    });
    numeric("densify-tol", (v) => {
      this.state.densify = { ...this.state.densify, tol: v };
    });
    numeric("schedule-window", (v) => {
      this.state.schedule = { ...this.state.schedule, window: Math.max(1, Math.round(v)) };
    });
    numeric("schedule-stride", (v) => {
      this.state.schedule = { ...this.state.schedule, stride: Math.max(1, Math.round(v)) };
    });

    must<HTMLButtonElement>(root, "preview").addEventListener("click", () => {
      void this.runPreview();
    });
    this.overlayToggle.addEventListener("change", () => this.redraw());
    this.scrubber.addEventListener("input", () => {
      this.cursor = Number(this.scrubber.value);
      this.redraw();
    });
    must<HTMLButtonElement>(root, "play").addEventListener("click", () => this.togglePlayback());

    must<HTMLButtonElement>(root, "export-session").addEventListener("click", () => this.download());
    must<HTMLInputElement>(root, "file-session").addEventListener("change", (ev) => {
      const input = ev.target as HTMLInputElement;
      const file = input.files?.[0];
      if (file) {
        void this.loadSessionFile(file);
      }
    });
    must<HTMLInputElement>(root, "file-landmarks").addEventListener("change", (ev) => {
      const input = ev.target as HTMLInputElement;
      const file = input.files?.[0];
      if (file) {
        void this.loadLandmarkFile(file);
      }
    });
  }

  private readCamera(root: Document, kind: string): Camera | null {
    const num = (id: string) => Number(must<HTMLInputElement>(root, id).value) || 0;
    if (kind === "pan") {
      return { kind: "pan", dx: num("cam-dx"), dy: num("cam-dy") };
    }
    if (kind === "zoom") {
      return { kind: "zoom", scale: num("cam-scale") || 1 };
    }
    if (kind === "rotate") {
      return { kind: "rotate", degrees: num("cam-degrees") };
    }
    return null;
  }

  // ------------------------------------------------------------------ edits

  private edited(): void {
    this.redraw();
    if (this.autoToggle.checked) {
      this.autoPreview();
    }
  }

  private activeMask(): MaskGrid | null {
    const index = Number(this.maskSelect.value);
    return this.state.masks[index] ?? null;
  }

  private addMask(): void {
    if (this.imageEl === null) {
      this.notice("load an image before painting masks");
      return;
    }
    this.state.masks.push(new MaskGrid(this.imageEl.naturalHeight, this.imageEl.naturalWidth));
    this.refreshMaskSelect();
    this.maskSelect.value = String(this.state.masks.length - 1);
    this.redraw();
  }

  private refreshMaskSelect(): void {
    this.maskSelect.innerHTML = "";
    this.state.masks.forEach((_, i) => {
      const option = document.createElement("option");
      option.value = String(i);
      option.textContent = `mask ${i}`;
      this.maskSelect.appendChild(option);
    });
  }

  private pointerPos(ev: PointerEvent): StrokeSample {
    const rect = this.canvas.getBoundingClientRect();
    const [x, y] = canvasToImage(
      ev.clientX,
      ev.clientY,
      rect,
      this.canvas.width,
      this.canvas.height,
    );
    return { x, y };
  }

  private pointerDown(ev: PointerEvent): void {
    if (this.imageEl === null) {
      return;
    }
    this.canvas.setPointerCapture(ev.pointerId);
    const pos = this.pointerPos(ev);
    const tool = this.toolSelect.value as Tool;
    if (tool === "trajectory") {
      this.stroke = [pos];
    } else if (tool === "brush" || tool === "erase") {
      this.stroke = [pos];
      this.activeMask()?.stampStroke([pos], Number(this.radiusInput.value), tool === "brush" ? 1 : 0);
      this.redraw();
    } else if (tool === "landmark") {
      const frame = this.state.landmarks?.[this.cursor];
      if (frame) {
        this.draggingLandmark = hitLandmark(frame, [pos.x, pos.y]);
      }
    }
  }

  private pointerMove(ev: PointerEvent): void {
    if (this.imageEl === null) {
      return;
    }
    const pos = this.pointerPos(ev);
    const tool = this.toolSelect.value as Tool;
    if (tool === "trajectory" && this.stroke.length > 0) {
      this.stroke.push(pos);
      this.redraw();
    } else if ((tool === "brush" || tool === "erase") && this.stroke.length > 0) {
      const previous = this.stroke[this.stroke.length - 1]!;
      this.activeMask()?.stampStroke(
        [previous, pos],
        Number(this.radiusInput.value),
        tool === "brush" ? 1 : 0,
      );
      this.stroke.push(pos);
      this.redraw();
    } else if (tool === "landmark" && this.draggingLandmark >= 0 && this.state.landmarks) {
      this.state.landmarks = moveLandmark(this.state.landmarks, this.cursor, this.draggingLandmark, [
        pos.x,
        pos.y,
      ]);
      this.redraw();
    }
  }

  private pointerUp(ev: PointerEvent): void {
    const tool = this.toolSelect.value as Tool;
    if (tool === "trajectory" && this.stroke.length > 0) {
      this.stroke.push(this.pointerPos(ev));
      const trajectory = strokeToTrajectory(this.stroke);
      if (trajectory === null) {
        this.notice("stroke discarded: needs at least two distinct points");
      } else {
        this.state.trajectories.push(trajectory);
        this.edited();
      }
    } else if ((tool === "brush" || tool === "erase") && this.stroke.length > 0) {
      this.edited();
    } else if (tool === "landmark" && this.draggingLandmark >= 0) {
      this.edited();
    }
    this.stroke = [];
    this.draggingLandmark = -1;
  }

  // ------------------------------------------------------------------- files

  private async loadImageFile(file: File): Promise<void> {
    const bytes = new Uint8Array(await file.arrayBuffer());
    const url = URL.createObjectURL(new Blob([bytes], { type: file.type || "image/png" }));
    try {
      this.imageEl = await loadImageElement(url);
    } finally {
      URL.revokeObjectURL(url);
    }
    this.imageBytes = bytes;
    this.imageRef = null;
    this.projectId = null;
    this.preview = null;
    this.canvas.width = this.imageEl.naturalWidth;
    this.canvas.height = this.imageEl.naturalHeight;
    this.notice(`loaded ${file.name} (${this.canvas.width}x${this.canvas.height})`);
    this.redraw();
  }

  private async loadLandmarkFile(file: File): Promise<void> {
    try {
      const grid = JSON.parse(await file.text()) as number[][][];
      if (!Array.isArray(grid) || grid.length < 2) {
        throw new Error("expected [frame][point][2] coordinates");
      }
      this.state.landmarks = grid;
      this.state.frameCount = grid.length;
      this.notice(`loaded ${grid[0]?.length ?? 0} landmarks over ${grid.length} frames`);
      this.edited();
    } catch (err) {
      this.notice(`landmark load failed: ${(err as Error).message}`);
    }
  }

  private async loadSessionFile(file: File): Promise<void> {
    try {
      this.state = importSession(await file.text());
      this.projectId = null;
      this.preview = null;
      this.refreshMaskSelect();
      this.notice(`imported session (${this.state.trajectories.length} trajectories)`);
      this.redraw();
    } catch (err) {
      this.notice(`session import failed: ${(err as Error).message}`);
    }
  }

  private download(): void {
    const blob = new Blob([exportSession(this.state)], { type: "application/json" });
    const url = URL.createObjectURL(blob);
    const link = document.createElement("a");
    link.href = url;
    link.download = "session.json";
    link.click();
    URL.revokeObjectURL(url);
  }

  // ----------------------------------------------------------------- preview

  private async syncProject(): Promise<string> {
    if (this.imageBytes === null) {
      throw new ApiError(0, "load an image first", "studio");
    }
    if (this.imageRef === null) {
      this.imageRef = await this.client.uploadAsset(this.imageBytes.slice().buffer, "image/png");
    }
    const maskRefs: string[] = [];
    for (const mask of this.state.masks) {
      const png = encodeGrayPng(mask.toGrayBytes(), mask.width, mask.height);
      maskRefs.push(await this.client.uploadAsset(png.slice().buffer, "image/png"));
    }
    let landmarksRef: string | null = null;
    if (this.state.landmarks !== null) {
      landmarksRef = await this.client.uploadAsset(
        JSON.stringify(this.state.landmarks),
        "application/json",
      );
    }
    const doc = buildDocument(this.state, {
      image: this.imageRef,
      masks: maskRefs,
      landmarks: landmarksRef,
    });
    if (this.projectId === null) {
      this.projectId = await this.client.createProject(doc);
    } else {
      await this.client.putProject(this.projectId, doc);
    }
    return this.projectId;
  }

  async runPreview(): Promise<void> {
    try {
      this.notice("rendering preview...");
      const id = await this.syncProject();
      const preview = await this.client.requestPreview(id);
      if (preview === null) {
        return; // superseded by a newer request
      }
      this.preview = preview;
      this.frameImages = new Array<HTMLImageElement | null>(preview.frames.length).fill(null);
      this.flowImages = new Array<HTMLImageElement | null>(preview.flow.length).fill(null);
      this.scrubber.max = String(preview.frames.length - 1);
      this.cursor = Math.min(this.cursor, preview.frames.length - 1);
      this.diagnosticsBox.textContent = JSON.stringify(preview.diagnostics, null, 2);
      this.notice(`rendered ${preview.frames.length} frames`);
      await this.ensureFrame(this.cursor);
      this.redraw();
    } catch (err) {
      if (err instanceof ApiError) {
        this.notice(`preview failed ${err.label}`);
      } else {
        this.notice(`preview failed: ${(err as Error).message}`);
      }
    }
  }

  private async ensureFrame(index: number): Promise<void> {
    if (this.preview === null) {
      return;
    }
    const frameUrl = this.preview.frames[index];
    if (frameUrl && this.frameImages[index] == null) {
      this.frameImages[index] = await loadImageElement(this.client.url(frameUrl));
    }
    const flowUrl = this.preview.flow[index - 1];
    if (flowUrl && this.flowImages[index - 1] == null) {
      this.flowImages[index - 1] = await loadImageElement(
        this.client.url(this.client.flowPngUrl(flowUrl)),
      );
    }
  }

  private togglePlayback(): void {
    if (this.playTimer !== null) {
      clearInterval(this.playTimer);
      this.playTimer = null;
      return;
    }
    if (this.preview === null) {
      return;
    }
    this.playTimer = setInterval(() => {
      const total = this.preview?.frames.length ?? 0;
      if (total > 0) {
        this.cursor = (this.cursor + 1) % total;
        this.scrubber.value = String(this.cursor);
        void this.ensureFrame(this.cursor).then(() => this.redraw());
      }
    }, 125);
  }

  // ------------------------------------------------------------------- paint

  private notice(text: string): void {
    this.noticeBox.textContent = text;
  }

  private redraw(): void {
    const { ctx, canvas } = this;
    ctx.clearRect(0, 0, canvas.width, canvas.height);
    const frame = this.frameImages[this.cursor];
    if (this.preview !== null && frame) {
      ctx.drawImage(frame, 0, 0);
    } else if (this.imageEl !== null) {
      ctx.drawImage(this.imageEl, 0, 0);
    } else {
      ctx.fillStyle = "#202020";
      ctx.fillRect(0, 0, canvas.width, canvas.height);
      this.frameLabel.textContent = "no image";
      return;
    }
    this.frameLabel.textContent = `frame ${this.cursor}`;

    const flow = this.flowImages[this.cursor - 1];
    if (this.overlayToggle.checked && flow) {
      ctx.save();
      ctx.globalAlpha = 0.55;
      ctx.drawImage(flow, 0, 0);
      ctx.restore();
    }

    for (const mask of this.state.masks) {
      const tile = new ImageData(mask.toOverlayRgba(), mask.width, mask.height);
      void createImageBitmap(tile).then((bitmap) => {
        ctx.drawImage(bitmap, 0, 0);
      });
    }

    ctx.lineWidth = 2;
    ctx.strokeStyle = "#ffcf40";
    ctx.fillStyle = "#ffcf40";
    for (const trajectory of this.state.trajectories) {
      this.drawTrajectory(trajectory);
    }
    if (this.stroke.length > 1 && (this.toolSelect.value as Tool) === "trajectory") {
      this.drawTrajectory(this.stroke.map((s) => [s.x, s.y]));
    }

    const landmarks = this.state.landmarks?.[this.cursor];
    if (landmarks) {
      ctx.fillStyle = "#37d0ff";
      for (const p of landmarks) {
        ctx.beginPath();
        ctx.arc(p[0]!, p[1]!, 3, 0, TWO_PI);
        ctx.fill();
      }
    }
  }

  private drawTrajectory(points: readonly (readonly [number, number])[]): void {
    if (points.length < 2) {
      return;
    }
    const { ctx } = this;
    ctx.beginPath();
    ctx.moveTo(points[0]![0], points[0]![1]);
    for (const p of points.slice(1)) {
      ctx.lineTo(p[0], p[1]);
    }
    ctx.stroke();
    const tail = points[points.length - 2]!;
    const head = points[points.length - 1]!;
    const [left, right] = arrowHead([tail[0], tail[1]], [head[0], head[1]]);
    ctx.beginPath();
    ctx.moveTo(head[0], head[1]);
    ctx.lineTo(left[0], left[1]);
    ctx.lineTo(right[0], right[1]);
    ctx.closePath();
    ctx.fill();
  }
}

const TWO_PI = 2 * Math.PI;

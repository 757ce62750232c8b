/** Binary brush mask editing on an integer pixel grid. */

import type { StrokeSample } from "./geometry.js";

export class MaskGrid {
  readonly height: number;
  readonly width: number;
  readonly data: Uint8Array;

  constructor(height: number, width: number, data?: Uint8Array) {
    if (height < 1 || width < 1) {
      throw new Error(`mask needs positive dimensions, got ${height}x${width}`);
    }
    if (data !== undefined && data.length !== height * width) {
      throw new Error(`mask data length ${data.length} does not match ${height}x${width}`);
    }
    this.height = height;
    this.width = width;
    this.data = data ?? new Uint8Array(height * width);
  }

  get(row: number, col: number): number {
    return this.data[row * this.width + col]!;
  }

  /** Stamp a filled disk: pixel centers within radius of (cx, cy). */
  stampDot(cx: number, cy: number, radius: number, value: 0 | 1): void {
    const r2 = radius * radius;
    const rowLo = Math.max(0, Math.ceil(cy - radius));
    const rowHi = Math.min(this.height - 1, Math.floor(cy + radius));
    for (let row = rowLo; row <= rowHi; row++) {
      const dy = row - cy;
      const span = Math.sqrt(Math.max(0, r2 - dy * dy));
      const colLo = Math.max(0, Math.ceil(cx - span));
      const colHi = Math.min(this.width - 1, Math.floor(cx + span));
      for (let col = colLo; col <= colHi; col++) {
        this.data[row * this.width + col] = value;
      }
    }
  }

  /**
   * Stamp dots along a polyline at sub-pixel steps so fast strokes leave no
   * gaps. Erasing the same samples with the same radius visits the exact
   * same pixels, which is what makes paint-then-erase a clean undo.
   */
  stampStroke(samples: readonly StrokeSample[], radius: number, value: 0 | 1): void {
    if (samples.length === 0) {
      return;
    }
    this.stampDot(samples[0]!.x, samples[0]!.y, radius, value);
    for (let i = 1; i < samples.length; i++) {
      const a = samples[i - 1]!;
      const b = samples[i]!;
      const steps = Math.max(1, Math.ceil(Math.hypot(b.x - a.x, b.y - a.y) * 2));
      for (let k = 1; k <= steps; k++) {
        const t = k / steps;
        this.stampDot(a.x + t * (b.x - a.x), a.y + t * (b.y - a.y), radius, value);
      }
    }
  }

  fill(value: 0 | 1): void {
    this.data.fill(value);
  }

  count(): number {
    let total = 0;
    for (const v of this.data) {
      total += v;
    }
    return total;
  }

  clone(): MaskGrid {
    return new MaskGrid(this.height, this.width, this.data.slice());
  }

  /** One "0101..." string per row; exact and diff-friendly in session files. */
  rows(): string[] {
    const out: string[] = [];
    for (let row = 0; row < this.height; row++) {
      let line = "";
      for (let col = 0; col < this.width; col++) {
        line += this.get(row, col) ? "1" : "0";
      }
      out.push(line);
    }
    return out;
  }

  static fromRows(rows: readonly string[]): MaskGrid {
    if (rows.length === 0 || rows[0]!.length === 0) {
      throw new Error("mask rows must be non-empty");
    }
    const width = rows[0]!.length;
    const grid = new MaskGrid(rows.length, width);
    rows.forEach((line, row) => {
      if (line.length !== width) {
        throw new Error(`ragged mask row ${row}`);
      }
      for (let col = 0; col < width; col++) {
        const ch = line[col];
        if (ch !== "0" && ch !== "1") {
          throw new Error(`mask row ${row} has non-binary cell '${ch}'`);
        }
        grid.data[row * width + col] = ch === "1" ? 1 : 0;
      }
    });
    return grid;
  }

  /** 0/255 grayscale bytes, the engine's mask PNG convention. */
  toGrayBytes(): Uint8Array {
    const out = new Uint8Array(this.data.length);
    for (let i = 0; i < this.data.length; i++) {
      out[i] = this.data[i]! ? 255 : 0;
    }
    return out;
  }

  /** Tinted RGBA for an on-canvas overlay; off pixels stay transparent. */
  toOverlayRgba(r = 255, g = 64, b = 64, alpha = 96): Uint8ClampedArray<ArrayBuffer> {
    const out = new Uint8ClampedArray(this.data.length * 4);
    for (let i = 0; i < this.data.length; i++) {
      if (this.data[i]!) {
        out[4 * i] = r;
        out[4 * i + 1] = g;
        out[4 * i + 2] = b;
        out[4 * i + 3] = alpha;
      }
    }
    return out;
  }
}

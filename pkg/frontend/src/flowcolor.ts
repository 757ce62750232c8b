/** Flow colorization, byte-identical to the service's renderer.
 *
 * Hue encodes direction (atan2(v, u) mapped onto the wheel), saturation is
 * magnitude over the scale, value stays 1 so zero flow renders white. The
 * service quantizes with round-half-to-even, so we must too.
 */

const TWO_PI = 2 * Math.PI;

function mod1(x: number): number {
  return ((x % 1) + 1) % 1;
}

export function hsvToRgb(h: number, s: number, v: number): [number, number, number] {
  const scaled = h * 6;
  const i = Math.floor(scaled);
  const f = scaled - i;
  const p = v * (1 - s);
  const q = v * (1 - s * f);
  const t = v * (1 - s * (1 - f));
  switch (((i % 6) + 6) % 6) {
    case 0:
      return [v, t, p];
    case 1:
      return [q, v, p];
    case 2:
      return [p, v, t];
    case 3:
      return [p, q, v];
    case 4:
      return [t, p, v];
    default:
      return [v, p, q];
  }
}

/** numpy-style rounding: halves go to the even neighbour. */
export function quantizeByte(x: number): number {
  const scaled = x * 255;
  const floor = Math.floor(scaled);
  const diff = scaled - floor;
  if (diff > 0.5) {
    return floor + 1;
  }
  if (diff < 0.5) {
    return floor;
  }
  return floor % 2 === 0 ? floor : floor + 1;
}

/** Float RGB for one flow vector under a fixed saturation scale. */
export function flowVectorColor(
  u: number,
  v: number,
  scale: number,
): [number, number, number] {
  const h = mod1(Math.atan2(v, u) / TWO_PI);
  const s = scale > 0 ? Math.hypot(u, v) / scale : 0;
  return hsvToRgb(h, s, 1);
}

/**
 * Colorize an interleaved (u, v) flow grid to RGBA bytes for putImageData.
 *
 * maxMagnitude fixes the saturation scale; omitted, the frame's own max is
 * used and an all-zero frame renders white, matching the service.
 */
export function flowToColor(
  uv: Float32Array | Float64Array,
  height: number,
  width: number,
  maxMagnitude?: number,
): Uint8ClampedArray {
  const count = height * width;
  if (uv.length !== count * 2) {
    throw new Error(`flow length ${uv.length} does not match ${height}x${width}x2`);
  }
  let scale: number;
  if (maxMagnitude === undefined) {
    scale = 0;
    for (let i = 0; i < count; i++) {
      scale = Math.max(scale, Math.hypot(uv[2 * i]!, uv[2 * i + 1]!));
    }
  } else {
    scale = maxMagnitude;
  }
  const out = new Uint8ClampedArray(count * 4);
  for (let i = 0; i < count; i++) {
    const [r, g, b] = flowVectorColor(uv[2 * i]!, uv[2 * i + 1]!, scale);
    out[4 * i] = quantizeByte(r);
    out[4 * i + 1] = quantizeByte(g);
    out[4 * i + 2] = quantizeByte(b);
    out[4 * i + 3] = 255;
  }
  return out;
}

/** Minimal grayscale PNG encoder.
 *
 * The engine only accepts single-channel mask PNGs, and canvas.toBlob always
 * emits RGB(A), so masks are encoded by hand: 8-bit grayscale, filter 0 on
 * every scanline, zlib stream built from stored (uncompressed) deflate
 * blocks. Stored blocks keep this dependency-free and byte-deterministic;
 * masks are tiny, so the lost compression does not matter.
 */

const SIGNATURE = Uint8Array.of(137, 80, 78, 71, 13, 10, 26, 10);

const CRC_TABLE = (() => {
  const table = new Uint32Array(256);
  for (let n = 0; n < 256; n++) {
    let c = n;
    for (let k = 0; k < 8; k++) {
      c = c & 1 ? 0xedb88320 ^ (c >>> 1) : c >>> 1;
    }
    table[n] = c >>> 0;
  }
  return table;
})();

export function crc32(bytes: Uint8Array): number {
  let c = 0xffffffff;
  for (const byte of bytes) {
    c = CRC_TABLE[(c ^ byte) & 0xff]! ^ (c >>> 8);
  }
  return (c ^ 0xffffffff) >>> 0;
}

export function adler32(bytes: Uint8Array): number {
  let a = 1;
  let b = 0;
  for (const byte of bytes) {
    a = (a + byte) % 65521;
    b = (b + a) % 65521;
  }
  return ((b << 16) | a) >>> 0;
}

function u32be(value: number): Uint8Array {
  return Uint8Array.of((value >>> 24) & 0xff, (value >>> 16) & 0xff, (value >>> 8) & 0xff, value & 0xff);
}

function chunk(type: string, data: Uint8Array): Uint8Array {
  const typed = new Uint8Array(4 + data.length);
  for (let i = 0; i < 4; i++) {
    typed[i] = type.charCodeAt(i);
  }
  typed.set(data, 4);
  const out = new Uint8Array(8 + data.length + 4);
  out.set(u32be(data.length), 0);
  out.set(typed, 4);
  out.set(u32be(crc32(typed)), 8 + data.length);
  return out;
}

/** Wrap raw bytes in a zlib stream of stored deflate blocks. */
export function zlibStored(raw: Uint8Array): Uint8Array {
  const blocks = Math.max(1, Math.ceil(raw.length / 65535));
  const out = new Uint8Array(2 + blocks * 5 + raw.length + 4);
  out[0] = 0x78; // deflate, 32k window
  out[1] = 0x01; // no preset dictionary, check bits for fastest level
  let write = 2;
  for (let b = 0; b < blocks; b++) {
    const start = b * 65535;
    const piece = raw.subarray(start, Math.min(start + 65535, raw.length));
    out[write++] = b === blocks - 1 ? 1 : 0;
    out[write++] = piece.length & 0xff;
    out[write++] = (piece.length >>> 8) & 0xff;
    out[write++] = ~piece.length & 0xff;
    out[write++] = (~piece.length >>> 8) & 0xff;
    out.set(piece, write);
    write += piece.length;
  }
  out.set(u32be(adler32(raw)), write);
  return out;
}

/** Encode 8-bit grayscale pixels (row-major, length width*height) as PNG. */
export function encodeGrayPng(pixels: Uint8Array, width: number, height: number): Uint8Array {
  if (width < 1 || height < 1 || pixels.length !== width * height) {
    throw new Error(`pixel buffer ${pixels.length} does not match ${width}x${height}`);
  }
  const ihdr = new Uint8Array(13);
  ihdr.set(u32be(width), 0);
  ihdr.set(u32be(height), 4);
  ihdr[8] = 8; // bit depth
  ihdr[9] = 0; // grayscale
  // compression, filter, interlace all zero

  const scanlines = new Uint8Array(height * (width + 1));
  for (let row = 0; row < height; row++) {
    scanlines.set(pixels.subarray(row * width, (row + 1) * width), row * (width + 1) + 1);
  }

  const parts = [SIGNATURE, chunk("IHDR", ihdr), chunk("IDAT", zlibStored(scanlines)), chunk("IEND", new Uint8Array(0))];
  const total = parts.reduce((n, p) => n + p.length, 0);
  const out = new Uint8Array(total);
  let offset = 0;
  for (const part of parts) {
    out.set(part, offset);
    offset += part.length;
  }
  return out;
}

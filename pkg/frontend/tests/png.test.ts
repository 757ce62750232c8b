import { inflateSync } from "node:zlib";

import { describe, expect, it } from "vitest";

import { MaskGrid } from "../src/maskgrid.js";
import { adler32, crc32, encodeGrayPng, zlibStored } from "../src/png.js";

interface Chunk {
  type: string;
  data: Uint8Array;
  crc: number;
}

function readU32(bytes: Uint8Array, at: number): number {
  return ((bytes[at]! << 24) | (bytes[at + 1]! << 16) | (bytes[at + 2]! << 8) | bytes[at + 3]!) >>> 0;
}

function parseChunks(png: Uint8Array): Chunk[] {
  expect(Array.from(png.subarray(0, 8))).toEqual([137, 80, 78, 71, 13, 10, 26, 10]);
  const chunks: Chunk[] = [];
  let at = 8;
  while (at < png.length) {
    const length = readU32(png, at);
    const type = String.fromCharCode(...png.subarray(at + 4, at + 8));
    chunks.push({
      type,
      data: png.subarray(at + 8, at + 8 + length),
      crc: readU32(png, at + 8 + length),
    });
    at += 12 + length;
  }
  return chunks;
}

// Independent bitwise CRC, no table, to check the encoder's table version.
function referenceCrc(bytes: Uint8Array): number {
  let c = 0xffffffff;
  for (const byte of bytes) {
    c ^= byte;
    for (let k = 0; k < 8; k++) {
      c = c & 1 ? (c >>> 1) ^ 0xedb88320 : c >>> 1;
    }
  }
  return (c ^ 0xffffffff) >>> 0;
}

describe("encodeGrayPng", () => {
  it("emits a grayscale PNG node's zlib can decode back to the pixels", () => {
    const mask = new MaskGrid(5, 8);
    mask.stampDot(3, 2, 2, 1);
    const pixels = mask.toGrayBytes();
    const png = encodeGrayPng(pixels, 8, 5);
    const chunks = parseChunks(png);
    expect(chunks.map((c) => c.type)).toEqual(["IHDR", "IDAT", "IEND"]);

    const ihdr = chunks[0]!.data;
    expect(readU32(ihdr, 0)).toBe(8); // width
    expect(readU32(ihdr, 4)).toBe(5); // height
    expect(Array.from(ihdr.subarray(8))).toEqual([8, 0, 0, 0, 0]); // depth 8, gray, no interlace

    const raw = inflateSync(chunks[1]!.data);
    expect(raw.length).toBe(5 * (8 + 1));
    for (let row = 0; row < 5; row++) {
      expect(raw[row * 9]).toBe(0); // filter byte
      expect(Array.from(raw.subarray(row * 9 + 1, row * 9 + 9))).toEqual(
        Array.from(pixels.subarray(row * 8, (row + 1) * 8)),
      );
    }
  });

  it("writes chunk CRCs a bitwise reference agrees with", () => {
    const png = encodeGrayPng(Uint8Array.of(0, 255, 128, 7), 2, 2);
    for (const chunk of parseChunks(png)) {
      const typed = new Uint8Array(4 + chunk.data.length);
      typed.set([...chunk.type].map((ch) => ch.charCodeAt(0)));
      typed.set(chunk.data, 4);
      expect(chunk.crc).toBe(referenceCrc(typed));
    }
  });

  it("splits payloads beyond one stored block and still inflates", () => {
    const width = 300;
    const height = 260; // scanlines exceed the 65535-byte stored block limit
    const pixels = new Uint8Array(width * height);
    for (let i = 0; i < pixels.length; i++) {
      pixels[i] = i % 251;
    }
    const png = encodeGrayPng(pixels, width, height);
    const idat = parseChunks(png).find((c) => c.type === "IDAT")!;
    const raw = inflateSync(idat.data);
    const expected = new Uint8Array(height * (width + 1));
    for (let row = 0; row < height; row++) {
      expected.set(pixels.subarray(row * width, (row + 1) * width), row * (width + 1) + 1);
    }
    expect(raw.equals(expected)).toBe(true);
  });

  it("rejects a mismatched pixel buffer", () => {
    expect(() => encodeGrayPng(new Uint8Array(5), 2, 2)).toThrow(/does not match/);
  });
});

describe("zlib plumbing", () => {
  it("builds streams node accepts for empty-ish and exact-boundary sizes", () => {
    for (const size of [1, 65535, 65536, 70000]) {
      const raw = new Uint8Array(size);
      raw.fill(42);
      expect(Array.from(inflateSync(zlibStored(raw)))).toEqual(Array.from(raw));
    }
  });

  it("computes the documented check values", () => {
    // Known vectors: CRC32("IEND") seals every PNG, adler32 of "Wikipedia".
    expect(crc32(new TextEncoder().encode("IEND"))).toBe(0xae426082);
    expect(adler32(new TextEncoder().encode("Wikipedia"))).toBe(0x11e60398);
  });
});

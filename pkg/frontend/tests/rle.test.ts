import { describe, expect, it } from "vitest";

import { decodeRle, maskArea, type Rle } from "../src/rle.js";

// test vectors shared with the mask codec test suite on the service side
const VECTORS: Array<{ name: string; rle: Rle; pixels: Array<[number, number]> }> = [
  {
    name: "all-zero 2x2",
    rle: { size: [2, 2], counts: [4] },
    pixels: [],
  },
  {
    name: "all-one 2x2",
    rle: { size: [2, 2], counts: [0, 4] },
    pixels: [
      [0, 0],
      [0, 1],
      [1, 0],
      [1, 1],
    ],
  },
  {
    name: "single pixel at row 1, col 0",
    rle: { size: [2, 2], counts: [1, 1, 2] },
    pixels: [[1, 0]],
  },
  {
    name: "4x4 identity",
    rle: { size: [4, 4], counts: [0, 1, 4, 1, 4, 1, 4, 1] },
    pixels: [
      [0, 0],
      [1, 1],
      [2, 2],
      [3, 3],
    ],
  },
];

describe("decodeRle", () => {
  for (const vector of VECTORS) {
    it(`decodes ${vector.name} pixel-exactly`, () => {
      const mask = decodeRle(vector.rle);
      const [height, width] = vector.rle.size;
      expect(mask.width).toBe(width);
      expect(mask.height).toBe(height);
      const want = new Uint8Array(width * height);
      for (const [row, col] of vector.pixels) {
        want[row * width + col] = 1;
      }
      expect(mask.data).toEqual(want);
      expect(maskArea(mask)).toBe(vector.pixels.length);
    });
  }

  it("scans column-major", () => {
    // 3 rows x 2 cols: first three ones fill column 0 entirely
    const mask = decodeRle({ size: [3, 2], counts: [0, 3, 3] });
    expect(Array.from(mask.data)).toEqual([1, 0, 1, 0, 1, 0]);
  });

  it("rejects counts with the wrong sum", () => {
    expect(() => decodeRle({ size: [2, 2], counts: [3] })).toThrow(/sum/);
  });

  it("rejects negative runs", () => {
    expect(() => decodeRle({ size: [2, 2], counts: [5, -1] })).toThrow(/invalid run/);
  });

  it("rejects zero runs after the first position", () => {
    expect(() => decodeRle({ size: [2, 2], counts: [1, 0, 3] })).toThrow(/zero-length/);
  });

  it("rejects empty dimensions", () => {
    expect(() => decodeRle({ size: [0, 4], counts: [] })).toThrow(/size/);
  });
});

/**
 * Column-major run-length decoding of binary masks.
 *
 * The wire format is `{size: [height, width], counts: [...]}` where counts
 * alternate zero-run / one-run lengths starting with a zero run, scanning
 * all rows of column 0, then column 1, and so on.
 */

export interface Rle {
  size: [number, number]; // [height, width]
  counts: number[];
}

export interface BitMask {
  width: number;
  height: number;
  /** row-major, one byte per pixel, 0 or 1 */
  data: Uint8Array;
}

export function decodeRle(rle: Rle): BitMask {
  const [height, width] = rle.size;
  if (!(height > 0 && width > 0)) {
    throw new Error(`invalid mask size ${rle.size}`);
  }
  const total = height * width;
  let sum = 0;
  for (let i = 0; i < rle.counts.length; i++) {
    const c = rle.counts[i];
    if (!Number.isInteger(c) || c < 0) {
      throw new Error(`invalid run length ${c}`);
    }
    if (c === 0 && i > 0) {
      throw new Error("zero-length run after the first position");
    }
    sum += c;
  }
  if (sum !== total) {
    throw new Error(`run lengths sum to ${sum}, expected ${total}`);
  }

  const data = new Uint8Array(total);
  let flat = 0; // column-major position
  let value = 0;
  for (const count of rle.counts) {
    if (value === 1) {
      for (let k = 0; k < count; k++) {
        const pos = flat + k;
        const row = pos % height;
        const col = (pos - row) / height;
        data[row * width + col] = 1;
      }
    }
    flat += count;
    value = 1 - value;
  }
  return { width, height, data };
}

export function maskArea(mask: BitMask): number {
  let area = 0;
  for (let i = 0; i < mask.data.length; i++) area += mask.data[i];
  return area;
}

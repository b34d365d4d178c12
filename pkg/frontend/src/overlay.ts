/**
 * Mask-to-pixel compositing, kept pure so tests can assert exact RGBA
 * buffers. Overlays are always produced at the mask's native dimensions;
 * any scaling happens later on the canvas element, never on the pixels.
 */

import type { BitMask } from "./rle.js";

export interface Rgba {
  r: number;
  g: number;
  b: number;
  a: number; // 0..255
}

export const OVERLAY_COLORS: Record<"modal" | "amodal" | "occluder", Rgba> = {
  modal: { r: 64, g: 160, b: 255, a: 140 },
  amodal: { r: 80, g: 220, b: 120, a: 140 },
  occluder: { r: 245, g: 110, b: 80, a: 140 },
};

/** RGBA buffer with `color` exactly on the mask's 1-pixels, transparent elsewhere. */
export function composeOverlay(mask: BitMask, color: Rgba): Uint8ClampedArray<ArrayBuffer> {
  const out = new Uint8ClampedArray(new ArrayBuffer(mask.width * mask.height * 4));
  for (let i = 0; i < mask.data.length; i++) {
    if (mask.data[i]) {
      const o = i * 4;
      out[o] = color.r;
      out[o + 1] = color.g;
      out[o + 2] = color.b;
      out[o + 3] = color.a;
    }
  }
  return out;
}

export function formatRatio(ratio: number): string {
  return `${Math.round(ratio * 100)}% occluded`;
}

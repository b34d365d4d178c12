/**
 * DOM wiring: two panes (image + modal | image + amodal), caption,
 * progress footer, and the keyboard-driven review loop.
 */

import { ApiClient } from "./api.js";
import { composeOverlay, formatRatio, OVERLAY_COLORS } from "./overlay.js";
import type { BitMask } from "./rle.js";
import { ReviewSession } from "./session.js";

function el<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing element #${id}`);
  return node as T;
}

const annotator = new URLSearchParams(location.search).get("annotator") ?? "anonymous";
const api = new ApiClient("", (url, init) => fetch(url, init));
const session = new ReviewSession(api, annotator, render);

const leftCanvas = el<HTMLCanvasElement>("pane-modal");
const rightCanvas = el<HTMLCanvasElement>("pane-amodal");
const caption = el<HTMLDivElement>("caption");
const statusLine = el<HTMLDivElement>("status");
const progressLine = el<HTMLDivElement>("progress");
const yesButton = el<HTMLButtonElement>("btn-yes");
const noButton = el<HTMLButtonElement>("btn-no");
const retryButton = el<HTMLButtonElement>("btn-retry");
const roundButtons: Record<1 | 2, HTMLButtonElement> = {
  1: el<HTMLButtonElement>("btn-round1"),
  2: el<HTMLButtonElement>("btn-round2"),
};

let imageCache: { url: string; bitmap: ImageBitmap } | null = null;

async function loadImage(url: string): Promise<ImageBitmap> {
  if (imageCache && imageCache.url === url) return imageCache.bitmap;
  const resp = await fetch(url);
  if (!resp.ok) throw new Error(`image request failed (${resp.status})`);
  const bitmap = await createImageBitmap(await resp.blob());
  imageCache = { url, bitmap };
  return bitmap;
}

function overlayCanvas(mask: BitMask, color: (typeof OVERLAY_COLORS)["modal"]): HTMLCanvasElement {
  const off = document.createElement("canvas");
  off.width = mask.width;
  off.height = mask.height;
  const ctx = off.getContext("2d")!;
  ctx.putImageData(new ImageData(composeOverlay(mask, color), mask.width, mask.height), 0, 0);
  return off;
}

async function drawPane(canvas: HTMLCanvasElement, overlays: Array<[BitMask, keyof typeof OVERLAY_COLORS]>) {
  const candidate = session.candidate;
  if (!candidate) return;
  // canvases stay at the mask's native dimensions; CSS does the scaling
  const { width, height } = candidate.modal;
  canvas.width = width;
  canvas.height = height;
  const ctx = canvas.getContext("2d")!;
  ctx.clearRect(0, 0, width, height);
  try {
    const image = await loadImage(candidate.info.image_url);
    ctx.drawImage(image, 0, 0);
  } catch {
    ctx.fillStyle = "#202020";
    ctx.fillRect(0, 0, width, height);
  }
  for (const [mask, name] of overlays) {
    ctx.drawImage(overlayCanvas(mask, OVERLAY_COLORS[name]), 0, 0);
  }
}

function render(): void {
  const candidate = session.candidate;
  yesButton.disabled = session.busy || session.phase !== "showing";
  noButton.disabled = yesButton.disabled;
  retryButton.hidden = session.phase !== "error";
  roundButtons[1].classList.toggle("active", session.round === 1);
  roundButtons[2].classList.toggle("active", session.round === 2);

  if (session.phase === "empty") {
    statusLine.textContent = session.message;
    caption.textContent = "";
  } else if (session.phase === "error") {
    statusLine.textContent = session.message;
  } else if (session.phase === "showing" && candidate) {
    statusLine.textContent = session.message || `round ${session.round} - Y accept, N reject`;
    const info = candidate.info;
    caption.textContent = `${info.semantic_label} (${info.category}) - ${formatRatio(info.occlusion_ratio)}`;
    const leftOverlays: Array<[BitMask, keyof typeof OVERLAY_COLORS]> = [];
    if (session.toggles.modal) leftOverlays.push([candidate.modal, "modal"]);
    if (session.toggles.occluder) leftOverlays.push([candidate.occluder, "occluder"]);
    void drawPane(leftCanvas, leftOverlays);
    void drawPane(rightCanvas, session.toggles.amodal ? [[candidate.amodal, "amodal"]] : []);
  } else {
    statusLine.textContent = "loading...";
  }

  const progress = session.progress;
  if (progress) {
    const r1 = progress.rounds["1"];
    const r2 = progress.rounds["2"];
    progressLine.textContent =
      `round 1: ${r1.pending} pending / ${r1.yes} yes / ${r1.no} no - ` +
      `round 2: ${r2.pending} pending / ${r2.yes} yes / ${r2.no} no - ` +
      `accepted: ${progress.accepted}`;
  }
}

yesButton.addEventListener("click", () => void session.submit("yes"));
noButton.addEventListener("click", () => void session.submit("no"));
retryButton.addEventListener("click", () => void session.retry());
roundButtons[1].addEventListener("click", () => void session.selectRound(1));
roundButtons[2].addEventListener("click", () => void session.selectRound(2));
document.addEventListener("keydown", (event) => {
  if (event.ctrlKey || event.metaKey || event.altKey) return;
  void session.handleKey(event.key);
});

void session.start(1);

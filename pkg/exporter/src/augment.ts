/**
 * Seeded image augmentations: random resized crop plus horizontal flip.
 *
 * Each view derives its generator from (seed, recordId, viewIndex), so any
 * view can be regenerated in isolation and the whole export is reproducible.
 */

import { Image, makeImage } from "./ppm.js";
import { Rng, seededRng } from "./rng.js";

/** Bilinear sample of one channel at fractional coordinates, edge-clamped. */
export function sampleBilinear(img: Image, fx: number, fy: number, ch: number): number {
  fx = Math.max(0, Math.min(img.width - 1, fx));
  fy = Math.max(0, Math.min(img.height - 1, fy));
  const x0 = Math.floor(fx);
  const y0 = Math.floor(fy);
  const x1 = Math.min(img.width - 1, x0 + 1);
  const y1 = Math.min(img.height - 1, y0 + 1);
  const tx = fx - x0;
  const ty = fy - y0;
  const at = (x: number, y: number) => img.data[(y * img.width + x) * 3 + ch];
  const top = at(x0, y0) * (1 - tx) + at(x1, y0) * tx;
  const bot = at(x0, y1) * (1 - tx) + at(x1, y1) * tx;
  return top * (1 - ty) + bot * ty;
}

/** Resize a source rectangle to size x size with bilinear interpolation. */
export function cropResize(src: Image, cx: number, cy: number, cw: number,
                           ch: number, size: number): Image {
  const out = makeImage(size, size);
  for (let y = 0; y < size; y++) {
    for (let x = 0; x < size; x++) {
      const fx = cx + ((x + 0.5) / size) * cw - 0.5;
      const fy = cy + ((y + 0.5) / size) * ch - 0.5;
      const i = (y * size + x) * 3;
      out.data[i] = Math.round(sampleBilinear(src, fx, fy, 0));
      out.data[i + 1] = Math.round(sampleBilinear(src, fx, fy, 1));
      out.data[i + 2] = Math.round(sampleBilinear(src, fx, fy, 2));
    }
  }
  return out;
}

export function flipHorizontal(img: Image): Image {
  const out = makeImage(img.width, img.height);
  for (let y = 0; y < img.height; y++) {
    for (let x = 0; x < img.width; x++) {
      const si = (y * img.width + (img.width - 1 - x)) * 3;
      const di = (y * img.width + x) * 3;
      out.data[di] = img.data[si];
      out.data[di + 1] = img.data[si + 1];
      out.data[di + 2] = img.data[si + 2];
    }
  }
  return out;
}

/** Deterministic center crop to a square, resized to size x size. */
export function canonicalView(src: Image, size: number): Image {
  const side = Math.min(src.width, src.height);
  const cx = (src.width - side) / 2;
  const cy = (src.height - side) / 2;
  return cropResize(src, cx, cy, side, side, size);
}

/** Random resized crop (area 60-100%, mild aspect jitter) with a 50% flip. */
export function randomView(src: Image, size: number, rng: Rng): Image {
  const area = src.width * src.height;
  const targetArea = area * rng.uniform(0.6, 1.0);
  const aspect = Math.exp(rng.uniform(Math.log(3 / 4), Math.log(4 / 3)));
  let cw = Math.sqrt(targetArea * aspect);
  let ch = Math.sqrt(targetArea / aspect);
  cw = Math.min(cw, src.width);
  ch = Math.min(ch, src.height);
  const cx = rng.uniform(0, src.width - cw);
  const cy = rng.uniform(0, src.height - ch);
  let view = cropResize(src, cx, cy, cw, ch, size);
  if (rng.next() < 0.5) view = flipHorizontal(view);
  return view;
}

/** The generator key for one augmented view of one record. */
export function viewRng(seed: number, recordId: number, viewIndex: number): Rng {
  return seededRng(`view:${seed}:${recordId}:${viewIndex}`);
}

/**
 * Deterministic image encoder: pooled patch statistics through a fixed
 * seeded random projection, L2-normalized.
 *
 * No learned weights are involved; the projection matrix is derived from a
 * versioned key, so every export (and the class-bank prototypes) share one
 * embedding space. Images that differ in palette or texture land in
 * different directions, which is all the downstream cache needs.
 */

import { Image } from "./ppm.js";
import { seededRng } from "./rng.js";

export const GRID = 8;
export const FEATURES_PER_CELL = 4; // mean R, G, B, gradient energy
export const RAW_FEATURES = GRID * GRID * FEATURES_PER_CELL;

/** Pooled patch statistics: GRID x GRID cells x (RGB mean, gradient energy). */
export function rawFeatures(img: Image): Float64Array {
  const out = new Float64Array(RAW_FEATURES);
  const cellW = img.width / GRID;
  const cellH = img.height / GRID;
  const lum = new Float64Array(img.width * img.height);
  for (let i = 0; i < lum.length; i++) {
    lum[i] = (img.data[i * 3] + img.data[i * 3 + 1] + img.data[i * 3 + 2]) / (3 * 255);
  }
  for (let gy = 0; gy < GRID; gy++) {
    for (let gx = 0; gx < GRID; gx++) {
      const x0 = Math.floor(gx * cellW);
      const x1 = Math.floor((gx + 1) * cellW);
      const y0 = Math.floor(gy * cellH);
      const y1 = Math.floor((gy + 1) * cellH);
      let r = 0;
      let g = 0;
      let b = 0;
      let grad = 0;
      let n = 0;
      for (let y = y0; y < y1; y++) {
        for (let x = x0; x < x1; x++) {
          const i = (y * img.width + x) * 3;
          r += img.data[i] / 255;
          g += img.data[i + 1] / 255;
          b += img.data[i + 2] / 255;
          const right = x + 1 < img.width ? lum[y * img.width + x + 1] : lum[y * img.width + x];
          const down = y + 1 < img.height ? lum[(y + 1) * img.width + x] : lum[y * img.width + x];
          const here = lum[y * img.width + x];
          grad += Math.abs(right - here) + Math.abs(down - here);
          n++;
        }
      }
      const base = (gy * GRID + gx) * FEATURES_PER_CELL;
      out[base] = r / n - 0.5;
      out[base + 1] = g / n - 0.5;
      out[base + 2] = b / n - 0.5;
      out[base + 3] = grad / n;
    }
  }
  return out;
}

const projectionCache = new Map<number, Float64Array>();

/** Fixed Gaussian projection matrix (dim x RAW_FEATURES), row-major. */
export function projectionMatrix(dim: number): Float64Array {
  const cached = projectionCache.get(dim);
  if (cached) return cached;
  const rng = seededRng(`projection-v1:${dim}:${RAW_FEATURES}`);
  const mat = new Float64Array(dim * RAW_FEATURES);
  for (let i = 0; i < mat.length; i++) {
    mat[i] = rng.normal() / Math.sqrt(RAW_FEATURES);
  }
  projectionCache.set(dim, mat);
  return mat;
}

/** Encode one image to a unit-norm embedding of the requested dimension. */
export function encodeImage(img: Image, dim: number): Float64Array {
  if (dim < 1) throw new Error(`embedding dimension must be >= 1, got ${dim}`);
  const feats = rawFeatures(img);
  const mat = projectionMatrix(dim);
  const out = new Float64Array(dim);
  for (let d = 0; d < dim; d++) {
    let acc = 0;
    const row = d * RAW_FEATURES;
    for (let f = 0; f < RAW_FEATURES; f++) {
      acc += mat[row + f] * feats[f];
    }
    out[d] = acc;
  }
  let norm = 0;
  for (let d = 0; d < dim; d++) norm += out[d] * out[d];
  norm = Math.sqrt(norm);
  if (norm === 0) throw new Error("image encoded to a zero vector");
  for (let d = 0; d < dim; d++) out[d] /= norm;
  return out;
}

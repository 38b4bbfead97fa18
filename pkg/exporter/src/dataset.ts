/**
 * Synthetic labeled image dataset generator.
 *
 * Each class owns a palette and a stripe pattern (angle + frequency); each
 * image jitters phase, brightness, and noise so instances of one class are
 * similar without being identical. Output is a directory of P6 PPM files
 * plus a labels.json manifest:
 *
 *   {"classes": ["class00", ...],
 *    "images": [{"file": "class00_000.ppm", "label": 0}, ...]}
 */

import * as fs from "node:fs";
import * as path from "node:path";
import { Image, makeImage, encodePpm } from "./ppm.js";
import { Rng, seededRng } from "./rng.js";

export interface DatasetSpec {
  classes: number;
  perClass: number;
  size: number;
  seed: number;
}

export interface DatasetManifest {
  classes: string[];
  images: { file: string; label: number }[];
}

function clamp01(v: number): number {
  return v < 0 ? 0 : v > 1 ? 1 : v;
}

/** HSV (h in [0,1)) to RGB in [0,1]. */
function hsvToRgb(h: number, s: number, v: number): [number, number, number] {
  const i = Math.floor(h * 6);
  const f = h * 6 - i;
  const p = v * (1 - s);
  const q = v * (1 - f * s);
  const t = v * (1 - (1 - f) * s);
  switch (((i % 6) + 6) % 6) {
    case 0: return [v, t, p];
    case 1: return [q, v, p];
    case 2: return [p, v, t];
    case 3: return [p, q, v];
    case 4: return [t, p, v];
    default: return [v, p, t];
  }
}

/** Class pattern identity: hue, stripe frequency, stripe angle. */
function classPattern(numClasses: number, classIndex: number) {
  return {
    hue: classIndex / numClasses,
    freq: 2 + (classIndex % 5) * 1.5,
    angle: (classIndex * Math.PI) / Math.max(3, numClasses),
  };
}

function renderPattern(
  numClasses: number,
  classIndex: number,
  size: number,
  hueShift: number,
  phase: number,
  bright: number,
  noise: Rng | null,
): Image {
  const { hue, freq, angle } = classPattern(numClasses, classIndex);
  const img = makeImage(size, size);
  const h = (hue + hueShift + 1) % 1;
  const noiseAmp = 0.04;
  const cosA = Math.cos(angle);
  const sinA = Math.sin(angle);
  for (let y = 0; y < size; y++) {
    for (let x = 0; x < size; x++) {
      const u = x / size;
      const v = y / size;
      const t = u * cosA + v * sinA;
      const wave = 0.5 + 0.5 * Math.sin(2 * Math.PI * freq * t + phase);
      const value = bright * (0.45 + 0.5 * wave);
      const sat = 0.55 + 0.3 * wave;
      let [r, g, b] = hsvToRgb(h, sat, value);
      if (noise) {
        r = clamp01(r + noiseAmp * (noise.next() - 0.5));
        g = clamp01(g + noiseAmp * (noise.next() - 0.5));
        b = clamp01(b + noiseAmp * (noise.next() - 0.5));
      }
      const i = (y * size + x) * 3;
      img.data[i] = Math.round(r * 255);
      img.data[i + 1] = Math.round(g * 255);
      img.data[i + 2] = Math.round(b * 255);
    }
  }
  return img;
}

/** Render one jittered dataset image for (classIndex, imageIndex). */
export function renderImage(spec: DatasetSpec, classIndex: number, imageIndex: number): Image {
  const rng = seededRng(`img:${spec.seed}:${classIndex}:${imageIndex}`);
  const hueShift = rng.uniform(-0.02, 0.02);
  const phase = rng.uniform(0, 2 * Math.PI);
  const bright = rng.uniform(0.75, 1.0);
  return renderPattern(spec.classes, classIndex, spec.size, hueShift, phase, bright, rng);
}

/** Jitter-free class anchor image; depends only on (numClasses, classIndex, size). */
export function prototypeImage(numClasses: number, classIndex: number, size: number): Image {
  return renderPattern(numClasses, classIndex, size, 0, 0, 0.9, null);
}

/** Generate the dataset directory and return its manifest. */
export function generateDataset(outDir: string, spec: DatasetSpec): DatasetManifest {
  if (spec.classes < 2) throw new Error(`need at least 2 classes, got ${spec.classes}`);
  if (spec.perClass < 1) throw new Error(`need at least 1 image per class, got ${spec.perClass}`);
  if (spec.size < 16) throw new Error(`image size must be >= 16, got ${spec.size}`);
  fs.mkdirSync(outDir, { recursive: true });
  const classes: string[] = [];
  const images: { file: string; label: number }[] = [];
  for (let c = 0; c < spec.classes; c++) {
    classes.push(`class${String(c).padStart(2, "0")}`);
  }
  for (let c = 0; c < spec.classes; c++) {
    for (let i = 0; i < spec.perClass; i++) {
      const file = `${classes[c]}_${String(i).padStart(3, "0")}.ppm`;
      const img = renderImage(spec, c, i);
      fs.writeFileSync(path.join(outDir, file), encodePpm(img));
      images.push({ file, label: c });
    }
  }
  const manifest: DatasetManifest = { classes, images };
  fs.writeFileSync(
    path.join(outDir, "labels.json"),
    JSON.stringify(manifest, null, 2) + "\n",
  );
  return manifest;
}

/** Load a dataset manifest, validating structure. */
export function loadManifest(dir: string): DatasetManifest {
  const file = path.join(dir, "labels.json");
  let parsed: unknown;
  try {
    parsed = JSON.parse(fs.readFileSync(file, "utf8"));
  } catch (err) {
    throw new Error(`cannot read manifest ${file}: ${(err as Error).message}`);
  }
  const m = parsed as DatasetManifest;
  if (!Array.isArray(m.classes) || !Array.isArray(m.images)) {
    throw new Error(`manifest ${file} must hold "classes" and "images" arrays`);
  }
  if (m.classes.length < 2) throw new Error("manifest needs at least 2 classes");
  for (const entry of m.images) {
    if (typeof entry.file !== "string") throw new Error("image entry missing file");
    if (!Number.isInteger(entry.label) || entry.label < 0 || entry.label >= m.classes.length) {
      throw new Error(`label ${entry.label} out of range for ${m.classes.length} classes`);
    }
  }
  return m;
}

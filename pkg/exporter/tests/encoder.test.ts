import { describe, expect, it } from "vitest";
import { encodeImage, projectionMatrix, rawFeatures, RAW_FEATURES } from "../src/encoder.js";
import { makeImage, setPixel, Image } from "../src/ppm.js";
import { prototypeImage } from "../src/dataset.js";

function solidImage(size: number, r: number, g: number, b: number): Image {
  const img = makeImage(size, size);
  for (let y = 0; y < size; y++) {
    for (let x = 0; x < size; x++) setPixel(img, x, y, r, g, b);
  }
  return img;
}

function dot(a: Float64Array, b: Float64Array): number {
  let acc = 0;
  for (let i = 0; i < a.length; i++) acc += a[i] * b[i];
  return acc;
}

describe("rawFeatures", () => {
  it("produces the documented feature count", () => {
    expect(rawFeatures(solidImage(64, 120, 60, 30)).length).toBe(RAW_FEATURES);
  });

  it("solid images have zero gradient energy and centered means", () => {
    const feats = rawFeatures(solidImage(64, 255, 0, 128));
    for (let cell = 0; cell < RAW_FEATURES / 4; cell++) {
      expect(feats[cell * 4]).toBeCloseTo(0.5, 6); // R mean - 0.5
      expect(feats[cell * 4 + 1]).toBeCloseTo(-0.5, 6); // G mean - 0.5
      expect(feats[cell * 4 + 3]).toBeCloseTo(0, 10); // gradient energy
    }
  });
});

describe("projectionMatrix", () => {
  it("is cached and identical across calls", () => {
    const a = projectionMatrix(24);
    const b = projectionMatrix(24);
    expect(b).toBe(a);
  });

  it("differs across dimensions", () => {
    expect(projectionMatrix(8)[0]).not.toBe(projectionMatrix(16)[0]);
  });
});

describe("encodeImage", () => {
  it("returns a unit-norm vector of the requested dimension", () => {
    const z = encodeImage(solidImage(64, 10, 200, 90), 24);
    expect(z.length).toBe(24);
    expect(Math.sqrt(dot(z, z))).toBeCloseTo(1, 10);
  });

  it("is deterministic", () => {
    const img = prototypeImage(5, 2, 64);
    expect(Array.from(encodeImage(img, 24))).toEqual(Array.from(encodeImage(img, 24)));
  });

  it("separates different class prototypes", () => {
    const z0 = encodeImage(prototypeImage(5, 0, 64), 24);
    const z1 = encodeImage(prototypeImage(5, 1, 64), 24);
    expect(dot(z0, z1)).toBeLessThan(0.99);
  });

  it("keeps a prototype closest to itself among all prototypes", () => {
    const protos = Array.from({ length: 5 }, (_, c) =>
      encodeImage(prototypeImage(5, c, 64), 24),
    );
    for (let c = 0; c < 5; c++) {
      for (let other = 0; other < 5; other++) {
        if (other === c) continue;
        expect(dot(protos[c], protos[c])).toBeGreaterThan(dot(protos[c], protos[other]));
      }
    }
  });

  it("rejects dimension < 1", () => {
    expect(() => encodeImage(solidImage(32, 1, 2, 3), 0)).toThrow(/dimension/);
  });
});

/**
 * Deterministic random numbers from string keys.
 *
 * Every consumer derives its own generator from a descriptive key such as
 * `view:7:12:3`, so the stream for one record never depends on how many
 * draws another record consumed.
 */

/** 32-bit FNV-1a hash of a string, for turning keys into seeds. */
export function hashKey(key: string): number {
  let h = 0x811c9dc5;
  for (let i = 0; i < key.length; i++) {
    h ^= key.charCodeAt(i);
    h = Math.imul(h, 0x01000193);
  }
  return h >>> 0;
}

export interface Rng {
  /** Uniform float in [0, 1). */
  next(): number;
  /** Uniform integer in [lo, hi). */
  int(lo: number, hi: number): number;
  /** Uniform float in [lo, hi). */
  uniform(lo: number, hi: number): number;
  /** Standard normal via Box-Muller. */
  normal(): number;
}

/** mulberry32 generator seeded by a string key. */
export function seededRng(key: string): Rng {
  let state = hashKey(key) || 0x9e3779b9;
  const next = (): number => {
    state = (state + 0x6d2b79f5) >>> 0;
    let t = state;
    t = Math.imul(t ^ (t >>> 15), t | 1);
    t ^= t + Math.imul(t ^ (t >>> 7), t | 61);
    return ((t ^ (t >>> 14)) >>> 0) / 4294967296;
  };
  let spare: number | null = null;
  return {
    next,
    int(lo: number, hi: number): number {
      if (hi <= lo) throw new Error(`empty integer range [${lo}, ${hi})`);
      return lo + Math.floor(next() * (hi - lo));
    },
    uniform(lo: number, hi: number): number {
      return lo + next() * (hi - lo);
    },
    normal(): number {
      if (spare !== null) {
        const out = spare;
        spare = null;
        return out;
      }
      // Box-Muller on (0, 1]-safe uniforms
      const u = 1 - next();
      const v = next();
      const r = Math.sqrt(-2 * Math.log(u));
      spare = r * Math.sin(2 * Math.PI * v);
      return r * Math.cos(2 * Math.PI * v);
    },
  };
}

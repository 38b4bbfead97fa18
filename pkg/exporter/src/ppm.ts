/**
 * Binary PPM (P6) image codec: 8-bit RGB, row-major, no external libraries.
 */

export interface Image {
  width: number;
  height: number;
  /** RGB bytes, length = width * height * 3. */
  data: Uint8Array;
}

export function makeImage(width: number, height: number): Image {
  if (width < 1 || height < 1) throw new Error(`bad image size ${width}x${height}`);
  return { width, height, data: new Uint8Array(width * height * 3) };
}

export function encodePpm(img: Image): Buffer {
  const expected = img.width * img.height * 3;
  if (img.data.length !== expected) {
    throw new Error(`image data holds ${img.data.length} bytes, expected ${expected}`);
  }
  const header = Buffer.from(`P6\n${img.width} ${img.height}\n255\n`, "ascii");
  return Buffer.concat([header, Buffer.from(img.data)]);
}

/** Parse a P6 buffer; handles whitespace and # comments in the header. */
export function parsePpm(buf: Buffer): Image {
  if (buf.length < 2 || buf[0] !== 0x50 || buf[1] !== 0x36) {
    throw new Error("not a P6 PPM file");
  }
  let pos = 2;
  const isSpace = (b: number) => b === 0x20 || b === 0x09 || b === 0x0a || b === 0x0d;
  const nextToken = (): number => {
    for (;;) {
      while (pos < buf.length && isSpace(buf[pos])) pos++;
      if (pos < buf.length && buf[pos] === 0x23) {
        while (pos < buf.length && buf[pos] !== 0x0a) pos++;
        continue;
      }
      break;
    }
    const start = pos;
    while (pos < buf.length && !isSpace(buf[pos])) pos++;
    if (start === pos) throw new Error("truncated PPM header");
    const value = Number(buf.subarray(start, pos).toString("ascii"));
    if (!Number.isInteger(value) || value < 0) {
      throw new Error(`bad PPM header token at byte ${start}`);
    }
    return value;
  };
  const width = nextToken();
  const height = nextToken();
  const maxval = nextToken();
  if (maxval !== 255) throw new Error(`unsupported maxval ${maxval}, expected 255`);
  pos++; // exactly one whitespace byte separates header and pixels
  const expected = width * height * 3;
  if (buf.length - pos < expected) {
    throw new Error(`pixel payload holds ${buf.length - pos} bytes, expected ${expected}`);
  }
  return { width, height, data: new Uint8Array(buf.subarray(pos, pos + expected)) };
}

export function getPixel(img: Image, x: number, y: number): [number, number, number] {
  const i = (y * img.width + x) * 3;
  return [img.data[i], img.data[i + 1], img.data[i + 2]];
}

export function setPixel(img: Image, x: number, y: number,
                         r: number, g: number, b: number): void {
  const i = (y * img.width + x) * 3;
  img.data[i] = Math.max(0, Math.min(255, Math.round(r)));
  img.data[i + 1] = Math.max(0, Math.min(255, Math.round(g)));
  img.data[i + 2] = Math.max(0, Math.min(255, Math.round(b)));
}

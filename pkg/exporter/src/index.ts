export { hashKey, seededRng, Rng } from "./rng.js";
export { Image, makeImage, encodePpm, parsePpm, getPixel, setPixel } from "./ppm.js";
export {
  sampleBilinear,
  cropResize,
  flipHorizontal,
  canonicalView,
  randomView,
  viewRng,
} from "./augment.js";
export {
  GRID,
  FEATURES_PER_CELL,
  RAW_FEATURES,
  rawFeatures,
  projectionMatrix,
  encodeImage,
} from "./encoder.js";
export {
  MAGIC,
  VERSION,
  HEADER_BYTES,
  FLAG_TRUTHS,
  EmbsRecord,
  EmbsStream,
  ClassBank,
  encodeEmbs,
  decodeEmbs,
  bankRawPath,
  encodeBank,
} from "./embs.js";
export {
  DatasetSpec,
  DatasetManifest,
  renderImage,
  prototypeImage,
  generateDataset,
  loadManifest,
} from "./dataset.js";
export { ExportSpec, ExportResult, exportDataset } from "./export.js";

#!/usr/bin/env node
/**
 * embs-exporter command line.
 *
 *   embs-exporter gen-dataset --out data/ --classes 5 --per-class 10 --seed 7
 *   embs-exporter export --dataset data/ --out run.embs --bank-out bank.json \
 *       --views 8 --dim 24 --seed 7
 *
 * Exit codes: 0 success, 1 usage error, 2 data or I/O error.
 */

import yargs from "yargs";
import { hideBin } from "yargs/helpers";
import { generateDataset } from "./dataset.js";
import { exportDataset } from "./export.js";

export async function main(argv: string[]): Promise<number> {
  let exitCode = 0;
  const parser = yargs(argv)
    .scriptName("embs-exporter")
    .strict()
    .exitProcess(false)
    .fail((msg, err) => {
      throw err ?? new UsageError(msg ?? "invalid arguments");
    })
    .command(
      "gen-dataset",
      "render a synthetic labeled PPM dataset",
      (y) =>
        y
          .option("out", { type: "string", demandOption: true, describe: "output directory" })
          .option("classes", { type: "number", default: 5, describe: "number of classes" })
          .option("per-class", { type: "number", default: 10, describe: "images per class" })
          .option("size", { type: "number", default: 96, describe: "image side in pixels" })
          .option("seed", { type: "number", default: 0, describe: "generation seed" }),
      (args) => {
        const manifest = generateDataset(args.out, {
          classes: args.classes,
          perClass: args["per-class"],
          size: args.size,
          seed: args.seed,
        });
        process.stdout.write(
          `wrote ${manifest.images.length} images across ` +
            `${manifest.classes.length} classes to ${args.out}\n`,
        );
      },
    )
    .command(
      "export",
      "encode a dataset directory into an EMBS stream plus class bank",
      (y) =>
        y
          .option("dataset", { type: "string", demandOption: true, describe: "dataset directory" })
          .option("out", { type: "string", demandOption: true, describe: "EMBS stream path" })
          .option("bank-out", { type: "string", demandOption: true, describe: "bank manifest path" })
          .option("views", { type: "number", default: 8, describe: "augmented views per record" })
          .option("dim", { type: "number", default: 24, describe: "embedding dimension" })
          .option("seed", { type: "number", default: 0, describe: "view sampling seed" })
          .option("view-size", { type: "number", default: 64, describe: "encoder raster size" }),
      (args) => {
        const result = exportDataset(args.dataset, args.out, args["bank-out"], {
          views: args.views,
          dim: args.dim,
          seed: args.seed,
          viewSize: args["view-size"],
        });
        process.stdout.write(
          `exported ${result.records} records (${result.labeled} labeled, ` +
            `${result.views} views each, dim ${result.dim}, ` +
            `${result.classes} bank classes, ${result.streamBytes} bytes) to ${args.out}\n`,
        );
      },
    )
    .demandCommand(1, "a command is required")
    .help();
  try {
    await parser.parseAsync();
  } catch (err) {
    if (err instanceof UsageError) {
      process.stderr.write(`usage error: ${err.message}\n`);
      exitCode = 1;
    } else {
      process.stderr.write(`error: ${(err as Error).message}\n`);
      exitCode = 2;
    }
  }
  return exitCode;
}

class UsageError extends Error {}

const entry = process.argv[1] ?? "";
if (entry.endsWith("cli.js") || entry.endsWith("embs-exporter")) {
  main(hideBin(process.argv)).then((code) => {
    process.exitCode = code;
  });
}

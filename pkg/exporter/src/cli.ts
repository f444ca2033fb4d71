#!/usr/bin/env node
/** Command line entry: `embed-export export --corpus ... --model ... --out ...`. */

import { realpathSync } from "node:fs";
import { fileURLToPath } from "node:url";

import yargs from "yargs";
import { hideBin } from "yargs/helpers";

import { exportEmbeddings } from "./exporter.js";

export async function main(argv: string[]): Promise<void> {
  await yargs(argv)
    .scriptName("embed-export")
    .command(
      "export",
      "embed every corpus sentence into the engine's binary embedding format",
      (cmd) =>
        cmd
          .option("corpus", {
            type: "string",
            demandOption: true,
            describe: "corpus JSONL path",
          })
          .option("model", {
            type: "string",
            demandOption: true,
            describe: "model id: hash-<dim> or a hub id like org/name",
          })
          .option("out", {
            type: "string",
            demandOption: true,
            describe: "output embedding file path",
          })
          .option("batch", {
            type: "number",
            default: 64,
            describe: "sentences per inference batch",
          }),
      async (args) => {
        try {
          const manifest = await exportEmbeddings(args.corpus, args.model, args.out, {
            batchSize: args.batch,
          });
          console.log(
            `wrote ${manifest.count} vectors (dim ${manifest.dim}) to ${manifest.out}`,
          );
        } catch (err) {
          console.error(`error: ${(err as Error).message}`);
          process.exit(1);
        }
      },
    )
    .demandCommand(1)
    .strict()
    .fail((msg) => {
      console.error(`error: ${msg}`);
      process.exit(2);
    })
    .parseAsync();
}

const invokedDirectly = (() => {
  if (process.argv[1] === undefined) {
    return false;
  }
  try {
    return realpathSync(process.argv[1]) === fileURLToPath(import.meta.url);
  } catch {
    return false;
  }
})();
if (invokedDirectly) {
  main(hideBin(process.argv));
}

#!/usr/bin/env node
/**
 * Figure renderer for wavedelay CSV output.
 *
 *   wavedelay-render render --family energy --inputs "sweeps/*_energy.csv" --out energy.png
 *
 * Families: energy | neg-log-energy | rate | profile.
 * Exit codes: 0 success, 1 usage or input error.
 */

import { parseArgs } from "node:util";
import { pathToFileURL } from "node:url";

import { FAMILIES, Family, render } from "./figures.js";
import { expandInputs } from "./glob.js";

export function main(argv: string[]): number {
  let parsed;
  try {
    parsed = parseArgs({
      args: argv,
      allowPositionals: true,
      options: {
        family: { type: "string" },
        inputs: { type: "string" },
        out: { type: "string" },
        "skip-until": { type: "string" },
        width: { type: "string" },
        height: { type: "string" },
        title: { type: "string" },
      },
    });
  } catch (error) {
    console.error(`usage error: ${(error as Error).message}`);
    return 1;
  }
  const { values, positionals } = parsed;
  if (positionals.length !== 1 || positionals[0] !== "render") {
    console.error('usage: wavedelay-render render --family F --inputs GLOB --out PATH');
    return 1;
  }
  if (!values.family || !values.inputs || !values.out) {
    console.error("render needs --family, --inputs, and --out");
    return 1;
  }
  if (!FAMILIES.includes(values.family as Family)) {
    console.error(`unknown family "${values.family}"; expected one of ${FAMILIES.join(", ")}`);
    return 1;
  }
  let count = 0;
  try {
    const inputs = expandInputs(values.inputs);
    count = inputs.length;
    render({
      family: values.family as Family,
      inputs,
      out: values.out,
      skipUntil: values["skip-until"] !== undefined ? Number(values["skip-until"]) : undefined,
      width: values.width !== undefined ? Number(values.width) : undefined,
      height: values.height !== undefined ? Number(values.height) : undefined,
      title: values.title,
    });
  } catch (error) {
    console.error((error as Error).message);
    return 1;
  }
  console.log(`wrote ${values.out} (${values.family}, ${count} inputs)`);
  return 0;
}

if (process.argv[1] && import.meta.url === pathToFileURL(process.argv[1]).href) {
  process.exit(main(process.argv.slice(2)));
}

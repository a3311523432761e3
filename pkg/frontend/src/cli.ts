#!/usr/bin/env node
/**
 * Figure generation CLI for simulator artifacts.
 *
 *   plot lambda2 --in RUN1/steps.csv RUN2/steps.csv --out fig.svg [--labels a,b]
 *   plot paths   --in RUN/trajectory.csv --out fig.svg [--rho2 3.0]
 *   plot nsize   --in RUN/trajectory.csv --out fig.svg
 */

import { writeFileSync } from "fs";

import { SchemaError } from "./csv";
import { plotLambda2 } from "./lambda2";
import { plotSizes } from "./nsize";
import { plotPaths } from "./paths";

const USAGE = `usage: plot lambda2|paths|nsize --in <files...> --out <file> [options]

kinds:
  lambda2   connectivity vs step (log k axis), one curve per steps.csv
  paths     agent trajectories with final graph, from one trajectory.csv
  nsize     per-agent neighborhood size vs step, from one trajectory.csv

options:
  --in <files...>   input CSV file(s)
  --out <file>      output SVG file
  --labels <a,b,..> legend labels for lambda2 (default: run directory names)
  --rho2 <r>        interaction radius for final edges in paths (default 3.0)
  --title <t>       figure title
`;

interface Args {
  kind: string;
  inFiles: string[];
  out?: string;
  labels?: string[];
  rho2: number;
  title?: string;
}

class UsageError extends Error {}

export function parseCliArgs(argv: string[]): Args {
  if (argv.length === 0) throw new UsageError("missing plot kind");
  const kind = argv[0];
  if (!["lambda2", "paths", "nsize"].includes(kind)) {
    throw new UsageError(`unknown plot kind: ${kind}`);
  }
  const args: Args = { kind, inFiles: [], rho2: 3.0 };
  let i = 1;
  const takeOne = (flag: string): string => {
    if (i >= argv.length || argv[i].startsWith("--")) {
      throw new UsageError(`${flag} needs a value`);
    }
    return argv[i++];
  };
  while (i < argv.length) {
    const tok = argv[i++];
    if (tok === "--in") {
      while (i < argv.length && !argv[i].startsWith("--")) args.inFiles.push(argv[i++]);
      if (args.inFiles.length === 0) throw new UsageError("--in needs at least one file");
    } else if (tok === "--out") {
      args.out = takeOne("--out");
    } else if (tok === "--labels") {
      args.labels = takeOne("--labels").split(",");
    } else if (tok === "--rho2") {
      const v = Number(takeOne("--rho2"));
      if (!(v > 0)) throw new UsageError("--rho2 must be a positive number");
      args.rho2 = v;
    } else if (tok === "--title") {
      args.title = takeOne("--title");
    } else {
      throw new UsageError(`unknown argument: ${tok}`);
    }
  }
  if (args.inFiles.length === 0) throw new UsageError("--in is required");
  if (!args.out) throw new UsageError("--out is required");
  if (kind !== "lambda2" && args.inFiles.length !== 1) {
    throw new UsageError(`${kind} takes exactly one trajectory file`);
  }
  return args;
}

export function main(argv: string[]): number {
  if (argv.includes("--help") || argv.includes("-h")) {
    process.stdout.write(USAGE);
    return 0;
  }
  let args: Args;
  try {
    args = parseCliArgs(argv);
  } catch (err) {
    process.stderr.write(`error: ${(err as Error).message}\n`);
    process.stderr.write(USAGE);
    return 2;
  }
  try {
    let svg: string;
    if (args.kind === "lambda2") {
      svg = plotLambda2(args.inFiles, args.labels, args.title);
    } else if (args.kind === "paths") {
      svg = plotPaths(args.inFiles[0], args.rho2, args.title);
    } else {
      svg = plotSizes(args.inFiles[0], args.title);
    }
    writeFileSync(args.out!, svg);
    process.stdout.write(`wrote ${args.out}\n`);
    return 0;
  } catch (err) {
    if (err instanceof SchemaError || err instanceof Error) {
      process.stderr.write(`error: ${(err as Error).message}\n`);
      return 2;
    }
    throw err;
  }
}

if (require.main === module) {
  process.exit(main(process.argv.slice(2)));
}

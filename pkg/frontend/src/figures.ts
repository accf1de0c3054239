/**
 * The four figure families regenerated from simulator CSV output:
 *
 *   energy          E(t) per run
 *   neg-log-energy  -ln E(t) per run (slope = exponential decay rate)
 *   rate            -ln E(t)/t per run (asymptotically horizontal)
 *   profile         u(x) snapshots
 *
 * The rate family drops the initial window where the free phase
 * dominates the quotient; the default cut is t < 2, the delay of the
 * unit-length reference experiments, and is configurable per spec.
 */

import { mkdirSync, writeFileSync } from "node:fs";
import { dirname } from "node:path";

import { labelFor, readEnergyCsv, readProfileCsv } from "./csv.js";
import { encodePng } from "./png.js";
import { plot, Series } from "./raster.js";

export const FAMILIES = ["energy", "neg-log-energy", "rate", "profile"] as const;
export type Family = (typeof FAMILIES)[number];

export interface FigureSpec {
  family: Family;
  inputs: string[];
  out: string;
  skipUntil?: number; // rate family: drop records with t < skipUntil
  width?: number;
  height?: number;
  title?: string;
}

const DEFAULT_SKIP_UNTIL = 2.0;

function energySeries(path: string): Series {
  const trace = readEnergyCsv(path);
  return { label: labelFor(path), x: trace.t, y: trace.eTotal };
}

function negLogSeries(path: string): Series {
  const trace = readEnergyCsv(path);
  const x: number[] = [];
  const y: number[] = [];
  for (let i = 0; i < trace.t.length; i++) {
    if (trace.eTotal[i] > 0) {
      x.push(trace.t[i]);
      y.push(-Math.log(trace.eTotal[i]));
    }
  }
  return { label: labelFor(path), x, y };
}

function rateSeries(path: string, skipUntil: number): Series {
  const trace = readEnergyCsv(path);
  const x: number[] = [];
  const y: number[] = [];
  for (let i = 0; i < trace.t.length; i++) {
    if (trace.t[i] >= skipUntil && trace.t[i] > 0 && trace.eTotal[i] > 0) {
      x.push(trace.t[i]);
      y.push(-Math.log(trace.eTotal[i]) / trace.t[i]);
    }
  }
  return { label: labelFor(path), x, y };
}

function profileSeries(path: string): Series {
  const profile = readProfileCsv(path);
  return { label: labelFor(path), x: profile.x, y: profile.u };
}

const FAMILY_SETTINGS: Record<Family, { title: string; xLabel: string; yLabel: string }> = {
  energy: { title: "ENERGY", xLabel: "t", yLabel: "E(t)" },
  "neg-log-energy": { title: "-LN ENERGY", xLabel: "t", yLabel: "-ln E(t)" },
  rate: { title: "DECAY RATE", xLabel: "t", yLabel: "-ln E(t)/t" },
  profile: { title: "PROFILE", xLabel: "x", yLabel: "u(x)" },
};

/** Render one figure; returns the PNG bytes that were written. */
export function render(spec: FigureSpec): Buffer {
  if (!FAMILIES.includes(spec.family)) {
    throw new Error(`unknown family "${spec.family}"; expected one of ${FAMILIES.join(", ")}`);
  }
  if (spec.inputs.length === 0) throw new Error("no input files");
  const skipUntil = spec.skipUntil ?? DEFAULT_SKIP_UNTIL;
  const series = spec.inputs.map((path) => {
    switch (spec.family) {
      case "energy":
        return energySeries(path);
      case "neg-log-energy":
        return negLogSeries(path);
      case "rate":
        return rateSeries(path, skipUntil);
      case "profile":
        return profileSeries(path);
    }
  });
  const settings = FAMILY_SETTINGS[spec.family];
  const raster = plot({
    title: spec.title ?? settings.title,
    xLabel: settings.xLabel,
    yLabel: settings.yLabel,
    series,
    width: spec.width ?? 900,
    height: spec.height ?? 540,
  });
  const png = encodePng(raster.width, raster.height, raster.pixels);
  mkdirSync(dirname(spec.out) || ".", { recursive: true });
  writeFileSync(spec.out, png);
  return png;
}

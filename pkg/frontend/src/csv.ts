/**
 * Readers for the simulator's CSV output.
 *
 * Two schemas exist: energy traces (step,t,e_kinetic,e_potential,e_total)
 * and solution profiles (x,u). Parsing is strict; a mismatched header
 * names the offending column so a wrong input fails loudly.
 */

import { readFileSync } from "node:fs";

export interface EnergyTrace {
  step: number[];
  t: number[];
  eKinetic: number[];
  ePotential: number[];
  eTotal: number[];
}

export interface Profile {
  x: number[];
  u: number[];
}

export const ENERGY_HEADER = ["step", "t", "e_kinetic", "e_potential", "e_total"];
export const PROFILE_HEADER = ["x", "u"];

function splitLines(text: string): string[] {
  const lines = text.split("\n");
  while (lines.length > 0 && lines[lines.length - 1].trim() === "") lines.pop();
  return lines;
}

function checkHeader(actual: string[], expected: string[], path: string): void {
  for (let i = 0; i < expected.length; i++) {
    if (actual[i] !== expected[i]) {
      throw new Error(
        `${path}: unexpected column ${i + 1}: got "${actual[i] ?? ""}", expected "${expected[i]}"`,
      );
    }
  }
  if (actual.length !== expected.length) {
    throw new Error(
      `${path}: unexpected extra column "${actual[expected.length]}"`,
    );
  }
}

function parseNumber(field: string, column: string, line: number, path: string): number {
  const value = Number(field);
  if (field.trim() === "" || Number.isNaN(value)) {
    throw new Error(`${path}:${line}: column "${column}" is not numeric: "${field}"`);
  }
  return value;
}

export function readEnergyCsv(path: string): EnergyTrace {
  const lines = splitLines(readFileSync(path, "utf-8"));
  if (lines.length === 0) throw new Error(`${path}: empty file`);
  checkHeader(lines[0].split(","), ENERGY_HEADER, path);
  const out: EnergyTrace = { step: [], t: [], eKinetic: [], ePotential: [], eTotal: [] };
  for (let i = 1; i < lines.length; i++) {
    const fields = lines[i].split(",");
    if (fields.length !== ENERGY_HEADER.length) {
      throw new Error(`${path}:${i + 1}: expected ${ENERGY_HEADER.length} fields, got ${fields.length}`);
    }
    out.step.push(parseNumber(fields[0], "step", i + 1, path));
    out.t.push(parseNumber(fields[1], "t", i + 1, path));
    out.eKinetic.push(parseNumber(fields[2], "e_kinetic", i + 1, path));
    out.ePotential.push(parseNumber(fields[3], "e_potential", i + 1, path));
    out.eTotal.push(parseNumber(fields[4], "e_total", i + 1, path));
  }
  return out;
}

export function readProfileCsv(path: string): Profile {
  const lines = splitLines(readFileSync(path, "utf-8"));
  if (lines.length === 0) throw new Error(`${path}: empty file`);
  checkHeader(lines[0].split(","), PROFILE_HEADER, path);
  const out: Profile = { x: [], u: [] };
  for (let i = 1; i < lines.length; i++) {
    const fields = lines[i].split(",");
    if (fields.length !== PROFILE_HEADER.length) {
      throw new Error(`${path}:${i + 1}: expected 2 fields, got ${fields.length}`);
    }
    out.x.push(parseNumber(fields[0], "x", i + 1, path));
    out.u.push(parseNumber(fields[1], "u", i + 1, path));
  }
  return out;
}

/** Label for the legend: the mu token from the file name, else the stem. */
export function labelFor(path: string): string {
  const stem = path.split("/").pop()!.replace(/\.csv$/, "");
  const match = stem.match(/mu(-?[0-9.]+)/);
  if (match) return `mu=${match[1]}`;
  return stem.replace(/_energy$|_profile.*$/, "");
}

/**
 * Minimal glob expansion: `*` and `?` inside path segments.
 *
 * Enough for the renderer's `--inputs "sweeps/*_energy.csv"` usage; no
 * `**`, braces, or character classes. Matches are returned sorted so
 * figure legends and colors are stable across runs.
 */

import { readdirSync, statSync } from "node:fs";
import { join } from "node:path";

function segmentToRegex(segment: string): RegExp {
  const escaped = segment.replace(/[.+^${}()|[\]\\]/g, "\\$&");
  return new RegExp("^" + escaped.replace(/\*/g, ".*").replace(/\?/g, ".") + "$");
}

export function expandGlob(pattern: string): string[] {
  const segments = pattern.split("/");
  let roots: string[] = pattern.startsWith("/") ? ["/"] : ["."];
  if (pattern.startsWith("/")) segments.shift();

  for (const segment of segments) {
    if (segment === "" || segment === ".") continue;
    const next: string[] = [];
    if (!segment.includes("*") && !segment.includes("?")) {
      for (const root of roots) next.push(root === "." ? segment : join(root, segment));
    } else {
      const regex = segmentToRegex(segment);
      for (const root of roots) {
        let entries: string[];
        try {
          entries = readdirSync(root === "." ? "." : root);
        } catch {
          continue;
        }
        for (const entry of entries.sort()) {
          if (regex.test(entry)) next.push(root === "." ? entry : join(root, entry));
        }
      }
    }
    roots = next;
  }
  return roots.filter((p) => {
    try {
      return statSync(p).isFile() || statSync(p).isDirectory();
    } catch {
      return false;
    }
  }).sort();
}

/** Expand a comma-separated list of globs/paths into existing files. */
export function expandInputs(spec: string): string[] {
  const out: string[] = [];
  for (const part of spec.split(",")) {
    const trimmed = part.trim();
    if (trimmed === "") continue;
    const matches = expandGlob(trimmed);
    if (matches.length === 0) throw new Error(`no files match "${trimmed}"`);
    out.push(...matches);
  }
  return out;
}

/**
 * Small software raster: pixels, lines, bitmap text, and an axes frame
 * with tick marks. Everything the figure families need and nothing else.
 */

import { GLYPH_HEIGHT, GLYPH_WIDTH, glyphRows, textWidth } from "./font.js";

export type Rgb = [number, number, number];

export const PALETTE: Rgb[] = [
  [31, 119, 180],
  [255, 127, 14],
  [44, 160, 44],
  [214, 39, 40],
  [148, 103, 189],
  [140, 86, 75],
  [227, 119, 194],
  [127, 127, 127],
  [188, 189, 34],
  [23, 190, 207],
];

export class Raster {
  readonly width: number;
  readonly height: number;
  readonly pixels: Uint8Array;

  constructor(width: number, height: number) {
    this.width = width;
    this.height = height;
    this.pixels = new Uint8Array(width * height * 4).fill(255);
  }

  set(x: number, y: number, [r, g, b]: Rgb): void {
    if (x < 0 || y < 0 || x >= this.width || y >= this.height) return;
    const i = (y * this.width + x) * 4;
    this.pixels[i] = r;
    this.pixels[i + 1] = g;
    this.pixels[i + 2] = b;
    this.pixels[i + 3] = 255;
  }

  line(x0: number, y0: number, x1: number, y1: number, color: Rgb, thick = 1): void {
    const steps = Math.max(Math.abs(x1 - x0), Math.abs(y1 - y0), 1);
    for (let i = 0; i <= steps; i++) {
      const x = Math.round(x0 + ((x1 - x0) * i) / steps);
      const y = Math.round(y0 + ((y1 - y0) * i) / steps);
      for (let dx = 0; dx < thick; dx++) {
        for (let dy = 0; dy < thick; dy++) {
          this.set(x + dx, y + dy, color);
        }
      }
    }
  }

  fillRect(x: number, y: number, w: number, h: number, color: Rgb): void {
    for (let yy = y; yy < y + h; yy++) {
      for (let xx = x; xx < x + w; xx++) this.set(xx, yy, color);
    }
  }

  text(x: number, y: number, s: string, color: Rgb, scale = 1): void {
    let cx = x;
    for (const ch of s) {
      const rows = glyphRows(ch);
      for (let ry = 0; ry < GLYPH_HEIGHT; ry++) {
        for (let rx = 0; rx < GLYPH_WIDTH; rx++) {
          if (rows[ry][rx] === "X") {
            this.fillRect(cx + rx * scale, y + ry * scale, scale, scale, color);
          }
        }
      }
      cx += (GLYPH_WIDTH + 1) * scale;
    }
  }
}

/** Round tick spacing to 1/2/5 times a power of ten. */
export function niceTicks(lo: number, hi: number, target = 5): number[] {
  if (!(hi > lo)) return [lo];
  const span = hi - lo;
  const raw = span / target;
  const mag = Math.pow(10, Math.floor(Math.log10(raw)));
  let step = mag;
  for (const m of [1, 2, 5, 10]) {
    if (raw <= m * mag) {
      step = m * mag;
      break;
    }
  }
  const ticks: number[] = [];
  for (let v = Math.ceil(lo / step) * step; v <= hi + step * 1e-9; v += step) {
    ticks.push(Math.abs(v) < step * 1e-9 ? 0 : v);
  }
  return ticks;
}

export function formatTick(value: number): string {
  if (value === 0) return "0";
  const abs = Math.abs(value);
  if (abs >= 1e5 || abs < 1e-3) return value.toExponential(1).replace("e+", "e");
  const text = value.toPrecision(4);
  return text.includes(".") ? text.replace(/\.?0+$/, "") : text;
}

export interface Series {
  label: string;
  x: number[];
  y: number[];
}

export interface PlotSpec {
  title: string;
  xLabel: string;
  yLabel: string;
  series: Series[];
  width: number;
  height: number;
}

const MARGIN = { left: 78, right: 24, top: 34, bottom: 48 };
const BLACK: Rgb = [0, 0, 0];
const GRID: Rgb = [221, 221, 221];

/** Draw a multi-series line chart and return the raster. */
export function plot(spec: PlotSpec): Raster {
  const raster = new Raster(spec.width, spec.height);
  const plotW = spec.width - MARGIN.left - MARGIN.right;
  const plotH = spec.height - MARGIN.top - MARGIN.bottom;

  let xMin = Infinity;
  let xMax = -Infinity;
  let yMin = Infinity;
  let yMax = -Infinity;
  for (const s of spec.series) {
    for (let i = 0; i < s.x.length; i++) {
      if (!Number.isFinite(s.x[i]) || !Number.isFinite(s.y[i])) continue;
      xMin = Math.min(xMin, s.x[i]);
      xMax = Math.max(xMax, s.x[i]);
      yMin = Math.min(yMin, s.y[i]);
      yMax = Math.max(yMax, s.y[i]);
    }
  }
  if (!Number.isFinite(xMin)) {
    xMin = 0;
    xMax = 1;
    yMin = 0;
    yMax = 1;
  }
  if (xMax === xMin) xMax = xMin + 1;
  if (yMax === yMin) {
    yMax = yMin + (Math.abs(yMin) || 1) * 0.5;
    yMin = yMin - (Math.abs(yMin) || 1) * 0.5;
  }
  const padY = (yMax - yMin) * 0.05;
  yMin -= padY;
  yMax += padY;

  const toX = (v: number) => MARGIN.left + ((v - xMin) / (xMax - xMin)) * plotW;
  const toY = (v: number) => MARGIN.top + (1 - (v - yMin) / (yMax - yMin)) * plotH;

  // grid and ticks
  for (const tick of niceTicks(xMin, xMax, 6)) {
    const px = Math.round(toX(tick));
    raster.line(px, MARGIN.top, px, MARGIN.top + plotH, GRID);
    const label = formatTick(tick);
    raster.text(px - textWidth(label) / 2, MARGIN.top + plotH + 8, label, BLACK);
  }
  for (const tick of niceTicks(yMin, yMax, 5)) {
    const py = Math.round(toY(tick));
    raster.line(MARGIN.left, py, MARGIN.left + plotW, py, GRID);
    const label = formatTick(tick);
    raster.text(MARGIN.left - 8 - textWidth(label), py - 3, label, BLACK);
  }

  // axes frame
  raster.line(MARGIN.left, MARGIN.top, MARGIN.left, MARGIN.top + plotH, BLACK);
  raster.line(MARGIN.left, MARGIN.top + plotH, MARGIN.left + plotW, MARGIN.top + plotH, BLACK);

  // series
  spec.series.forEach((s, idx) => {
    const color = PALETTE[idx % PALETTE.length];
    let prev: [number, number] | null = null;
    for (let i = 0; i < s.x.length; i++) {
      if (!Number.isFinite(s.x[i]) || !Number.isFinite(s.y[i])) {
        prev = null;
        continue;
      }
      const current: [number, number] = [Math.round(toX(s.x[i])), Math.round(toY(s.y[i]))];
      if (prev) raster.line(prev[0], prev[1], current[0], current[1], color);
      else raster.set(current[0], current[1], color);
      prev = current;
    }
  });

  // legend, top-right inside the frame
  const legendWidth = Math.max(...spec.series.map((s) => textWidth(s.label)), 0) + 26;
  let ly = MARGIN.top + 6;
  const lx = MARGIN.left + plotW - legendWidth - 6;
  spec.series.forEach((s, idx) => {
    const color = PALETTE[idx % PALETTE.length];
    raster.line(lx, ly + 3, lx + 14, ly + 3, color, 2);
    raster.text(lx + 20, ly, s.label, BLACK);
    ly += 12;
  });

  // title and axis labels
  raster.text(
    MARGIN.left + plotW / 2 - textWidth(spec.title, 2) / 2,
    10,
    spec.title,
    BLACK,
    2,
  );
  raster.text(
    MARGIN.left + plotW / 2 - textWidth(spec.xLabel) / 2,
    spec.height - 16,
    spec.xLabel,
    BLACK,
  );
  raster.text(4, MARGIN.top - 14, spec.yLabel, BLACK);

  return raster;
}

/**
 * Figure composition: a band figure shades between the per-horizon max and
 * min optimization errors of one CSV; an overlay figure draws the max-error
 * curve of several CSVs with a legend.
 */

import { fileLabel, MetricsFile, MetricsRow } from "./csv";
import { Raster, Rgba, BLACK } from "./raster";
import { linearScale, logScale, Scale } from "./scale";
import { textWidth } from "./font";

export interface FigureOptions {
  width?: number;
  height?: number;
  loglog?: boolean;
  title?: string;
}

const MARGIN = { left: 86, right: 24, top: 36, bottom: 56 };

const PALETTE: Rgba[] = [
  [31, 119, 180, 255],
  [214, 39, 40, 255],
  [44, 160, 44, 255],
  [148, 103, 189, 255],
  [255, 127, 14, 255],
  [23, 190, 207, 255],
];

const BAND_FILL: Rgba = [31, 119, 180, 70];
const GRID: Rgba = [210, 210, 210, 255];

interface Frame {
  raster: Raster;
  x: Scale;
  y: Scale;
}

function finitePositive(v: number, loglog: boolean): boolean {
  return Number.isFinite(v) && (!loglog || v > 0);
}

function collectDomain(
  files: MetricsFile[],
  fields: ReadonlyArray<keyof MetricsRow>,
  loglog: boolean,
): { xs: number[]; ys: number[] } {
  const xs: number[] = [];
  const ys: number[] = [];
  for (const f of files) {
    for (const row of f.rows) {
      if (!finitePositive(row.T, loglog)) continue;
      let any = false;
      for (const field of fields) {
        const v = row[field];
        if (finitePositive(v, loglog)) {
          ys.push(v);
          any = true;
        }
      }
      if (any) xs.push(row.T);
    }
  }
  return { xs, ys };
}

function makeFrame(
  files: MetricsFile[],
  fields: ReadonlyArray<keyof MetricsRow>,
  opts: FigureOptions,
): Frame {
  const width = opts.width ?? 800;
  const height = opts.height ?? 560;
  const raster = new Raster(width, height);
  const { xs, ys } = collectDomain(files, fields, opts.loglog ?? true);
  const xDomain: [number, number] = xs.length
    ? [Math.min(...xs), Math.max(...xs)]
    : opts.loglog ?? true
      ? [1, 10]
      : [0, 1];
  const yDomain: [number, number] = ys.length
    ? [Math.min(...ys), Math.max(...ys)]
    : opts.loglog ?? true
      ? [0.1, 1]
      : [0, 1];
  const make = (opts.loglog ?? true) ? logScale : linearScale;
  const x = make(xDomain, [MARGIN.left, width - MARGIN.right]);
  // raster y grows downward
  const y = make(yDomain, [height - MARGIN.bottom, MARGIN.top]);
  return { raster, x, y };
}

function drawAxes(frame: Frame, title: string, xLabel: string, yLabel: string): void {
  const { raster, x, y } = frame;
  const [x0, x1] = x.range;
  const [y0, y1] = y.range; // y0 = bottom, y1 = top
  for (const tick of x.ticks()) {
    const px = x.map(tick.value);
    raster.line(px, y1, px, y0, GRID);
    raster.text(px - textWidth(tick.label) / 2, y0 + 8, tick.label, BLACK);
  }
  for (const tick of y.ticks()) {
    const py = y.map(tick.value);
    raster.line(x0, py, x1, py, GRID);
    raster.text(x0 - textWidth(tick.label) - 6, py - 3, tick.label, BLACK);
  }
  raster.line(x0, y0, x1, y0, BLACK);
  raster.line(x0, y0, x0, y1, BLACK);
  raster.text(x0, 12, title, BLACK, 2);
  raster.text((x0 + x1) / 2 - textWidth(xLabel) / 2, y0 + 28, xLabel, BLACK);
  raster.text(4, y1 - 18, yLabel, BLACK);
}

function drawCurve(frame: Frame, pts: Array<[number, number]>, color: Rgba): void {
  for (let i = 0; i + 1 < pts.length; i++) {
    frame.raster.line(pts[i][0], pts[i][1], pts[i + 1][0], pts[i + 1][1], color, 2);
  }
  for (const [px, py] of pts) {
    frame.raster.fillRect(px - 2, py - 2, 5, 5, color);
  }
}

function projected(
  frame: Frame,
  file: MetricsFile,
  field: keyof MetricsRow,
  loglog: boolean,
): Array<[number, number]> {
  return file.rows
    .filter((r) => finitePositive(r.T, loglog) && finitePositive(r[field], loglog))
    .map((r) => [frame.x.map(r.T), frame.y.map(r[field])] as [number, number]);
}

export function renderBand(file: MetricsFile, opts: FigureOptions = {}): Raster {
  const loglog = opts.loglog ?? true;
  const frame = makeFrame([file], ["max_err", "min_err"], opts);
  drawAxes(frame, opts.title ?? fileLabel(file), "T", "OPT ERROR");
  const top = projected(frame, file, "max_err", loglog);
  const bottom = projected(frame, file, "min_err", loglog);
  if (top.length >= 2 && bottom.length === top.length) {
    frame.raster.fillPolygon([...top, ...bottom.slice().reverse()], BAND_FILL);
  }
  drawCurve(frame, top, PALETTE[0]);
  drawCurve(frame, bottom, PALETTE[2]);
  const legendX = frame.x.range[1] - 150;
  frame.raster.fillRect(legendX, MARGIN.top + 4, 10, 3, PALETTE[0]);
  frame.raster.text(legendX + 14, MARGIN.top, "MAX ERROR", BLACK);
  frame.raster.fillRect(legendX, MARGIN.top + 16, 10, 3, PALETTE[2]);
  frame.raster.text(legendX + 14, MARGIN.top + 12, "MIN ERROR", BLACK);
  return frame.raster;
}

export function renderOverlay(files: MetricsFile[], opts: FigureOptions = {}): Raster {
  const loglog = opts.loglog ?? true;
  const frame = makeFrame(files, ["max_err"], opts);
  drawAxes(frame, opts.title ?? "MAX ERROR VS T", "T", "MAX ERROR");
  files.forEach((file, i) => {
    const color = PALETTE[i % PALETTE.length];
    drawCurve(frame, projected(frame, file, "max_err", loglog), color);
    const ly = MARGIN.top + 4 + 12 * i;
    frame.raster.fillRect(frame.x.range[1] - 190, ly + 2, 10, 3, color);
    frame.raster.text(frame.x.range[1] - 176, ly, fileLabel(file).slice(0, 26), BLACK);
  });
  return frame.raster;
}

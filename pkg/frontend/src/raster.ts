/** Software RGBA canvas: lines, filled polygons, and bitmap text. */

import { GLYPH_HEIGHT, GLYPH_WIDTH, glyphFor } from "./font";

export type Rgba = readonly [number, number, number, number];

export const WHITE: Rgba = [255, 255, 255, 255];
export const BLACK: Rgba = [0, 0, 0, 255];

export class Raster {
  readonly width: number;
  readonly height: number;
  readonly data: Uint8Array;

  constructor(width: number, height: number, background: Rgba = WHITE) {
    this.width = width;
    this.height = height;
    this.data = new Uint8Array(width * height * 4);
    for (let i = 0; i < width * height; i++) {
      this.data.set(background, i * 4);
    }
  }

  set(x: number, y: number, color: Rgba): void {
    if (x < 0 || y < 0 || x >= this.width || y >= this.height) return;
    const i = (y * this.width + x) * 4;
    const a = color[3] / 255;
    if (a >= 1) {
      this.data.set(color, i);
      return;
    }
    for (let c = 0; c < 3; c++) {
      this.data[i + c] = Math.round(color[c] * a + this.data[i + c] * (1 - a));
    }
    this.data[i + 3] = 255;
  }

  line(x0: number, y0: number, x1: number, y1: number, color: Rgba, thickness = 1): void {
    let ix0 = Math.round(x0);
    let iy0 = Math.round(y0);
    const ix1 = Math.round(x1);
    const iy1 = Math.round(y1);
    const dx = Math.abs(ix1 - ix0);
    const dy = -Math.abs(iy1 - iy0);
    const sx = ix0 < ix1 ? 1 : -1;
    const sy = iy0 < iy1 ? 1 : -1;
    let err = dx + dy;
    const r = Math.floor(thickness / 2);
    for (;;) {
      for (let ox = -r; ox <= r; ox++) {
        for (let oy = -r; oy <= r; oy++) {
          this.set(ix0 + ox, iy0 + oy, color);
        }
      }
      if (ix0 === ix1 && iy0 === iy1) break;
      const e2 = 2 * err;
      if (e2 >= dy) {
        err += dy;
        ix0 += sx;
      }
      if (e2 <= dx) {
        err += dx;
        iy0 += sy;
      }
    }
  }

  fillRect(x: number, y: number, w: number, h: number, color: Rgba): void {
    for (let yy = Math.round(y); yy < Math.round(y + h); yy++) {
      for (let xx = Math.round(x); xx < Math.round(x + w); xx++) {
        this.set(xx, yy, color);
      }
    }
  }

  /** Even-odd scanline fill of a closed polygon. */
  fillPolygon(points: ReadonlyArray<readonly [number, number]>, color: Rgba): void {
    if (points.length < 3) return;
    const ys = points.map((p) => p[1]);
    const yMin = Math.max(0, Math.floor(Math.min(...ys)));
    const yMax = Math.min(this.height - 1, Math.ceil(Math.max(...ys)));
    for (let y = yMin; y <= yMax; y++) {
      const crossings: number[] = [];
      const scanY = y + 0.5;
      for (let i = 0; i < points.length; i++) {
        const [x0, y0] = points[i];
        const [x1, y1] = points[(i + 1) % points.length];
        if (y0 === y1) continue;
        if ((scanY >= Math.min(y0, y1)) && (scanY < Math.max(y0, y1))) {
          crossings.push(x0 + ((scanY - y0) / (y1 - y0)) * (x1 - x0));
        }
      }
      crossings.sort((a, b) => a - b);
      for (let k = 0; k + 1 < crossings.length; k += 2) {
        const xa = Math.round(crossings[k]);
        const xb = Math.round(crossings[k + 1]);
        for (let x = xa; x <= xb; x++) this.set(x, y, color);
      }
    }
  }

  text(x: number, y: number, s: string, color: Rgba, scale = 1): void {
    let cursor = Math.round(x);
    const top = Math.round(y);
    for (const ch of s) {
      const glyph = glyphFor(ch);
      if (glyph) {
        for (let row = 0; row < GLYPH_HEIGHT; row++) {
          for (let col = 0; col < GLYPH_WIDTH; col++) {
            if (glyph[row][col] === "1") {
              this.fillRect(cursor + col * scale, top + row * scale, scale, scale, color);
            }
          }
        }
      }
      cursor += (GLYPH_WIDTH + 1) * scale;
    }
  }
}

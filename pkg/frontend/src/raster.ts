/** Rasterize a scene to an RGB buffer (supersampled for crisper PNGs). */

import { GLYPH_HEIGHT, GLYPH_SPACING, GLYPH_WIDTH, glyphRows } from "./font.js";
import type { Scene } from "./scene.js";

export interface Raster {
  width: number;
  height: number;
  pixels: Buffer; // RGB, 3 bytes per pixel, row-major
}

function parseColor(color: string): [number, number, number] {
  const hex = color.replace("#", "");
  return [
    parseInt(hex.slice(0, 2), 16),
    parseInt(hex.slice(2, 4), 16),
    parseInt(hex.slice(4, 6), 16),
  ];
}

export function rasterize(scene: Scene, scale = 2): Raster {
  const width = scene.width * scale;
  const height = scene.height * scale;
  const pixels = Buffer.alloc(width * height * 3, 0xff);

  function put(x: number, y: number, rgb: [number, number, number]): void {
    if (x < 0 || y < 0 || x >= width || y >= height) return;
    const offset = (y * width + x) * 3;
    pixels[offset] = rgb[0];
    pixels[offset + 1] = rgb[1];
    pixels[offset + 2] = rgb[2];
  }

  function fillRect(x: number, y: number, w: number, h: number, rgb: [number, number, number]): void {
    const x0 = Math.round(x * scale);
    const y0 = Math.round(y * scale);
    const x1 = Math.round((x + w) * scale);
    const y1 = Math.round((y + h) * scale);
    for (let yy = y0; yy < y1; yy++) {
      for (let xx = x0; xx < x1; xx++) put(xx, yy, rgb);
    }
  }

  function drawSegment(
    x1: number,
    y1: number,
    x2: number,
    y2: number,
    rgb: [number, number, number],
    thick: number,
  ): void {
    let x0 = Math.round(x1 * scale);
    let y0 = Math.round(y1 * scale);
    const xe = Math.round(x2 * scale);
    const ye = Math.round(y2 * scale);
    const dx = Math.abs(xe - x0);
    const dy = -Math.abs(ye - y0);
    const sx = x0 < xe ? 1 : -1;
    const sy = y0 < ye ? 1 : -1;
    let err = dx + dy;
    for (;;) {
      for (let tx = 0; tx < thick; tx++) {
        for (let ty = 0; ty < thick; ty++) put(x0 + tx, y0 + ty, rgb);
      }
      if (x0 === xe && y0 === ye) break;
      const e2 = 2 * err;
      if (e2 >= dy) {
        err += dy;
        x0 += sx;
      }
      if (e2 <= dx) {
        err += dx;
        y0 += sy;
      }
    }
  }

  function drawText(x: number, y: number, text: string, rgb: [number, number, number], textScale: number): void {
    const unit = textScale * scale;
    let cursor = Math.round(x * scale);
    const top = Math.round(y * scale);
    for (const ch of text) {
      const rows = glyphRows(ch);
      for (let r = 0; r < GLYPH_HEIGHT; r++) {
        for (let c = 0; c < GLYPH_WIDTH; c++) {
          if (rows[r][c] === "#") {
            for (let yy = 0; yy < unit; yy++) {
              for (let xx = 0; xx < unit; xx++) {
                put(cursor + c * unit + xx, top + r * unit + yy, rgb);
              }
            }
          }
        }
      }
      cursor += (GLYPH_WIDTH + GLYPH_SPACING) * unit;
    }
  }

  for (const p of scene.primitives) {
    switch (p.kind) {
      case "rect":
        fillRect(p.x, p.y, p.w, p.h, parseColor(p.fill));
        break;
      case "frame": {
        const rgb = parseColor(p.color);
        drawSegment(p.x, p.y, p.x + p.w, p.y, rgb, 1);
        drawSegment(p.x, p.y + p.h, p.x + p.w, p.y + p.h, rgb, 1);
        drawSegment(p.x, p.y, p.x, p.y + p.h, rgb, 1);
        drawSegment(p.x + p.w, p.y, p.x + p.w, p.y + p.h, rgb, 1);
        break;
      }
      case "line":
        drawSegment(p.x1, p.y1, p.x2, p.y2, parseColor(p.color), 1);
        break;
      case "polyline": {
        const rgb = parseColor(p.color);
        for (let i = 1; i < p.points.length; i++) {
          drawSegment(
            p.points[i - 1][0],
            p.points[i - 1][1],
            p.points[i][0],
            p.points[i][1],
            rgb,
            2,
          );
        }
        break;
      }
      case "text":
        drawText(p.x, p.y, p.text, parseColor(p.color), p.scale);
        break;
    }
  }
  return { width, height, pixels };
}

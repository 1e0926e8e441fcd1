/** Serialize a scene to SVG (timestamp-free, so output is idempotent). */

import { GLYPH_HEIGHT, textWidth } from "./font.js";
import type { Scene } from "./scene.js";

function escapeXml(text: string): string {
  return text
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}

function fmt(value: number): string {
  return Number(value.toFixed(2)).toString();
}

export function sceneToSvg(scene: Scene): string {
  const parts: string[] = [];
  parts.push(
    `<svg xmlns="http://www.w3.org/2000/svg" width="${scene.width}" height="${scene.height}" ` +
      `viewBox="0 0 ${scene.width} ${scene.height}">`,
  );
  for (const p of scene.primitives) {
    switch (p.kind) {
      case "rect":
        parts.push(
          `<rect x="${fmt(p.x)}" y="${fmt(p.y)}" width="${fmt(p.w)}" height="${fmt(p.h)}" fill="${p.fill}"/>`,
        );
        break;
      case "frame":
        parts.push(
          `<rect x="${fmt(p.x)}" y="${fmt(p.y)}" width="${fmt(p.w)}" height="${fmt(p.h)}" ` +
            `fill="none" stroke="${p.color}" stroke-width="1"/>`,
        );
        break;
      case "line":
        parts.push(
          `<line x1="${fmt(p.x1)}" y1="${fmt(p.y1)}" x2="${fmt(p.x2)}" y2="${fmt(p.y2)}" ` +
            `stroke="${p.color}" stroke-width="1"/>`,
        );
        break;
      case "polyline": {
        const points = p.points.map(([x, y]) => `${fmt(x)},${fmt(y)}`).join(" ");
        parts.push(
          `<polyline points="${points}" fill="none" stroke="${p.color}" stroke-width="1.5"/>`,
        );
        break;
      }
      case "text": {
        const width = textWidth(p.text, p.scale);
        const size = (GLYPH_HEIGHT + 3) * p.scale;
        parts.push(
          `<text x="${fmt(p.x)}" y="${fmt(p.y + GLYPH_HEIGHT * p.scale)}" ` +
            `font-family="monospace" font-size="${size}" fill="${p.color}" ` +
            `textLength="${fmt(width)}" lengthAdjust="spacingAndGlyphs">${escapeXml(p.text)}</text>`,
        );
        break;
      }
    }
  }
  parts.push("</svg>");
  return parts.join("\n") + "\n";
}

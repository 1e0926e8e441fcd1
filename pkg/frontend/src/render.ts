/** Top-level rendering: spec -> SVG string + PNG buffer + warnings. */

import { buildScene, type PlotSpec } from "./plot.js";
import { encodePng } from "./png.js";
import { rasterize } from "./raster.js";
import { sceneToSvg } from "./svg.js";

export interface Rendered {
  svg: string;
  png: Buffer;
  warnings: string[];
}

export function render(spec: PlotSpec): Rendered {
  const { scene, warnings } = buildScene(spec);
  return { svg: sceneToSvg(scene), png: encodePng(rasterize(scene)), warnings };
}

export function outputBasename(output: string): string {
  return output.replace(/\.(svg|png)$/i, "");
}

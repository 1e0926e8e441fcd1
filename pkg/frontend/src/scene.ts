/** Render-backend-agnostic drawing primitives shared by SVG and PNG output. */

export type Primitive =
  | { kind: "rect"; x: number; y: number; w: number; h: number; fill: string }
  | { kind: "frame"; x: number; y: number; w: number; h: number; color: string }
  | { kind: "line"; x1: number; y1: number; x2: number; y2: number; color: string }
  | { kind: "polyline"; points: Array<[number, number]>; color: string }
  | { kind: "text"; x: number; y: number; text: string; color: string; scale: number };

export interface Scene {
  width: number;
  height: number;
  primitives: Primitive[];
}

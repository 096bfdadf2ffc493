/** Iso-contour extraction from a scalar grid (marching squares).
 *
 * The equirect overlay draws the level set d = s of the server-provided
 * distance field instead of a planar ellipse, so the drawn outline stays
 * faithful near the poles and across the seam. The x direction wraps: the
 * cell between the last and first columns is included.
 */

import type { Plt1Grid } from "./plt1.js";
import { gridAt } from "./plt1.js";

export type Segment = [[number, number], [number, number]];

function lerpT(a: number, b: number, level: number): number {
  const denom = b - a;
  if (denom === 0) return 0.5;
  return (level - a) / denom;
}

/**
 * Line segments of the contour {(x, y) : grid(x, y) = level}, in pixel
 * coordinates (x may reach grid.width at the wrap column; callers drawing
 * on a canvas can take x modulo the width).
 */
export function isoContour(grid: Plt1Grid, level: number, channel = 0): Segment[] {
  const { width, height } = grid;
  const segments: Segment[] = [];
  const v = (x: number, y: number) => gridAt(grid, x, y, channel);

  for (let y = 0; y < height - 1; y++) {
    for (let x = 0; x < width; x++) {
      // cell corners: (x,y) (x+1,y) (x+1,y+1) (x,y+1); x+1 wraps
      const tl = v(x, y);
      const tr = v(x + 1, y);
      const br = v(x + 1, y + 1);
      const bl = v(x, y + 1);
      let code = 0;
      if (tl < level) code |= 1;
      if (tr < level) code |= 2;
      if (br < level) code |= 4;
      if (bl < level) code |= 8;
      if (code === 0 || code === 15) continue;

      // crossing points on the four edges
      const top: [number, number] = [x + lerpT(tl, tr, level), y];
      const right: [number, number] = [x + 1, y + lerpT(tr, br, level)];
      const bottom: [number, number] = [x + lerpT(bl, br, level), y + 1];
      const left: [number, number] = [x, y + lerpT(tl, bl, level)];

      switch (code) {
        case 1:
        case 14:
          segments.push([left, top]);
          break;
        case 2:
        case 13:
          segments.push([top, right]);
          break;
        case 3:
        case 12:
          segments.push([left, right]);
          break;
        case 4:
        case 11:
          segments.push([right, bottom]);
          break;
        case 6:
        case 9:
          segments.push([top, bottom]);
          break;
        case 7:
        case 8:
          segments.push([left, bottom]);
          break;
        case 5: // ambiguous saddle; resolve by center average
        case 10: {
          const center = (tl + tr + br + bl) / 4;
          const centerLow = center < level;
          if ((code === 5) === centerLow) {
            segments.push([left, top]);
            segments.push([right, bottom]);
          } else {
            segments.push([top, right]);
            segments.push([left, bottom]);
          }
          break;
        }
      }
    }
  }
  return segments;
}

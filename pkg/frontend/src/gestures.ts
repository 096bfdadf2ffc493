/** Mapping from editor gestures to server manipulations.
 *
 * Every UI-expressible edit corresponds to exactly one manipulation; drags
 * are expressed as pixel deltas on the equirect pane and converted to
 * angular deltas here. Dragging across the left/right edge simply produces
 * an azimuth delta; the server wraps it (seam-aware dragging).
 */

import type { Manipulation } from "./api.js";
import { TWO_PI } from "./coords.js";

export type Gesture =
  | { kind: "drag-center"; index: number; dxPx: number; dyPx: number }
  | { kind: "drag-size"; index: number; dPx: number }
  | { kind: "drag-rotate"; index: number; dAngle: number }
  | { kind: "ecc-slider"; index: number; value: number }
  | { kind: "delete-key"; index: number };

export function gestureToOp(
  g: Gesture,
  width: number,
  height: number,
): Manipulation {
  switch (g.kind) {
    case "drag-center":
      return {
        op: "translate",
        i: g.index,
        d_alpha: (TWO_PI * g.dxPx) / width,
        d_beta: (Math.PI * g.dyPx) / height,
      };
    case "drag-size":
      // vertical pixels and angular size share the pi/H scale
      return { op: "resize", i: g.index, d_s: (Math.PI * g.dPx) / height };
    case "drag-rotate":
      return { op: "rotate", i: g.index, d_gamma: g.dAngle };
    case "ecc-slider":
      return {
        op: "set_ecc",
        i: g.index,
        e: Math.min(0.99, Math.max(0, g.value)),
      };
    case "delete-key":
      return { op: "remove", i: g.index };
  }
}

/** Coalesce a queued continuous gesture with a newer one of the same kind. */
export function coalesce(prev: Gesture, next: Gesture): Gesture | null {
  if (prev.kind !== next.kind) return null;
  if (prev.kind === "drag-center" && next.kind === "drag-center") {
    if (prev.index !== next.index) return null;
    return {
      kind: "drag-center",
      index: prev.index,
      dxPx: prev.dxPx + next.dxPx,
      dyPx: prev.dyPx + next.dyPx,
    };
  }
  if (prev.kind === "drag-size" && next.kind === "drag-size") {
    if (prev.index !== next.index) return null;
    return { kind: "drag-size", index: prev.index, dPx: prev.dPx + next.dPx };
  }
  if (prev.kind === "drag-rotate" && next.kind === "drag-rotate") {
    if (prev.index !== next.index) return null;
    return {
      kind: "drag-rotate",
      index: prev.index,
      dAngle: prev.dAngle + next.dAngle,
    };
  }
  if (prev.kind === "ecc-slider" && next.kind === "ecc-slider") {
    if (prev.index !== next.index) return null;
    return next; // absolute value, latest wins
  }
  return null;
}

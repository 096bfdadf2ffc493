import { describe, expect, it } from "vitest";
import {
  pixelToSphere,
  sphereToPixel,
  wrapAzimuth,
  wrapPixelX,
  TWO_PI,
} from "../src/coords.js";

describe("wrapAzimuth", () => {
  it("maps into (0, 2pi]", () => {
    expect(wrapAzimuth(0)).toBeCloseTo(TWO_PI, 12);
    expect(wrapAzimuth(TWO_PI)).toBeCloseTo(TWO_PI, 12);
    expect(wrapAzimuth(-0.5)).toBeCloseTo(TWO_PI - 0.5, 12);
    expect(wrapAzimuth(TWO_PI + 0.25)).toBeCloseTo(0.25, 12);
  });
});

describe("sphereToPixel / pixelToSphere", () => {
  const W = 64;
  const H = 32;

  it("round-trips at pixel centers", () => {
    for (const [px, py] of [
      [0, 0],
      [31, 15],
      [63, 31],
      [10, 7],
    ]) {
      const { alpha, beta } = pixelToSphere(px, py, W, H);
      const { x, y } = sphereToPixel(alpha, beta, W, H);
      expect(x).toBeCloseTo(px, 9);
      expect(y).toBeCloseTo(py, 9);
    }
  });

  it("uses the pixel-center convention", () => {
    const { alpha, beta } = pixelToSphere(0, 0, W, H);
    expect(alpha).toBeCloseTo((TWO_PI * 0.5) / W, 12);
    expect(beta).toBeCloseTo((Math.PI * 0.5) / H, 12);
  });

  it("wraps x across the seam", () => {
    expect(pixelToSphere(W - 0.5, 4, W, H).alpha).toBeCloseTo(TWO_PI, 9);
    const past = pixelToSphere(W - 0.5 + 0.25, 4, W, H).alpha;
    expect(past).toBeCloseTo((TWO_PI * 0.25) / W, 9);
  });
});

describe("wrapPixelX", () => {
  it("keeps x in [0, width)", () => {
    expect(wrapPixelX(-1, 64)).toBe(63);
    expect(wrapPixelX(64, 64)).toBe(0);
    expect(wrapPixelX(65.5, 64)).toBeCloseTo(1.5, 12);
    expect(wrapPixelX(12, 64)).toBe(12);
  });
});

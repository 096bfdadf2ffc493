/** Equirectangular pixel <-> sphere-angle conversions used by the editor. */

export const TWO_PI = 2 * Math.PI;

/** Wrap an azimuth into (0, 2*pi]. */
export function wrapAzimuth(alpha: number): number {
  let a = alpha % TWO_PI;
  if (a < 0) a += TWO_PI;
  return a === 0 ? TWO_PI : a;
}

/** Continuous pixel position of a sphere point (pixel-center convention). */
export function sphereToPixel(
  alpha: number,
  beta: number,
  width: number,
  height: number,
): { x: number; y: number } {
  return {
    x: (wrapAzimuth(alpha) / TWO_PI) * width - 0.5,
    y: (beta / Math.PI) * height - 0.5,
  };
}

/** Sphere angles at a continuous pixel position; x wraps across the seam. */
export function pixelToSphere(
  x: number,
  y: number,
  width: number,
  height: number,
): { alpha: number; beta: number } {
  const alpha = wrapAzimuth((TWO_PI * (x + 0.5)) / width);
  const beta = Math.min(Math.PI, Math.max(0, (Math.PI * (y + 0.5)) / height));
  return { alpha, beta };
}

/** Marker x position after a drag that may cross the left/right edge. */
export function wrapPixelX(x: number, width: number): number {
  let w = x % width;
  if (w < 0) w += width;
  return w;
}

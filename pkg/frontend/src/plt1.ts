/** Parser for the PLT1 binary grid format served by the render endpoint.
 *
 * Layout: magic "PLT1", little-endian u32 W, H, C, then W*H*C little-endian
 * float32 in row-major order (y outer, x middle, channel inner).
 */

export interface Plt1Grid {
  width: number;
  height: number;
  channels: number;
  values: Float32Array;
}

export function parsePlt1(buffer: ArrayBuffer): Plt1Grid {
  const view = new DataView(buffer);
  if (buffer.byteLength < 16) {
    throw new Error("PLT1 payload truncated");
  }
  const magic = String.fromCharCode(
    view.getUint8(0),
    view.getUint8(1),
    view.getUint8(2),
    view.getUint8(3),
  );
  if (magic !== "PLT1") {
    throw new Error(`not a PLT1 payload (magic ${JSON.stringify(magic)})`);
  }
  const width = view.getUint32(4, true);
  const height = view.getUint32(8, true);
  const channels = view.getUint32(12, true);
  const count = width * height * channels;
  if (buffer.byteLength !== 16 + 4 * count) {
    throw new Error(
      `PLT1 payload has ${buffer.byteLength} bytes, expected ${16 + 4 * count}`,
    );
  }
  const values = new Float32Array(count);
  for (let i = 0; i < count; i++) {
    values[i] = view.getFloat32(16 + 4 * i, true);
  }
  return { width, height, channels, values };
}

/** Value at (x, y, c) with x wrapped across the seam and y clamped. */
export function gridAt(grid: Plt1Grid, x: number, y: number, c = 0): number {
  const xw = ((x % grid.width) + grid.width) % grid.width;
  const yc = Math.min(grid.height - 1, Math.max(0, y));
  return grid.values[(yc * grid.width + xw) * grid.channels + c];
}

/** End-to-end editor loop against the real rendering service.
 *
 * Spawns the Python service on a local port, then drives the same client
 * code the browser uses: create a session, remove an object (weight heatmap
 * changes), undo (renders restored byte-identically), and drag an object
 * across the seam (marker wraps, distance field stays continuous).
 */

import { spawn, type ChildProcess } from "node:child_process";
import { readFileSync } from "node:fs";
import { dirname, join } from "node:path";
import { fileURLToPath } from "node:url";
import { afterAll, beforeAll, describe, expect, it } from "vitest";
import { ServiceClient } from "../src/api.js";
import { sphereToPixel, wrapPixelX, TWO_PI } from "../src/coords.js";
import { gestureToOp } from "../src/gestures.js";
import { parsePlt1, gridAt } from "../src/plt1.js";

const here = dirname(fileURLToPath(import.meta.url));
const PORT = 8765 + (process.pid % 500);
const BASE = `http://127.0.0.1:${PORT}`;

let server: ChildProcess;
const client = new ServiceClient(BASE);

function fixtureBlob(name: string, type: string): Blob {
  return new Blob([readFileSync(join(here, "fixtures", name))], { type });
}

beforeAll(async () => {
  server = spawn(
    "python3",
    [
      "-c",
      "import uvicorn; from panolayout.service import create_app; " +
        `uvicorn.run(create_app(), host='127.0.0.1', port=${PORT}, log_level='warning')`,
    ],
    { stdio: ["ignore", "inherit", "inherit"] },
  );
  const deadline = Date.now() + 30000;
  while (Date.now() < deadline) {
    if (await client.healthy()) return;
    await new Promise((r) => setTimeout(r, 200));
  }
  throw new Error("service did not become healthy");
}, 40000);

afterAll(() => {
  server?.kill();
});

async function createFixtureSession(): Promise<string> {
  const { id } = await client.createSession(
    fixtureBlob("pano.png", "image/png"),
    fixtureBlob("layout.json", "application/json"),
  );
  return id;
}

describe("editor loop", () => {
  it("remove changes the weight heatmap and undo restores renders byte-identically", async () => {
    const id = await createFixtureSession();
    const before = await client.render(id, "weight");
    const beforeOverlay = await client.render(id, "overlay");
    expect(before.revision).toBe(0);

    const rev = await client.applyOp(id, { op: "remove", i: 1 });
    expect(rev).toBe(1);
    const after = await client.render(id, "weight");
    expect(after.revision).toBe(1);
    expect(Buffer.from(after.body).equals(Buffer.from(before.body))).toBe(false);

    const undoRev = await client.undo(id);
    expect(undoRev).toBe(2);
    const restored = await client.render(id, "weight");
    const restoredOverlay = await client.render(id, "overlay");
    expect(restored.revision).toBe(2);
    expect(Buffer.from(restored.body).equals(Buffer.from(before.body))).toBe(true);
    expect(
      Buffer.from(restoredOverlay.body).equals(Buffer.from(beforeOverlay.body)),
    ).toBe(true);
  }, 30000);

  it("dragging across the right edge wraps the marker and keeps the field continuous", async () => {
    const id = await createFixtureSession();
    const { layout } = await client.getLayout(id);
    const obj = layout.objects[0];

    // drag far enough rightward that alpha passes 2*pi
    const pixelsToSeam = ((TWO_PI - obj.alpha) / TWO_PI) * layout.width;
    const op = gestureToOp(
      {
        kind: "drag-center",
        index: 1,
        dxPx: pixelsToSeam + layout.width / 8,
        dyPx: 0,
      },
      layout.width,
      layout.height,
    );
    await client.applyOp(id, op);

    const moved = (await client.getLayout(id)).layout.objects[0];
    expect(moved.alpha).toBeGreaterThan(0);
    expect(moved.alpha).toBeLessThanOrEqual(TWO_PI);
    const { x } = sphereToPixel(moved.alpha, moved.beta, layout.width, layout.height);
    const markerX = wrapPixelX(x, layout.width);
    expect(markerX).toBeGreaterThanOrEqual(0);
    expect(markerX).toBeLessThan(layout.width);
    // the marker reappears near the left edge
    expect(markerX).toBeLessThan(layout.width / 4);

    // distance field continuity: the seam column pair differs no more than
    // the worst interior adjacent-column pair
    const res = await client.render(id, "distance:1");
    const grid = parsePlt1(res.body);
    let seamDiff = 0;
    let interiorMax = 0;
    for (let y = 0; y < grid.height; y++) {
      seamDiff = Math.max(
        seamDiff,
        Math.abs(gridAt(grid, 0, y) - gridAt(grid, grid.width - 1, y)),
      );
      for (let xc = 0; xc < grid.width - 1; xc++) {
        interiorMax = Math.max(
          interiorMax,
          Math.abs(gridAt(grid, xc, y) - gridAt(grid, xc + 1, y)),
        );
      }
    }
    expect(seamDiff).toBeLessThanOrEqual(interiorMax + 1e-6);
  }, 30000);

  it("random seeds replay identically through the server", async () => {
    const image = fixtureBlob("pano.png", "image/png");
    const a = await client.createSession(image, null, { seed: 7, n: 4, d_f: 4 });
    const b = await client.createSession(image, null, { seed: 7, n: 4, d_f: 4 });
    const la = await client.getLayout(a.id);
    const lb = await client.getLayout(b.id);
    expect(la.layout).toEqual(lb.layout);
  }, 30000);

  it("rotating a circular object by half a turn leaves the field unchanged", async () => {
    const id = await createFixtureSession();
    await client.applyOp(id, { op: "set_ecc", i: 2, e: 0.5 });
    const before = await client.render(id, "opacity:2");
    await client.applyOp(id, { op: "rotate", i: 2, d_gamma: Math.PI });
    const after = await client.render(id, "opacity:2");
    const ga = parsePlt1(before.body);
    const gb = parsePlt1(after.body);
    let maxDiff = 0;
    for (let i = 0; i < ga.values.length; i++) {
      maxDiff = Math.max(maxDiff, Math.abs(ga.values[i] - gb.values[i]));
    }
    expect(maxDiff).toBeLessThan(1e-6);
  }, 30000);

  it("surfaces server rejections", async () => {
    const id = await createFixtureSession();
    await expect(client.applyOp(id, { op: "remove", i: 99 })).rejects.toThrow();
  }, 30000);
});

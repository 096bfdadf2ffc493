/** Browser entry point: three synchronized panes over the rendering service.
 *
 * Pane 1: equirect background with object markers and the d = s iso-contour
 * of the selected object. Pane 2: selected-object field (opacity or distance)
 * as a grayscale heatmap. Pane 3: perspective preview with draggable
 * yaw/pitch and an fov slider. Every pane is labeled with the revision it
 * shows; renders arriving for an older revision are dropped.
 */

import { ServiceClient } from "./api.js";
import { sphereToPixel, wrapPixelX, TWO_PI } from "./coords.js";
import { parsePlt1, gridAt } from "./plt1.js";
import { isoContour } from "./contour.js";
import type { Gesture } from "./gestures.js";
import { initialState, isStaleRender, OpPipeline, type EditorState } from "./state.js";

const client = new ServiceClient("");

function el<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (node === null) throw new Error(`missing element #${id}`);
  return node as T;
}

function setLabel(id: string, revision: number): void {
  el<HTMLSpanElement>(id).textContent = `rev ${revision}`;
}

function showError(message: string): void {
  const banner = el<HTMLDivElement>("error-banner");
  banner.textContent = message;
  banner.style.display = message === "" ? "none" : "block";
}

async function drawPngPane(
  canvas: HTMLCanvasElement,
  body: ArrayBuffer,
): Promise<void> {
  const bitmap = await createImageBitmap(new Blob([body], { type: "image/png" }));
  canvas.width = bitmap.width;
  canvas.height = bitmap.height;
  canvas.getContext("2d")!.drawImage(bitmap, 0, 0);
  bitmap.close();
}

function drawGrayscale(canvas: HTMLCanvasElement, body: ArrayBuffer): void {
  const grid = parsePlt1(body);
  canvas.width = grid.width;
  canvas.height = grid.height;
  const ctx = canvas.getContext("2d")!;
  const img = ctx.createImageData(grid.width, grid.height);
  let lo = Infinity;
  let hi = -Infinity;
  for (const x of grid.values) {
    if (x < lo) lo = x;
    if (x > hi) hi = x;
  }
  const scale = hi > lo ? 255 / (hi - lo) : 0;
  for (let i = 0; i < grid.width * grid.height; i++) {
    const g = Math.round((grid.values[i * grid.channels] - lo) * scale);
    img.data[4 * i] = g;
    img.data[4 * i + 1] = g;
    img.data[4 * i + 2] = g;
    img.data[4 * i + 3] = 255;
  }
  ctx.putImageData(img, 0, 0);
}

class Editor {
  state: EditorState;
  pipeline: OpPipeline;
  dragging: { index: number; lastX: number; lastY: number } | null = null;

  constructor(state: EditorState) {
    this.state = state;
    this.pipeline = new OpPipeline(
      state,
      (op) => client.applyOp(state.sessionId, op),
      () => void this.refreshAll(),
    );
  }

  gesture(g: Gesture): void {
    this.pipeline.submit(g);
  }

  async refreshAll(): Promise<void> {
    const { revision, layout } = await client.getLayout(this.state.sessionId);
    if (revision < this.state.revision) return;
    this.state.revision = revision;
    this.state.layout = layout;
    await Promise.all([
      this.refreshEquirect(),
      this.refreshField(),
      this.refreshPerspective(),
    ]);
  }

  async refreshEquirect(): Promise<void> {
    const res = await client.render(this.state.sessionId, "overlay");
    if (isStaleRender(this.state, res.revision)) return;
    const canvas = el<HTMLCanvasElement>("pane-equirect");
    await drawPngPane(canvas, res.body);
    this.drawMarkers(canvas);
    await this.drawSelectedContour(canvas);
    setLabel("rev-equirect", res.revision);
  }

  drawMarkers(canvas: HTMLCanvasElement): void {
    const ctx = canvas.getContext("2d")!;
    const { width, height, objects } = this.state.layout;
    const sx = canvas.width / width;
    const sy = canvas.height / height;
    objects.forEach((obj, k) => {
      if (obj.s <= 0) return; // removed
      const { x, y } = sphereToPixel(obj.alpha, obj.beta, width, height);
      const px = wrapPixelX(x, width) * sx;
      const py = y * sy;
      ctx.beginPath();
      ctx.arc(px, py, 5, 0, TWO_PI);
      ctx.fillStyle = k + 1 === this.state.selected ? "#ff4040" : "#40c0ff";
      ctx.fill();
      ctx.fillStyle = "#ffffff";
      ctx.font = "10px sans-serif";
      ctx.fillText(String(k + 1), px + 7, py - 7);
    });
  }

  async drawSelectedContour(canvas: HTMLCanvasElement): Promise<void> {
    const i = this.state.selected;
    if (i === null) return;
    const obj = this.state.layout.objects[i - 1];
    if (obj.s <= 0) return;
    const res = await client.render(this.state.sessionId, `distance:${i}`);
    if (isStaleRender(this.state, res.revision)) return;
    const grid = parsePlt1(res.body);
    const ctx = canvas.getContext("2d")!;
    const sx = canvas.width / grid.width;
    const sy = canvas.height / grid.height;
    ctx.strokeStyle = "#ffe040";
    ctx.lineWidth = 1.5;
    for (const [[x0, y0], [x1, y1]] of isoContour(grid, obj.s)) {
      if (Math.abs(x1 - x0) > grid.width / 2) continue; // skip seam-jump draw
      ctx.beginPath();
      ctx.moveTo((x0 % grid.width) * sx, y0 * sy);
      ctx.lineTo((x1 % grid.width) * sx, y1 * sy);
      ctx.stroke();
    }
  }

  async refreshField(): Promise<void> {
    const i = this.state.selected;
    const canvas = el<HTMLCanvasElement>("pane-field");
    if (i === null) {
      canvas.getContext("2d")!.clearRect(0, 0, canvas.width, canvas.height);
      return;
    }
    const mode = `${this.state.viewMode === "distance" ? "distance" : "opacity"}:${i}`;
    const res = await client.render(this.state.sessionId, mode);
    if (isStaleRender(this.state, res.revision)) return;
    drawGrayscale(canvas, res.body);
    setLabel("rev-field", res.revision);
  }

  async refreshPerspective(): Promise<void> {
    const { yaw, pitch, fov } = this.state.camera;
    const res = await client.render(this.state.sessionId, "perspective", {
      yaw,
      pitch,
      roll: 0,
      fov,
    });
    if (isStaleRender(this.state, res.revision)) return;
    await drawPngPane(el<HTMLCanvasElement>("pane-perspective"), res.body);
    setLabel("rev-perspective", res.revision);
  }

  /** Nearest marker within a pick radius, as a 1-based index or null. */
  pickObject(px: number, py: number, canvas: HTMLCanvasElement): number | null {
    const { width, height, objects } = this.state.layout;
    const sx = canvas.width / width;
    const sy = canvas.height / height;
    let best: number | null = null;
    let bestDist = 12; // pick radius in canvas pixels
    objects.forEach((obj, k) => {
      if (obj.s <= 0) return;
      const { x, y } = sphereToPixel(obj.alpha, obj.beta, width, height);
      const dx = Math.abs(wrapPixelX(x, width) * sx - px);
      const wrapped = Math.min(dx, canvas.width - dx);
      const d = Math.hypot(wrapped, y * sy - py);
      if (d < bestDist) {
        bestDist = d;
        best = k + 1;
      }
    });
    return best;
  }
}

async function startSession(): Promise<void> {
  showError("");
  const imageInput = el<HTMLInputElement>("image-file");
  const layoutInput = el<HTMLInputElement>("layout-file");
  const seedInput = el<HTMLInputElement>("random-seed");
  if (!imageInput.files || imageInput.files.length === 0) {
    showError("choose a panorama image first");
    return;
  }
  const image = imageInput.files[0];
  const layout = layoutInput.files && layoutInput.files.length > 0 ? layoutInput.files[0] : null;
  const random =
    layout === null
      ? { seed: Number(seedInput.value || "0"), n: 5, d_f: 8 }
      : undefined;
  let created: { id: string; revision: number };
  try {
    created = await client.createSession(image, layout, random);
  } catch (err) {
    showError(err instanceof Error ? err.message : String(err));
    return;
  }
  const { layout: doc } = await client.getLayout(created.id);
  const editor = new Editor(initialState(created.id, doc));
  editor.state.revision = created.revision;
  wireEditor(editor);
  await editor.refreshAll();
}

function wireEditor(editor: Editor): void {
  const equirect = el<HTMLCanvasElement>("pane-equirect");

  equirect.onmousedown = (ev) => {
    const rect = equirect.getBoundingClientRect();
    const px = ((ev.clientX - rect.left) / rect.width) * equirect.width;
    const py = ((ev.clientY - rect.top) / rect.height) * equirect.height;
    const hit = editor.pickObject(px, py, equirect);
    if (hit !== null) {
      editor.state.selected = hit;
      editor.dragging = { index: hit, lastX: ev.clientX, lastY: ev.clientY };
    }
  };
  window.addEventListener("mousemove", (ev) => {
    if (editor.dragging === null) return;
    const rect = equirect.getBoundingClientRect();
    const scaleX = editor.state.layout.width / rect.width;
    const scaleY = editor.state.layout.height / rect.height;
    const dxPx = (ev.clientX - editor.dragging.lastX) * scaleX;
    const dyPx = (ev.clientY - editor.dragging.lastY) * scaleY;
    editor.dragging.lastX = ev.clientX;
    editor.dragging.lastY = ev.clientY;
    editor.gesture({ kind: "drag-center", index: editor.dragging.index, dxPx, dyPx });
  });
  window.addEventListener("mouseup", () => {
    editor.dragging = null;
  });
  window.addEventListener("keydown", (ev) => {
    if (ev.key === "Delete" && editor.state.selected !== null) {
      editor.gesture({ kind: "delete-key", index: editor.state.selected });
      editor.state.selected = null;
    }
  });

  el<HTMLInputElement>("size-delta").onchange = (ev) => {
    const input = ev.target as HTMLInputElement;
    if (editor.state.selected !== null) {
      editor.gesture({
        kind: "drag-size",
        index: editor.state.selected,
        dPx: Number(input.value),
      });
      input.value = "0";
    }
  };
  el<HTMLInputElement>("rotate-delta").onchange = (ev) => {
    const input = ev.target as HTMLInputElement;
    if (editor.state.selected !== null) {
      editor.gesture({
        kind: "drag-rotate",
        index: editor.state.selected,
        dAngle: (Number(input.value) * Math.PI) / 180,
      });
      input.value = "0";
    }
  };
  el<HTMLInputElement>("ecc-slider").oninput = (ev) => {
    if (editor.state.selected !== null) {
      editor.gesture({
        kind: "ecc-slider",
        index: editor.state.selected,
        value: Number((ev.target as HTMLInputElement).value),
      });
    }
  };
  el<HTMLButtonElement>("undo-button").onclick = async () => {
    const rev = await client.undo(editor.state.sessionId);
    editor.state.revision = rev;
    await editor.refreshAll();
  };
  el<HTMLSelectElement>("field-mode").onchange = (ev) => {
    editor.state.viewMode = (ev.target as HTMLSelectElement).value;
    void editor.refreshField();
  };

  const perspective = el<HTMLCanvasElement>("pane-perspective");
  let camDrag: { x: number; y: number } | null = null;
  perspective.onmousedown = (ev) => {
    camDrag = { x: ev.clientX, y: ev.clientY };
  };
  window.addEventListener("mousemove", (ev) => {
    if (camDrag === null) return;
    editor.state.camera.yaw += ((ev.clientX - camDrag.x) / perspective.width) * editor.state.camera.fov;
    editor.state.camera.pitch += ((ev.clientY - camDrag.y) / perspective.height) * editor.state.camera.fov;
    editor.state.camera.pitch = Math.min(1.4, Math.max(-1.4, editor.state.camera.pitch));
    camDrag = { x: ev.clientX, y: ev.clientY };
    void editor.refreshPerspective();
  });
  window.addEventListener("mouseup", () => {
    camDrag = null;
  });
  el<HTMLInputElement>("fov-slider").oninput = (ev) => {
    editor.state.camera.fov = Number((ev.target as HTMLInputElement).value);
    void editor.refreshPerspective();
  };
}

el<HTMLButtonElement>("load-button").onclick = () => void startSession();

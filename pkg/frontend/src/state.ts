/** Editor session state: revision tracking, a single in-flight mutation with
 * coalescing, and stale-render rejection.
 *
 * Invariant: the local revision never exceeds the server's acknowledged
 * revision; a response carrying an unexpected revision triggers a refetch.
 */

import type { LayoutDoc, Manipulation } from "./api.js";
import type { Gesture } from "./gestures.js";
import { coalesce, gestureToOp } from "./gestures.js";

export interface EditorState {
  sessionId: string;
  layout: LayoutDoc;
  revision: number;
  selected: number | null; // 1-based object index
  viewMode: string;
  camera: { yaw: number; pitch: number; fov: number };
}

export function initialState(sessionId: string, layout: LayoutDoc): EditorState {
  return {
    sessionId,
    layout,
    revision: 0,
    selected: layout.n > 0 ? 1 : null,
    viewMode: "weight",
    camera: { yaw: Math.PI, pitch: 0, fov: 1.2 },
  };
}

/** Accept a server acknowledgment; returns whether a refetch is needed. */
export function acknowledge(state: EditorState, serverRevision: number): boolean {
  if (serverRevision < state.revision) {
    // should not happen; treat as divergence
    return true;
  }
  const needsRefetch = serverRevision > state.revision + 1;
  state.revision = serverRevision;
  return needsRefetch;
}

/** A render response is stale if it reflects an older revision than known. */
export function isStaleRender(state: EditorState, renderRevision: number): boolean {
  return renderRevision < state.revision;
}

export interface OpSender {
  (op: Manipulation): Promise<number>;
}

/**
 * Serializes gestures into ops: at most one mutation in flight, newer
 * continuous gestures coalesce with the queued one (debouncing drags to
 * roughly the server round-trip rate).
 */
export class OpPipeline {
  private queued: Gesture | null = null;
  private inFlight = false;

  constructor(
    private state: EditorState,
    private send: OpSender,
    private onRevision: (rev: number) => void,
  ) {}

  submit(gesture: Gesture): void {
    if (this.queued !== null) {
      const merged = coalesce(this.queued, gesture);
      this.queued = merged ?? gesture;
    } else {
      this.queued = gesture;
    }
    void this.pump();
  }

  get busy(): boolean {
    return this.inFlight || this.queued !== null;
  }

  /** Resolves when no op is queued or in flight. */
  async drain(): Promise<void> {
    while (this.busy) {
      await new Promise((r) => setTimeout(r, 5));
    }
  }

  private async pump(): Promise<void> {
    if (this.inFlight || this.queued === null) return;
    const gesture = this.queued;
    this.queued = null;
    this.inFlight = true;
    try {
      const op = gestureToOp(gesture, this.state.layout.width, this.state.layout.height);
      const rev = await this.send(op);
      acknowledge(this.state, rev);
      this.onRevision(rev);
    } finally {
      this.inFlight = false;
    }
    if (this.queued !== null) void this.pump();
  }
}

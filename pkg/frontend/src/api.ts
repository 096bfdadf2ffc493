/** Typed client for the rendering service endpoints. */

export interface LayoutObject {
  alpha: number;
  beta: number;
  s: number;
  gamma: number;
  e: number;
  f: number[];
}

export interface LayoutDoc {
  version: number;
  n: number;
  d_f: number;
  d_u: number;
  d_y: number;
  width: number;
  height: number;
  objects: LayoutObject[];
}

export type Manipulation =
  | { op: "remove"; i: number }
  | { op: "translate"; i: number; d_alpha: number; d_beta: number }
  | { op: "resize"; i: number; d_s: number }
  | { op: "rotate"; i: number; d_gamma: number }
  | { op: "set_ecc"; i: number; e: number };

export interface RenderResult {
  revision: number;
  body: ArrayBuffer;
  contentType: string;
}

export class ApiError extends Error {
  constructor(
    public status: number,
    detail: string,
  ) {
    super(detail);
  }
}

async function expectOk(resp: Response): Promise<Response> {
  if (!resp.ok) {
    let detail = resp.statusText;
    try {
      detail = (await resp.json()).detail ?? detail;
    } catch {
      /* non-JSON error body */
    }
    throw new ApiError(resp.status, detail);
  }
  return resp;
}

export class ServiceClient {
  constructor(private baseUrl: string) {}

  async createSession(
    image: Blob,
    layout: Blob | null,
    random?: { seed: number; n: number; d_f: number },
  ): Promise<{ id: string; revision: number }> {
    const form = new FormData();
    form.append("image", image, "pano.png");
    if (layout !== null) {
      form.append("layout", layout, "layout.json");
    } else if (random !== undefined) {
      form.append("random", JSON.stringify(random));
    }
    const resp = await expectOk(
      await fetch(`${this.baseUrl}/sessions`, { method: "POST", body: form }),
    );
    return resp.json();
  }

  async getLayout(id: string): Promise<{ revision: number; layout: LayoutDoc }> {
    const resp = await expectOk(await fetch(`${this.baseUrl}/sessions/${id}/layout`));
    return resp.json();
  }

  async applyOp(id: string, op: Manipulation): Promise<number> {
    const resp = await expectOk(
      await fetch(`${this.baseUrl}/sessions/${id}/ops`, {
        method: "POST",
        headers: { "Content-Type": "application/json" },
        body: JSON.stringify(op),
      }),
    );
    return (await resp.json()).revision;
  }

  async undo(id: string): Promise<number> {
    const resp = await expectOk(
      await fetch(`${this.baseUrl}/sessions/${id}/undo`, { method: "POST" }),
    );
    return (await resp.json()).revision;
  }

  renderUrl(id: string, mode: string, params: Record<string, number> = {}): string {
    const q = new URLSearchParams({ mode });
    for (const [k, v] of Object.entries(params)) q.set(k, String(v));
    return `${this.baseUrl}/sessions/${id}/render?${q}`;
  }

  async render(
    id: string,
    mode: string,
    params: Record<string, number> = {},
  ): Promise<RenderResult> {
    const resp = await expectOk(await fetch(this.renderUrl(id, mode, params)));
    return {
      revision: Number(resp.headers.get("x-revision")),
      body: await resp.arrayBuffer(),
      contentType: resp.headers.get("content-type") ?? "",
    };
  }

  async healthy(): Promise<boolean> {
    try {
      return (await fetch(`${this.baseUrl}/healthz`)).ok;
    } catch {
      return false;
    }
  }
}

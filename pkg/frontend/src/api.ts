// Typed client of the whatifsim HTTP service. Every displayed fact in the UI
// originates from one of these response bodies.

export interface PoseDoc {
  t: number[];
  r: number[];
}

export interface ShapeDoc {
  kind: "box" | "sphere" | "cylinder";
  dims: number[];
}

export interface SceneObjectDoc {
  class: string;
  shape: ShapeDoc;
  mass: number;
  pose: PoseDoc;
}

export interface SceneDoc {
  id: string;
  table: { half_extents: number[] };
  objects: SceneObjectDoc[];
}

export interface SceneResponse {
  id: string;
  scene: SceneDoc;
}

export interface ActionDoc {
  kind: string;
  target: string;
  params: Record<string, unknown> | null;
}

export interface DescriptionDoc {
  subject: string;
  text: string;
  event: string;
  agent: string | null;
}

export interface ContactEventDoc {
  t: number;
  a: string;
  b: string;
  impulse: number;
}

export interface TrajectorySampleDoc {
  t: number;
  t3: number[];
  r9: number[];
}

export interface TrajectoryDoc {
  class: string;
  removed: boolean;
  rate_hz: number;
  samples: TrajectorySampleDoc[];
}

export interface WhatIfResponse {
  action: ActionDoc;
  descriptions: DescriptionDoc[];
  events: ContactEventDoc[];
  trajectories_30hz: TrajectoryDoc[];
}

/** Service error body: the pipeline stage that failed plus a message. */
export interface StagedError {
  stage: string;
  message: string;
}

export class ApiFailure extends Error {
  constructor(
    readonly status: number,
    readonly stage: string,
    message: string,
  ) {
    super(message);
  }
}

async function parseFailure(resp: Response): Promise<never> {
  let stage = "http";
  let message = `HTTP ${resp.status}`;
  try {
    const body = (await resp.json()) as Partial<StagedError>;
    if (body.stage) stage = body.stage;
    if (body.message) message = body.message;
  } catch {
    // non-JSON error body; keep the generic message
  }
  throw new ApiFailure(resp.status, stage, message);
}

export class Client {
  constructor(
    private readonly baseUrl: string,
    private readonly fetchFn: typeof fetch = (...args) => fetch(...args),
  ) {}

  private async post<T>(path: string, body: unknown): Promise<T> {
    const resp = await this.fetchFn(`${this.baseUrl}${path}`, {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify(body),
    });
    if (!resp.ok) await parseFailure(resp);
    return (await resp.json()) as T;
  }

  async createScene(seed: number): Promise<SceneResponse> {
    return this.post<SceneResponse>("/scenes", { seed });
  }

  async getScene(id: string): Promise<SceneResponse> {
    const resp = await this.fetchFn(`${this.baseUrl}/scenes/${id}`);
    if (!resp.ok) await parseFailure(resp);
    return (await resp.json()) as SceneResponse;
  }

  async whatif(
    id: string,
    text: string,
    backend: "rules" | "linear" = "rules",
  ): Promise<WhatIfResponse> {
    return this.post<WhatIfResponse>(`/scenes/${id}/whatif`, { text, backend });
  }
}

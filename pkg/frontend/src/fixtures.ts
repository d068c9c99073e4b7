// Shared mock payloads for tests: a five-object scene and a canned what-if
// response shaped exactly like the service bodies.

import type {
  SceneDoc,
  SceneResponse,
  TrajectoryDoc,
  WhatIfResponse,
} from "./api.js";

const IDENTITY = [1, 0, 0, 0, 1, 0, 0, 0, 1];

export function mockScene(): SceneDoc {
  const obj = (
    cls: string,
    kind: "box" | "sphere" | "cylinder",
    dims: number[],
    x: number,
    y: number,
    z: number,
  ) => ({
    class: cls,
    shape: { kind, dims },
    mass: 0.2,
    pose: { t: [x, y, z], r: [...IDENTITY] },
  });
  return {
    id: "scene-7",
    table: { half_extents: [0.5, 0.5, 0.05] },
    objects: [
      obj("foam_brick", "box", [0.05, 0.075, 0.025], 0.0, 0.0, 0.025),
      obj("screwdriver", "cylinder", [0.012, 0.2], 0.2, 0.1, 0.012),
      obj("softball", "sphere", [0.048], -0.3, -0.3, 0.048),
      obj("banana", "box", [0.095, 0.019, 0.017], 0.3, -0.3, 0.017),
      obj("coffee_can", "cylinder", [0.051, 0.14], -0.3, 0.3, 0.07),
    ],
  };
}

export function mockSceneResponse(): SceneResponse {
  return { id: "abc123", scene: mockScene() };
}

function constantTrajectory(cls: string, x: number, y: number, z: number, n: number): TrajectoryDoc {
  const samples = [];
  for (let i = 0; i < n; i++) {
    samples.push({ t: (i * 10 + 1) / 300, t3: [x, y, z], r9: [...IDENTITY] });
  }
  return { class: cls, removed: false, rate_hz: 30, samples };
}

/** A remove-action answer: the screwdriver vanishes, everything else idles. */
export function mockWhatIf(frames = 150): WhatIfResponse {
  return {
    action: { kind: "remove", target: "screwdriver", params: null },
    descriptions: [
      { subject: "banana", text: "nothing", event: "nothing", agent: null },
      { subject: "coffee_can", text: "nothing", event: "nothing", agent: null },
      { subject: "foam_brick", text: "nothing", event: "nothing", agent: null },
      { subject: "softball", text: "nothing", event: "nothing", agent: null },
    ],
    events: [{ t: 0.0, a: "foam_brick", b: "table", impulse: 0.001 }],
    trajectories_30hz: [
      { class: "screwdriver", removed: true, rate_hz: 30, samples: [] },
      constantTrajectory("foam_brick", 0.0, 0.0, 0.025, frames),
      constantTrajectory("softball", -0.3, -0.3, 0.048, frames),
      constantTrajectory("banana", 0.3, -0.3, 0.017, frames),
      constantTrajectory("coffee_can", -0.3, 0.3, 0.07, frames),
    ],
  };
}

export function jsonResponse(body: unknown, status = 200): Response {
  return new Response(JSON.stringify(body), {
    status,
    headers: { "content-type": "application/json" },
  });
}

// Top-down 2D view of a scene: pure footprint computation plus a canvas
// painter. Footprints are derived either from the stored scene poses or from
// a trajectory frame during playback.

import type { SceneDoc, SceneObjectDoc, TrajectoryDoc } from "./api.js";

/** Fixed class-color table; objects are referred to by color in the view. */
export const CLASS_COLORS: Record<string, string> = {
  foam_brick: "#e05252",
  cheezit_box: "#e0a152",
  pudding_box: "#8a5a2b",
  mustard_bottle: "#d9c227",
  banana: "#b5c93d",
  softball: "#4fae4f",
  coffee_can: "#4f7dae",
  screwdriver: "#9a5fc9",
};

export interface CircleFootprint {
  kind: "circle";
  cls: string;
  x: number;
  y: number;
  r: number;
  color: string;
}

export interface PolygonFootprint {
  kind: "polygon";
  cls: string;
  points: Array<[number, number]>;
  color: string;
}

export interface SegmentFootprint {
  kind: "segment";
  cls: string;
  x1: number;
  y1: number;
  x2: number;
  y2: number;
  width: number;
  color: string;
}

export type Footprint = CircleFootprint | PolygonFootprint | SegmentFootprint;

interface PoseLike {
  t: number[];
  r: number[];
}

function boxFootprint(cls: string, pose: PoseLike, dims: number[]): PolygonFootprint {
  const [hx, hy] = dims;
  const r = pose.r;
  const points: Array<[number, number]> = [];
  for (const [sx, sy] of [
    [1, 1],
    [1, -1],
    [-1, -1],
    [-1, 1],
  ] as Array<[number, number]>) {
    const lx = sx * hx;
    const ly = sy * hy;
    points.push([
      pose.t[0] + r[0] * lx + r[1] * ly,
      pose.t[1] + r[3] * lx + r[4] * ly,
    ]);
  }
  return { kind: "polygon", cls, points, color: CLASS_COLORS[cls] ?? "#888" };
}

function cylinderFootprint(
  cls: string,
  pose: PoseLike,
  dims: number[],
): CircleFootprint | SegmentFootprint {
  const [radius, height] = dims;
  const color = CLASS_COLORS[cls] ?? "#888";
  // body z axis in world coordinates is the third rotation column
  const ax = pose.r[2];
  const ay = pose.r[5];
  const az = pose.r[8];
  if (Math.abs(az) > 0.7) {
    return { kind: "circle", cls, x: pose.t[0], y: pose.t[1], r: radius, color };
  }
  const half = height / 2;
  return {
    kind: "segment",
    cls,
    x1: pose.t[0] - ax * half,
    y1: pose.t[1] - ay * half,
    x2: pose.t[0] + ax * half,
    y2: pose.t[1] + ay * half,
    width: 2 * radius,
    color,
  };
}

function objectFootprint(obj: SceneObjectDoc, pose: PoseLike): Footprint {
  if (obj.shape.kind === "sphere") {
    return {
      kind: "circle",
      cls: obj.class,
      x: pose.t[0],
      y: pose.t[1],
      r: obj.shape.dims[0],
      color: CLASS_COLORS[obj.class] ?? "#888",
    };
  }
  if (obj.shape.kind === "cylinder") {
    return cylinderFootprint(obj.class, pose, obj.shape.dims);
  }
  return boxFootprint(obj.class, pose, obj.shape.dims);
}

/**
 * Footprints for one playback frame. Without trajectories the stored scene
 * poses are drawn. With trajectories, removed objects produce no footprint
 * at any frame, and objects follow their sampled poses.
 */
export function footprintsAt(
  scene: SceneDoc,
  trajectories: TrajectoryDoc[] | null,
  frame: number,
): Footprint[] {
  const byClass = new Map<string, TrajectoryDoc>();
  if (trajectories) {
    for (const traj of trajectories) byClass.set(traj.class, traj);
  }
  const out: Footprint[] = [];
  for (const obj of scene.objects) {
    const traj = byClass.get(obj.class);
    if (!trajectories || traj === undefined) {
      out.push(objectFootprint(obj, obj.pose));
      continue;
    }
    if (traj.removed || traj.samples.length === 0) continue;
    const sample = traj.samples[Math.min(frame, traj.samples.length - 1)];
    out.push(objectFootprint(obj, { t: sample.t3, r: sample.r9 }));
  }
  return out;
}

/** Paint table bounds and footprints onto a canvas (world meters -> pixels). */
export function drawScene(
  ctx: CanvasRenderingContext2D,
  canvasSize: number,
  tableHalfExtents: number[],
  footprints: Footprint[],
): void {
  const [hx, hy] = tableHalfExtents;
  const margin = 0.1;
  const scale = canvasSize / (2 * (Math.max(hx, hy) + margin));
  const toX = (x: number) => canvasSize / 2 + x * scale;
  const toY = (y: number) => canvasSize / 2 - y * scale;

  ctx.clearRect(0, 0, canvasSize, canvasSize);
  ctx.fillStyle = "#f4efe6";
  ctx.fillRect(0, 0, canvasSize, canvasSize);
  ctx.fillStyle = "#d8cdb4";
  ctx.strokeStyle = "#7a7a6a";
  ctx.fillRect(toX(-hx), toY(hy), 2 * hx * scale, 2 * hy * scale);
  ctx.strokeRect(toX(-hx), toY(hy), 2 * hx * scale, 2 * hy * scale);

  for (const fp of footprints) {
    ctx.fillStyle = fp.color;
    ctx.strokeStyle = "#333";
    if (fp.kind === "circle") {
      ctx.beginPath();
      ctx.arc(toX(fp.x), toY(fp.y), fp.r * scale, 0, 2 * Math.PI);
      ctx.fill();
      ctx.stroke();
    } else if (fp.kind === "polygon") {
      ctx.beginPath();
      fp.points.forEach(([x, y], i) => {
        if (i === 0) ctx.moveTo(toX(x), toY(y));
        else ctx.lineTo(toX(x), toY(y));
      });
      ctx.closePath();
      ctx.fill();
      ctx.stroke();
    } else {
      ctx.lineWidth = fp.width * scale;
      ctx.lineCap = "round";
      ctx.strokeStyle = fp.color;
      ctx.beginPath();
      ctx.moveTo(toX(fp.x1), toY(fp.y1));
      ctx.lineTo(toX(fp.x2), toY(fp.y2));
      ctx.stroke();
      ctx.lineWidth = 1;
    }
    ctx.fillStyle = "#222";
    ctx.font = "11px sans-serif";
    const lx = fp.kind === "circle" ? fp.x : fp.kind === "polygon" ? fp.points[0][0] : fp.x1;
    const ly = fp.kind === "circle" ? fp.y : fp.kind === "polygon" ? fp.points[0][1] : fp.y1;
    ctx.fillText(fp.cls.replace("_", " "), toX(lx) + 4, toY(ly) - 4);
  }
}

// Session state: the current scene and the append-only question history.

import type { SceneResponse, WhatIfResponse } from "./api.js";

export interface HistoryEntry {
  question: string;
  answer: WhatIfResponse;
}

export class History {
  private entries: HistoryEntry[] = [];

  add(question: string, answer: WhatIfResponse): HistoryEntry {
    const entry = { question, answer };
    this.entries.push(entry);
    return entry;
  }

  get length(): number {
    return this.entries.length;
  }

  at(index: number): HistoryEntry {
    return this.entries[index];
  }

  list(): readonly HistoryEntry[] {
    return this.entries;
  }
}

export interface ViewState {
  scene: SceneResponse | null;
  history: History;
  current: HistoryEntry | null;
}

export function initialState(): ViewState {
  return { scene: null, history: new History(), current: null };
}

export function describeAction(action: WhatIfResponse["action"]): string {
  const params = action.params ?? {};
  const detail = Object.entries(params)
    .map(([k, v]) => `${k}=${typeof v === "number" ? v.toFixed(3) : String(v)}`)
    .join(", ");
  const target = action.target.replace("_", " ");
  return detail ? `${action.kind} ${target} (${detail})` : `${action.kind} ${target}`;
}

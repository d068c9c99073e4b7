// The single-page application: scene view, ask panel, playback controls, and
// question history. createApp builds the whole DOM under a root element so
// tests can drive it against a mocked client.

import { ApiFailure, Client, type WhatIfResponse } from "./api.js";
import { Playback } from "./playback.js";
import { drawScene, footprintsAt } from "./scene2d.js";
import { describeAction, initialState, type HistoryEntry, type ViewState } from "./state.js";

const CANVAS_SIZE = 480;

export interface App {
  state: ViewState;
  playback: Playback;
  newScene(seed: number): Promise<void>;
  ask(text: string): Promise<void>;
  restore(index: number): void;
  renderFrame(): void;
  elements: {
    askInput: HTMLInputElement;
    askButton: HTMLButtonElement;
    parsedAction: HTMLElement;
    descriptions: HTMLUListElement;
    error: HTMLElement;
    historyList: HTMLUListElement;
    seedInput: HTMLInputElement;
    newSceneButton: HTMLButtonElement;
    playButton: HTMLButtonElement;
    scrubber: HTMLInputElement;
    timeLabel: HTMLElement;
    canvas: HTMLCanvasElement;
  };
}

function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  attrs: Record<string, string> = {},
  text = "",
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  for (const [k, v] of Object.entries(attrs)) node.setAttribute(k, v);
  if (text) node.textContent = text;
  return node;
}

export function createApp(root: HTMLElement, client: Client): App {
  const state = initialState();
  let playback = new Playback(0);

  const canvas = el("canvas", {
    id: "scene-canvas",
    width: String(CANVAS_SIZE),
    height: String(CANVAS_SIZE),
  });
  const seedInput = el("input", { id: "seed", type: "number", value: "0" });
  const newSceneButton = el("button", { id: "new-scene" }, "new scene");
  const askInput = el("input", {
    id: "ask-text",
    type: "text",
    placeholder: "what if the robot pushes the ball to the left?",
  });
  const askButton = el("button", { id: "ask" }, "ask");
  const parsedAction = el("div", { id: "parsed-action" });
  const errorBox = el("div", { id: "error", class: "error" });
  const descriptions = el("ul", { id: "descriptions" });
  const playButton = el("button", { id: "play" }, "play");
  const scrubber = el("input", { id: "scrubber", type: "range", min: "0", max: "0", value: "0" });
  const timeLabel = el("span", { id: "time-label" }, "0.00 s");
  const historyList = el("ul", { id: "history" });

  const sceneBar = el("div", { class: "bar" });
  sceneBar.append("seed: ", seedInput, newSceneButton);
  const askBar = el("div", { class: "bar" });
  askBar.append(askInput, askButton);
  const playBar = el("div", { class: "bar" });
  playBar.append(playButton, scrubber, timeLabel);

  root.append(
    sceneBar,
    canvas,
    askBar,
    errorBox,
    parsedAction,
    descriptions,
    playBar,
    el("h3", {}, "history"),
    historyList,
  );

  function context2d(): CanvasRenderingContext2D | null {
    try {
      return canvas.getContext("2d");
    } catch {
      return null; // test environments have no canvas backend
    }
  }

  function renderFrame(): void {
    scrubber.max = String(Math.max(playback.frameCount - 1, 0));
    scrubber.value = String(playback.frame);
    timeLabel.textContent = `${(playback.frame / playback.fps).toFixed(2)} s`;
    const ctx = context2d();
    if (!ctx || !state.scene) return;
    const trajectories = state.current ? state.current.answer.trajectories_30hz : null;
    const footprints = footprintsAt(state.scene.scene, trajectories, playback.frame);
    drawScene(ctx, CANVAS_SIZE, state.scene.scene.table.half_extents, footprints);
  }

  function showAnswer(entry: HistoryEntry): void {
    state.current = entry;
    errorBox.textContent = "";
    parsedAction.textContent = `parsed: ${describeAction(entry.answer.action)}`;
    descriptions.replaceChildren(
      ...entry.answer.descriptions.map((d) =>
        el("li", { "data-subject": d.subject }, `${d.subject.replace("_", " ")}: ${d.text}`),
      ),
    );
    const frames = Math.max(
      0,
      ...entry.answer.trajectories_30hz.map((t) => t.samples.length),
    );
    playback = new Playback(frames);
    renderFrame();
  }

  async function newScene(seed: number): Promise<void> {
    errorBox.textContent = "";
    try {
      state.scene = await client.createScene(seed);
    } catch (err) {
      errorBox.textContent = err instanceof Error ? err.message : String(err);
      return;
    }
    state.current = null;
    playback = new Playback(0);
    parsedAction.textContent = "";
    descriptions.replaceChildren();
    renderFrame();
  }

  async function ask(text: string): Promise<void> {
    if (!state.scene) {
      errorBox.textContent = "create a scene first";
      return;
    }
    let answer: WhatIfResponse;
    try {
      answer = await client.whatif(state.scene.id, text);
    } catch (err) {
      // history survives failures; parse errors show their stage inline
      if (err instanceof ApiFailure) {
        errorBox.textContent = `${err.stage}: ${err.message}`;
      } else {
        errorBox.textContent = err instanceof Error ? err.message : String(err);
      }
      return;
    }
    const entry = state.history.add(text, answer);
    const index = state.history.length - 1;
    const item = el("li", { "data-index": String(index) }, text);
    item.addEventListener("click", () => restore(index));
    historyList.append(item);
    showAnswer(entry);
  }

  function restore(index: number): void {
    showAnswer(state.history.at(index));
  }

  newSceneButton.addEventListener("click", () => {
    void newScene(Number(seedInput.value) || 0);
  });
  askButton.addEventListener("click", () => {
    if (askInput.value.trim()) void ask(askInput.value.trim());
  });
  askInput.addEventListener("keydown", (ev) => {
    if (ev.key === "Enter" && askInput.value.trim()) void ask(askInput.value.trim());
  });
  playButton.addEventListener("click", () => {
    if (playback.playing) {
      playback.pause();
      playButton.textContent = "play";
    } else {
      playback.play();
      playButton.textContent = "pause";
    }
  });
  scrubber.addEventListener("input", () => {
    playback.scrubTo(Number(scrubber.value));
    playButton.textContent = "play";
    renderFrame();
  });

  let last = performance.now();
  function loop(now: number): void {
    const dt = now - last;
    last = now;
    if (playback.playing) {
      playback.tick(dt);
      if (playback.atEnd) playButton.textContent = "play";
      renderFrame();
    }
    requestAnimationFrame(loop);
  }
  if (typeof requestAnimationFrame === "function") {
    requestAnimationFrame(loop);
  }

  const app: App = {
    state,
    get playback() {
      return playback;
    },
    newScene,
    ask,
    restore,
    renderFrame,
    elements: {
      askInput,
      askButton,
      parsedAction,
      descriptions,
      error: errorBox,
      historyList,
      seedInput,
      newSceneButton,
      playButton,
      scrubber,
      timeLabel,
      canvas,
    },
  };
  return app;
}

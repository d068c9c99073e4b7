// Acceptance-level UI tests against a mocked API: the ask-panel round trip
// renders the parsed action and all four descriptions, playback frame count
// matches the 30 Hz trajectories, and removed objects never appear.

import { beforeEach, describe, expect, it, vi } from "vitest";

import { Client } from "./api.js";
import { createApp, type App } from "./app.js";
import { footprintsAt } from "./scene2d.js";
import { jsonResponse, mockSceneResponse, mockWhatIf } from "./fixtures.js";

function makeApp(
  responses: Array<Response | (() => Response)>,
): { app: App; fetchFn: ReturnType<typeof vi.fn> } {
  const queue = [...responses];
  const fetchFn = vi.fn(async () => {
    const next = queue.shift();
    if (!next) throw new Error("unexpected request");
    return typeof next === "function" ? next() : next;
  });
  const root = document.createElement("div");
  document.body.replaceChildren(root);
  const app = createApp(root, new Client("http://api.test", fetchFn as unknown as typeof fetch));
  return { app, fetchFn };
}

beforeEach(() => {
  document.body.replaceChildren();
});

describe("ask panel", () => {
  it("renders the parsed action and all four descriptions after a round trip", async () => {
    const { app } = makeApp([
      jsonResponse(mockSceneResponse(), 201),
      jsonResponse(mockWhatIf()),
    ]);
    await app.newScene(7);
    app.elements.askInput.value = "the robot removes the screwdriver";
    app.elements.askButton.click();
    await vi.waitFor(() => {
      expect(app.elements.descriptions.children).toHaveLength(4);
    });
    expect(app.elements.parsedAction.textContent).toContain("remove");
    expect(app.elements.parsedAction.textContent).toContain("screwdriver");
    const subjects = Array.from(app.elements.descriptions.children).map(
      (li) => (li as HTMLElement).dataset.subject,
    );
    expect(subjects.sort()).toEqual(["banana", "coffee_can", "foam_brick", "softball"]);
    expect(app.elements.error.textContent).toBe("");
  });

  it("shows staged parse failures inline and keeps history intact", async () => {
    const { app } = makeApp([
      jsonResponse(mockSceneResponse(), 201),
      jsonResponse(mockWhatIf()),
      jsonResponse({ stage: "parse", message: "unparseable action" }, 422),
    ]);
    await app.newScene(7);
    await app.ask("the robot removes the screwdriver");
    expect(app.state.history.length).toBe(1);
    await app.ask("colorless green ideas");
    expect(app.elements.error.textContent).toContain("parse");
    expect(app.state.history.length).toBe(1); // failure did not disturb history
    expect(app.elements.historyList.children).toHaveLength(1);
  });

  it("restores previous answers from the history panel", async () => {
    const first = mockWhatIf(150);
    const second = mockWhatIf(150);
    second.action = { kind: "push", target: "softball", params: { direction_angle: 3.141 } };
    const { app } = makeApp([
      jsonResponse(mockSceneResponse(), 201),
      jsonResponse(first),
      jsonResponse(second),
    ]);
    await app.newScene(7);
    await app.ask("the robot removes the screwdriver");
    await app.ask("the robot pushes the softball to the left");
    expect(app.elements.parsedAction.textContent).toContain("push");
    (app.elements.historyList.children[0] as HTMLElement).click();
    expect(app.elements.parsedAction.textContent).toContain("remove");
    expect(app.elements.historyList.children).toHaveLength(2);
  });
});

describe("playback", () => {
  it("frame count equals the 30 Hz trajectory length", async () => {
    const { app } = makeApp([
      jsonResponse(mockSceneResponse(), 201),
      jsonResponse(mockWhatIf(150)),
    ]);
    await app.newScene(7);
    await app.ask("the robot removes the screwdriver");
    expect(app.playback.frameCount).toBe(150);
    expect(Number(app.elements.scrubber.max)).toBe(149);
  });

  it("removed objects never appear in any playback frame", async () => {
    const { app } = makeApp([
      jsonResponse(mockSceneResponse(), 201),
      jsonResponse(mockWhatIf(150)),
    ]);
    await app.newScene(7);
    await app.ask("the robot removes the screwdriver");
    const scene = app.state.scene!.scene;
    const trajectories = app.state.current!.answer.trajectories_30hz;
    for (const frame of [0, 1, 74, 149]) {
      const classes = footprintsAt(scene, trajectories, frame).map((p) => p.cls);
      expect(classes).not.toContain("screwdriver");
    }
  });

  it("every displayed fact originates from a response body", async () => {
    const sceneResp = mockSceneResponse();
    const answer = mockWhatIf();
    const { app } = makeApp([jsonResponse(sceneResp, 201), jsonResponse(answer)]);
    await app.newScene(7);
    await app.ask("the robot removes the screwdriver");
    const shown = Array.from(app.elements.descriptions.children).map(
      (li) => li.textContent ?? "",
    );
    for (const line of shown) {
      const match = answer.descriptions.find((d) =>
        line.startsWith(d.subject.replace("_", " ")),
      );
      expect(match).toBeDefined();
      expect(line.endsWith(match!.text)).toBe(true);
    }
  });
});

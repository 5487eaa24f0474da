// @vitest-environment happy-dom
import { describe, expect, it, vi } from "vitest";

import { renderCandidates, renderGrid, renderHistory } from "../src/grid.js";
import { normalizeSelection } from "../src/state.js";
import type { GridHandlers } from "../src/grid.js";
import type { SessionState } from "../src/types.js";

const state: SessionState = {
  id: "abc",
  bars: 2,
  ticks_per_bar: 8,
  slots_per_bar: 2,
  sheet: {
    melody: ["C4:2", "E4:2", "G4:2", "E4:2"],
    chords: ["Cmaj", "Amin", "Gdom7", "Cmaj"],
  },
  pins: [["melody", 1]],
  history_length: 0,
};

const noopHandlers: GridHandlers = {
  onCellPointerDown: () => undefined,
  onCellPointerEnter: () => undefined,
  onPinToggle: () => undefined,
};

describe("renderGrid", () => {
  it("renders one cell per slot per track with pin and selection classes", () => {
    const container = document.createElement("div");
    const selection = normalizeSelection("chords", 1, 2);
    renderGrid(container, state, selection, noopHandlers);

    const cells = container.querySelectorAll("button.cell");
    expect(cells.length).toBe(8);
    const pinnedCell = container.querySelector('[data-track="melody"][data-slot="1"]');
    expect(pinnedCell?.classList.contains("pinned")).toBe(true);
    const selected = container.querySelectorAll(".cell.selected");
    expect(selected.length).toBe(2);
    selected.forEach((el) => expect((el as HTMLElement).dataset.track).toBe("chords"));
  });

  it("routes pin clicks without triggering cell selection", () => {
    const container = document.createElement("div");
    const onPinToggle = vi.fn();
    const onCellPointerDown = vi.fn();
    renderGrid(container, state, null, { ...noopHandlers, onPinToggle, onCellPointerDown });

    const pin = container.querySelector<HTMLElement>('[data-track="chords"][data-slot="0"] .pin');
    pin?.dispatchEvent(new MouseEvent("click", { bubbles: true }));
    expect(onPinToggle).toHaveBeenCalledWith("chords", 0);
    expect(onCellPointerDown).not.toHaveBeenCalled();
  });
});

describe("renderCandidates", () => {
  it("highlights changed cells and wires Accept buttons", () => {
    const container = document.createElement("div");
    const onAccept = vi.fn();
    renderCandidates(
      container,
      state,
      "chords",
      1,
      [{ cells: ["Amin", "Cmaj"] }, { cells: ["Gdom7", "Cmaj"] }],
      onAccept,
    );

    const cards = container.querySelectorAll(".candidate");
    expect(cards.length).toBe(2);
    // first candidate: slot 1 unchanged, slot 2 changed
    expect(cards[0].querySelectorAll(".cell.changed").length).toBe(1);
    expect(cards[1].querySelectorAll(".cell.changed").length).toBe(2);

    const button = cards[1].querySelector("button.accept") as HTMLButtonElement;
    button.click();
    expect(onAccept).toHaveBeenCalledWith(1);
  });
});

describe("renderHistory", () => {
  it("shows a chip per snapshot and a placeholder when empty", () => {
    const container = document.createElement("div");
    renderHistory(container, []);
    expect(container.textContent).toContain("no edits yet");

    renderHistory(container, [state.sheet, state.sheet]);
    expect(container.querySelectorAll(".history-chip").length).toBe(2);
  });
});

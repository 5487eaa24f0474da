/** DOM rendering for the slot grid, candidate panel, and history strip. */

import {
  Selection,
  diffSlots,
  pinsToSet,
  selectionContains,
  slotLabel,
} from "./state.js";
import type { Candidate, SessionState, Sheet, Track, } from "./types.js";
import { TRACKS } from "./types.js";

export interface GridHandlers {
  onCellPointerDown(track: Track, slot: number, ev: PointerEvent): void;
  onCellPointerEnter(track: Track, slot: number): void;
  onPinToggle(track: Track, slot: number): void;
}

export function renderGrid(
  container: HTMLElement,
  state: SessionState,
  selection: Selection | null,
  handlers: GridHandlers,
): void {
  container.textContent = "";
  const pinned = pinsToSet(state.pins);
  const nSlots = state.bars * state.slots_per_bar;

  const header = document.createElement("div");
  header.className = "grid-row grid-header";
  header.appendChild(rowLabel(""));
  for (let slot = 0; slot < nSlots; slot++) {
    const cell = document.createElement("div");
    cell.className = "grid-slot-label";
    cell.textContent = slotLabel(state, slot);
    header.appendChild(cell);
  }
  container.appendChild(header);

  for (const track of TRACKS) {
    const row = document.createElement("div");
    row.className = "grid-row";
    row.dataset.track = track;
    row.appendChild(rowLabel(track));
    state.sheet[track].forEach((token, slot) => {
      const cell = document.createElement("button");
      cell.type = "button";
      cell.className = "cell";
      cell.dataset.track = track;
      cell.dataset.slot = String(slot);
      if (pinned.has(`${track}:${slot}`)) cell.classList.add("pinned");
      if (selectionContains(selection, track, slot)) cell.classList.add("selected");

      const tokenEl = document.createElement("span");
      tokenEl.className = "token";
      tokenEl.textContent = token;
      cell.appendChild(tokenEl);

      const pinEl = document.createElement("span");
      pinEl.className = "pin";
      pinEl.title = "pin / unpin";
      pinEl.textContent = "●";
      pinEl.addEventListener("click", (ev) => {
        ev.stopPropagation();
        handlers.onPinToggle(track, slot);
      });
      cell.appendChild(pinEl);

      cell.addEventListener("pointerdown", (ev) => handlers.onCellPointerDown(track, slot, ev));
      cell.addEventListener("pointerenter", () => handlers.onCellPointerEnter(track, slot));
      row.appendChild(cell);
    });
    container.appendChild(row);
  }
}

function rowLabel(text: string): HTMLElement {
  const el = document.createElement("div");
  el.className = "grid-row-label";
  el.textContent = text;
  return el;
}

export function renderCandidates(
  container: HTMLElement,
  state: SessionState,
  track: Track,
  start: number,
  candidates: Candidate[],
  onAccept: (index: number) => void,
): void {
  container.textContent = "";
  candidates.forEach((candidate, index) => {
    const card = document.createElement("div");
    card.className = "candidate";
    const changed = new Set(diffSlots(state.sheet[track], candidate.cells, start));

    const cells = document.createElement("div");
    cells.className = "candidate-cells";
    candidate.cells.forEach((token, i) => {
      const cell = document.createElement("span");
      cell.className = "cell";
      if (changed.has(start + i)) cell.classList.add("changed");
      cell.textContent = token;
      cells.appendChild(cell);
    });
    card.appendChild(cells);

    const footer = document.createElement("div");
    footer.className = "candidate-footer";
    const label = document.createElement("span");
    label.textContent = changed.size === 0 ? "unchanged" : `${changed.size} changed`;
    footer.appendChild(label);
    const accept = document.createElement("button");
    accept.type = "button";
    accept.className = "accept";
    accept.textContent = `Accept #${index + 1}`;
    accept.addEventListener("click", () => onAccept(index));
    footer.appendChild(accept);
    card.appendChild(footer);

    container.appendChild(card);
  });
}

export function renderHistory(container: HTMLElement, snapshots: Sheet[]): void {
  container.textContent = "";
  if (snapshots.length === 0) {
    const empty = document.createElement("span");
    empty.className = "history-empty";
    empty.textContent = "no edits yet";
    container.appendChild(empty);
    return;
  }
  snapshots.forEach((sheet, i) => {
    const chip = document.createElement("div");
    chip.className = "history-chip";
    chip.title = `${sheet.melody.join(" ")}\n${sheet.chords.join(" ")}`;
    chip.textContent = `#${i + 1}`;
    container.appendChild(chip);
  });
}

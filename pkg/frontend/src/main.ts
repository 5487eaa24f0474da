/** Application wiring: session setup form, grid interaction, inpainting. */

import { ApiClient, ApiError } from "./api.js";
import { renderCandidates, renderGrid, renderHistory } from "./grid.js";
import { Selection, isPinned, normalizeSelection } from "./state.js";
import type { InpaintResponse, SessionState, Track } from "./types.js";

const api = new ApiClient("");

let state: SessionState | null = null;
let selection: Selection | null = null;
let dragAnchor: { track: Track; slot: number } | null = null;
let pending: InpaintResponse | null = null;

const $ = <T extends HTMLElement>(id: string): T => {
  const el = document.getElementById(id);
  if (!el) throw new Error(`missing element #${id}`);
  return el as T;
};

function setStatus(text: string, isError = false): void {
  const el = $("status");
  el.textContent = text;
  el.classList.toggle("error", isError);
}

function redraw(): void {
  if (!state) return;
  renderGrid($("grid"), state, selection, {
    onCellPointerDown(track, slot, ev) {
      ev.preventDefault();
      dragAnchor = { track, slot };
      selection = normalizeSelection(track, slot, slot);
      redraw();
    },
    onCellPointerEnter(track, slot) {
      if (dragAnchor && dragAnchor.track === track) {
        selection = normalizeSelection(track, dragAnchor.slot, slot);
        redraw();
      }
    },
    onPinToggle(track, slot) {
      void togglePin(track, slot);
    },
  });
  const sel = $("selection-info");
  sel.textContent = selection
    ? `${selection.track} slots ${selection.start}–${selection.end - 1}`
    : "drag across cells to select a region";
  ($("regenerate") as HTMLButtonElement).disabled = selection === null;
}

async function togglePin(track: Track, slot: number): Promise<void> {
  if (!state) return;
  try {
    state = await api.setPins(state.id, [
      { track, slot, pinned: !isPinned(state, track, slot) },
    ]);
    redraw();
  } catch (err) {
    reportError(err);
  }
}

async function refreshHistory(): Promise<void> {
  if (!state) return;
  const { history } = await api.history(state.id);
  renderHistory($("history"), history);
}

async function createSession(ev: Event): Promise<void> {
  ev.preventDefault();
  const value = (id: string) => ($(id) as HTMLInputElement).value;
  try {
    state = await api.createSession({
      melody_corpus: value("melody-corpus"),
      chord_corpus: value("chord-corpus"),
      order: Number(value("order")),
      bars: Number(value("bars")),
      ticks_per_bar: Number(value("ticks-per-bar")),
      slots_per_bar: Number(value("slots-per-bar")),
      seed: Number(value("seed")),
    });
    selection = null;
    pending = null;
    $("candidates").textContent = "";
    $("editor").hidden = false;
    setStatus(`session ${state.id.slice(0, 8)} created`);
    redraw();
    await refreshHistory();
  } catch (err) {
    reportError(err);
  }
}

async function regenerate(): Promise<void> {
  if (!state || !selection) return;
  const count = Number(($("count") as HTMLInputElement).value);
  const seed = Number(($("inpaint-seed") as HTMLInputElement).value);
  try {
    pending = await api.inpaint(state.id, {
      track: selection.track,
      start: selection.start,
      end: selection.end,
      count,
      seed,
    });
    setStatus(`${pending.candidates.length} candidate(s) for ${pending.track} ${pending.start}–${pending.end - 1}`);
    renderCandidates(
      $("candidates"),
      state,
      pending.track,
      pending.start,
      pending.candidates,
      (index) => void acceptCandidate(index),
    );
  } catch (err) {
    reportError(err);
  }
}

async function acceptCandidate(index: number): Promise<void> {
  if (!state || !pending) return;
  try {
    state = await api.accept(state.id, index);
    pending = null;
    $("candidates").textContent = "";
    setStatus("candidate accepted");
    redraw();
    await refreshHistory();
  } catch (err) {
    reportError(err);
  }
}

async function exportSheet(): Promise<void> {
  if (!state) return;
  try {
    const sheet = await api.exportSheet(state.id);
    $("export-output").textContent = JSON.stringify(sheet, null, 2);
  } catch (err) {
    reportError(err);
  }
}

function reportError(err: unknown): void {
  if (err instanceof ApiError && err.isInfeasible) {
    setStatus(`infeasible: ${err.message}`, true);
  } else if (err instanceof Error) {
    setStatus(err.message, true);
  } else {
    setStatus(String(err), true);
  }
}

export function init(): void {
  $("setup-form").addEventListener("submit", (ev) => void createSession(ev));
  $("regenerate").addEventListener("click", () => void regenerate());
  $("export").addEventListener("click", () => void exportSheet());
  $("clear-selection").addEventListener("click", () => {
    selection = null;
    redraw();
  });
  document.addEventListener("pointerup", () => {
    dragAnchor = null;
  });
}

if (typeof document !== "undefined" && document.getElementById("setup-form")) {
  init();
}

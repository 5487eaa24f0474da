/** Pure UI-state helpers: slot selection, pins, and candidate diffs. */

import type { SessionState, Track } from "./types.js";

/** Half-open slot range on a single track. */
export interface Selection {
  track: Track;
  start: number;
  end: number;
}

/** Drag from anchor to cursor, in either direction, inclusive of both. */
export function normalizeSelection(track: Track, anchor: number, cursor: number): Selection {
  const lo = Math.min(anchor, cursor);
  const hi = Math.max(anchor, cursor);
  return { track, start: lo, end: hi + 1 };
}

export function selectionContains(sel: Selection | null, track: Track, slot: number): boolean {
  return sel !== null && sel.track === track && slot >= sel.start && slot < sel.end;
}

export function pinKey(track: Track, slot: number): string {
  return `${track}:${slot}`;
}

export function pinsToSet(pins: [string, number][]): Set<string> {
  return new Set(pins.map(([track, slot]) => `${track}:${slot}`));
}

export function isPinned(state: SessionState, track: Track, slot: number): boolean {
  return state.pins.some(([t, s]) => t === track && s === slot);
}

/**
 * Slots (absolute indices) where a candidate differs from the current
 * sheet; `start` is the candidate's offset into the track.
 */
export function diffSlots(current: string[], candidate: string[], start: number): number[] {
  const changed: number[] = [];
  for (let i = 0; i < candidate.length; i++) {
    if (current[start + i] !== candidate[i]) {
      changed.push(start + i);
    }
  }
  return changed;
}

/** Sheet with a candidate applied, without mutating the original. */
export function applyCandidate(
  cells: string[],
  candidate: string[],
  start: number,
): string[] {
  const next = cells.slice();
  next.splice(start, candidate.length, ...candidate);
  return next;
}

export function slotLabel(state: SessionState, slot: number): string {
  const bar = Math.floor(slot / state.slots_per_bar) + 1;
  const beat = (slot % state.slots_per_bar) + 1;
  return `${bar}.${beat}`;
}

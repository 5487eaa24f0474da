/** Wire types for the stylechain inpainting REST API. */

export type Track = "melody" | "chords";

export const TRACKS: Track[] = ["melody", "chords"];

/** One token string per grid slot, per track. */
export interface Sheet {
  melody: string[];
  chords: string[];
}

export interface SessionState {
  id: string;
  bars: number;
  ticks_per_bar: number;
  slots_per_bar: number;
  sheet: Sheet;
  pins: [string, number][];
  history_length: number;
}

export interface CreateSessionRequest {
  melody_corpus: string;
  chord_corpus: string;
  order: number;
  bars: number;
  ticks_per_bar: number;
  slots_per_bar: number;
  seed: number;
}

export interface PinChange {
  track: Track;
  slot: number;
  pinned: boolean;
}

export interface InpaintRequest {
  track: Track;
  start: number;
  end: number;
  count: number;
  seed: number;
}

export interface Candidate {
  cells: string[];
}

export interface InpaintResponse {
  track: Track;
  start: number;
  end: number;
  candidates: Candidate[];
}

export interface HistoryResponse {
  history: Sheet[];
}

/** Timed-track export format produced by GET /sessions/{id}/export. */
export interface LeadSheetExport {
  ticks_per_bar: number;
  bars: number;
  melody: { onset: number; token: string }[];
  chords: { onset: number; token: string }[];
}

export interface ApiErrorBody {
  code: string;
  message: string;
  detail?: unknown;
}

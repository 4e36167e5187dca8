// Pure projections of the service documents into what the page shows.
// Deliberately no arithmetic on matrix entries beyond lookups: every
// number displayed comes from a service response.

import type { MatrixDoc, MoveDoc, StateDoc } from "./api.js";

export type Cell = { text: string; kind: "entry" | "diagonal" | "infinite" };

export function entryGlyph(value: number | string | null): Cell {
  if (value === null) return { text: "∗", kind: "diagonal" };
  if (value === "inf") return { text: "∞", kind: "infinite" };
  if (value === "-inf") return { text: "−∞", kind: "infinite" };
  return { text: String(value), kind: "entry" };
}

export function matrixGrid(matrix: MatrixDoc): Cell[][] {
  const dim = matrix.rank + 1;
  const rows: Cell[][] = [];
  for (let p = 0; p < dim; p++) {
    const row: Cell[] = [];
    for (let q = 0; q < dim; q++) {
      row.push(entryGlyph(matrix.entries[p * dim + q]));
    }
    rows.push(row);
  }
  return rows;
}

// Root indices in increasing order, mirroring the gap vector indexing.
export function rootIndices(rank: number): number[] {
  const out: number[] = [];
  for (let a = 0; a < rank; a++) {
    for (let b = a + 1; b <= rank; b++) {
      out.push((1 << b) - (1 << a));
    }
  }
  return out.sort((x, y) => x - y);
}

export function gapAtRoot(state: StateDoc, root: number): number | undefined {
  const order = rootIndices(state.matrix.rank);
  const idx = order.indexOf(Math.abs(root));
  return idx >= 0 ? state.gap[idx] : undefined;
}

// Legal moves first, ordered by predicted defect, then by the gap at the
// move's root index (descending: attack the widest pair), then by root
// index ascending. Illegal moves trail in root order.
export function sortMoves(state: StateDoc, moves: MoveDoc[]): MoveDoc[] {
  const key = (m: MoveDoc): [number, number, number, number] => {
    if (!m.legality || m.predicted_defect === null || m.predicted_defect === undefined) {
      return [1, 0, 0, Math.abs(m.root) * 2 + (m.root < 0 ? 1 : 0)];
    }
    const gap = gapAtRoot(state, m.root) ?? 0;
    return [
      0,
      m.predicted_defect,
      -gap,
      Math.abs(m.root) * 2 + (m.root < 0 ? 1 : 0),
    ];
  };
  return [...moves].sort((a, b) => {
    const ka = key(a);
    const kb = key(b);
    for (let i = 0; i < ka.length; i++) {
      if (ka[i] !== kb[i]) return ka[i] - kb[i];
    }
    return 0;
  });
}

export function formatOffset(offset: StateDoc["offset"]): string {
  const classical =
    offset.classical === null || offset.classical === 0
      ? "0"
      : (offset.classical > 0 ? "+" : "") + offset.classical;
  const delta = (offset.delta >= 0 ? "+" : "") + offset.delta + "d";
  return `${classical} ${delta}`;
}

export type ViewModel = {
  sessionId: string;
  grid: Cell[][];
  defect: number | null;
  initialDefect: number;
  gapBar: number[];
  offsetText: string;
  moves: MoveDoc[];
  historyLength: number;
  success: boolean;
  exportString: string;
};

export function buildViewModel(
  state: StateDoc,
  moves: MoveDoc[],
): ViewModel {
  return {
    sessionId: state.id,
    grid: matrixGrid(state.matrix),
    defect: state.defect,
    initialDefect: state.initial_defect,
    gapBar: [...state.gap],
    offsetText: formatOffset(state.offset),
    moves: sortMoves(state, moves),
    historyLength: state.history_length,
    success: state.success,
    exportString: state.trace,
  };
}

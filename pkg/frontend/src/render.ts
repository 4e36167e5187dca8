// DOM rendering for the view model. Pure presentation: no engine math.

import type { MoveDoc } from "./api.js";
import type { ViewModel } from "./model.js";

export function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  className?: string,
  text?: string,
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  if (className) node.className = className;
  if (text !== undefined) node.textContent = text;
  return node;
}

export function renderGrid(vm: ViewModel): HTMLTableElement {
  const table = el("table", "matrix");
  for (const row of vm.grid) {
    const tr = el("tr");
    for (const cell of row) {
      tr.appendChild(el("td", `cell ${cell.kind}`, cell.text));
    }
    table.appendChild(tr);
  }
  return table;
}

export function renderGapBar(vm: ViewModel): HTMLDivElement {
  const bar = el("div", "gap-bar");
  for (const g of vm.gapBar) {
    const seg = el("div", g > 2 ? "gap wide" : "gap", String(g));
    seg.style.height = `${12 + Math.max(g, 0) * 10}px`;
    bar.appendChild(seg);
  }
  return bar;
}

export function describeMove(move: MoveDoc): string {
  const root = (move.root > 0 ? "+" : "") + move.root;
  if (!move.legality) {
    return `${root}  —  ${move.error ?? "illegal"}`;
  }
  return `${root}@${move.auto_exponent}  →  defect ${move.predicted_defect}`;
}

export function renderMoves(
  vm: ViewModel,
  onApply: (move: MoveDoc) => void,
): HTMLUListElement {
  const list = el("ul", "moves");
  for (const move of vm.moves) {
    const item = el("li", move.legality ? "move" : "move illegal");
    const button = el("button", undefined, describeMove(move));
    button.disabled = !move.legality;
    button.addEventListener("click", () => onApply(move));
    item.appendChild(button);
    list.appendChild(item);
  }
  return list;
}

export function renderStatus(vm: ViewModel): HTMLDivElement {
  const box = el("div", "status");
  box.appendChild(
    el("div", "defect", `defect ${vm.defect} (started at ${vm.initialDefect})`),
  );
  box.appendChild(el("div", "offset", `offset ${vm.offsetText}`));
  box.appendChild(el("div", "history", `${vm.historyLength} steps`));
  if (vm.success) {
    const banner = el("div", "banner success", "defect reduced — strategy found");
    const export_ = el("code", "export", vm.exportString);
    banner.appendChild(export_);
    box.appendChild(banner);
  }
  return box;
}

export function renderError(kind: string, message: string): HTMLDivElement {
  return el("div", "banner error", `${kind}: ${message}`);
}

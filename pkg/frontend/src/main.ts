// Wiring: residual picker, session lifecycle, apply/undo with at most one
// mutation in flight.

import { HttpClient, ServiceError, type Client, type MoveDoc } from "./api.js";
import { buildViewModel, type ViewModel } from "./model.js";
import {
  el,
  renderError,
  renderGapBar,
  renderGrid,
  renderMoves,
  renderStatus,
} from "./render.js";

export class Explorer {
  private sessionId: string | null = null;
  private busy = false;

  constructor(
    private readonly client: Client,
    private readonly root: HTMLElement,
  ) {}

  async loadResidual(rank: number): Promise<void> {
    this.root.replaceChildren(el("div", "loading", "loading residual list…"));
    try {
      const listing = await this.client.listResidual(rank);
      const picker = el("div", "picker");
      picker.appendChild(el("h2", undefined, `rank ${rank} residual quasicones`));
      if (listing.residual.length === 0) {
        picker.appendChild(
          el("div", "empty", "no residual quasicones — everything is solved"),
        );
      }
      for (const entry of listing.residual) {
        const button = el(
          "button",
          "pick",
          `#${entry.index} — defect ${entry.defect}`,
        );
        button.addEventListener("click", () =>
          this.openSession(rank, entry.index),
        );
        picker.appendChild(button);
      }
      this.root.replaceChildren(picker);
    } catch (err) {
      this.root.replaceChildren(
        renderError("service", err instanceof Error ? err.message : String(err)),
      );
    }
  }

  async openSession(rank: number, index: number): Promise<void> {
    const { id } = await this.client.createSession({
      residual: { rank, index },
    });
    this.sessionId = id;
    await this.refresh();
  }

  async refresh(flash?: HTMLElement): Promise<void> {
    if (!this.sessionId) return;
    const state = await this.client.getState(this.sessionId);
    const moves = await this.client.getMoves(this.sessionId);
    this.render(buildViewModel(state, moves.moves), flash);
  }

  private render(vm: ViewModel, flash?: HTMLElement): void {
    const page = el("div", "explorer");
    page.appendChild(renderStatus(vm));
    if (flash) page.appendChild(flash);
    page.appendChild(renderGrid(vm));
    page.appendChild(renderGapBar(vm));
    page.appendChild(renderMoves(vm, (move) => void this.apply(move)));
    const undo = el("button", "undo", "undo");
    undo.disabled = vm.historyLength === 0;
    undo.addEventListener("click", () => void this.undo());
    page.appendChild(undo);
    this.root.replaceChildren(page);
  }

  async apply(move: MoveDoc): Promise<void> {
    if (!this.sessionId || this.busy) return;
    this.busy = true;
    try {
      await this.client.apply(this.sessionId, move.root);
      await this.refresh();
    } catch (err) {
      if (err instanceof ServiceError && "kind" in err.payload) {
        await this.refresh(renderError(err.payload.kind, err.payload.message));
      } else {
        throw err;
      }
    } finally {
      this.busy = false;
    }
  }

  async undo(): Promise<void> {
    if (!this.sessionId || this.busy) return;
    this.busy = true;
    try {
      await this.client.undo(this.sessionId);
      await this.refresh();
    } finally {
      this.busy = false;
    }
  }
}

export function boot(): void {
  const mount = document.getElementById("app");
  if (!mount) return;
  const explorer = new Explorer(new HttpClient(), mount);
  const rankInput = document.getElementById("rank") as HTMLInputElement | null;
  const rank = rankInput ? Number(rankInput.value) : 4;
  void explorer.loadResidual(rank);
}

if (typeof document !== "undefined" && document.getElementById("app")) {
  boot();
}

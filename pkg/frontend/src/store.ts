/** Session state: last accepted ranking payload plus polling.

The displayed revision never decreases: a payload older than the one
on screen is dropped, which makes slow poll responses harmless.
*/

import type { ApiClient } from "./api.js";
import type { RankingItem, RankingResponse } from "./types.js";

export class SessionStore {
  private payload: RankingResponse | null = null;
  private conflict = false;
  private readonly listeners = new Set<() => void>();

  get revision(): number {
    return this.payload?.revision ?? 0;
  }

  get ranking(): RankingItem[] {
    return this.payload?.ranking ?? [];
  }

  get current(): RankingResponse | null {
    return this.payload;
  }

  /** True after a 409 until a fresh payload is ingested. */
  get needsReload(): boolean {
    return this.conflict;
  }

  /** Accept the payload unless it is older than the displayed one. */
  ingest(payload: RankingResponse): boolean {
    if (this.payload !== null && payload.revision < this.payload.revision) {
      return false;
    }
    this.payload = payload;
    this.conflict = false;
    this.emit();
    return true;
  }

  markConflict(): void {
    this.conflict = true;
    this.emit();
  }

  subscribe(listener: () => void): () => void {
    this.listeners.add(listener);
    return () => {
      this.listeners.delete(listener);
    };
  }

  private emit(): void {
    for (const listener of this.listeners) {
      listener();
    }
  }
}

export class RankingPoller {
  private timer: ReturnType<typeof setInterval> | null = null;

  constructor(
    private readonly client: ApiClient,
    private readonly projectId: string,
    private readonly store: SessionStore,
    readonly intervalMs: number = 5000,
  ) {}

  start(): void {
    if (this.timer !== null) {
      return;
    }
    this.timer = setInterval(() => {
      void this.poll();
    }, this.intervalMs);
  }

  stop(): void {
    if (this.timer !== null) {
      clearInterval(this.timer);
      this.timer = null;
    }
  }

  get running(): boolean {
    return this.timer !== null;
  }

  async poll(): Promise<void> {
    // Transient poll failures must not kill the loop; the next tick retries.
    try {
      const payload = await this.client.getRanking(this.projectId);
      this.store.ingest(payload);
    } catch {
      return;
    }
  }
}

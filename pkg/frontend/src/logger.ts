import type { ApiClient } from "./api.js";
import type { EventRecord, Schedule } from "./types.js";
import { defaultSchedule } from "./types.js";

/**
 * At-least-once interaction log uploader.
 *
 * Records queue locally and upload in the background, so the panel never
 * waits on the network. A batch stays queued until the service answers
 * 200; network failures and server errors retry after a delay. A 200
 * settles the batch even if the service rejected individual records,
 * since resending those would only be rejected again.
 */
export class InteractionLogger {
  private readonly queue: EventRecord[] = [];
  private flushing = false;
  private online = true;
  private cancelRetry: (() => void) | null = null;
  private idleWaiters: (() => void)[] = [];

  onStatusChange: ((online: boolean) => void) | null = null;

  constructor(
    private readonly api: ApiClient,
    private readonly retryDelayMs: number,
    private readonly schedule: Schedule = defaultSchedule,
  ) {}

  record(event: EventRecord): void {
    this.queue.push(event);
    void this.flush();
  }

  pendingCount(): number {
    return this.queue.length;
  }

  isOnline(): boolean {
    return this.online;
  }

  /** Resolves once the queue is empty and no upload is in flight. */
  whenIdle(): Promise<void> {
    if (this.queue.length === 0 && !this.flushing) return Promise.resolve();
    return new Promise((resolve) => this.idleWaiters.push(resolve));
  }

  private setOnline(online: boolean): void {
    if (online === this.online) return;
    this.online = online;
    this.onStatusChange?.(online);
  }

  private async flush(): Promise<void> {
    if (this.flushing || this.queue.length === 0) return;
    if (this.cancelRetry) {
      this.cancelRetry();
      this.cancelRetry = null;
    }
    this.flushing = true;
    try {
      while (this.queue.length > 0) {
        const batch = this.queue.slice();
        let delivered = false;
        try {
          delivered = await this.api.postEvents(batch);
        } catch {
          delivered = false;
        }
        if (!delivered) {
          this.setOnline(false);
          this.cancelRetry = this.schedule(() => {
            this.cancelRetry = null;
            void this.flush();
          }, this.retryDelayMs);
          return;
        }
        this.setOnline(true);
        this.queue.splice(0, batch.length);
      }
    } finally {
      this.flushing = false;
      if (this.queue.length === 0) {
        const waiters = this.idleWaiters;
        this.idleWaiters = [];
        for (const resolve of waiters) resolve();
      }
    }
  }
}

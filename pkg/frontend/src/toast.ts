import type { Schedule } from "./types.js";
import { defaultSchedule } from "./types.js";

export type ToastKind = "auto" | "complete" | "info";

export interface ToastItem {
  id: number;
  kind: ToastKind;
  message: string;
  /** Present only on toasts that offer an undo action. */
  onUndo?: () => void;
}

const DISMISS_MS = 6000;

/** Holds the active toasts; the view re-renders on every change. */
export class Toasts {
  private items: ToastItem[] = [];
  private nextId = 1;
  private readonly timers = new Map<number, () => void>();

  onChange: ((items: readonly ToastItem[]) => void) | null = null;

  constructor(private readonly schedule: Schedule = defaultSchedule) {}

  active(): readonly ToastItem[] {
    return this.items;
  }

  show(kind: ToastKind, message: string, onUndo?: () => void): number {
    const id = this.nextId++;
    const item: ToastItem = { id, kind, message };
    if (onUndo) item.onUndo = onUndo;
    this.items = [...this.items, item];
    this.timers.set(
      id,
      this.schedule(() => this.dismiss(id), DISMISS_MS),
    );
    this.onChange?.(this.items);
    return id;
  }

  dismiss(id: number): void {
    const cancel = this.timers.get(id);
    if (cancel) {
      cancel();
      this.timers.delete(id);
    }
    const before = this.items.length;
    this.items = this.items.filter((item) => item.id !== id);
    if (this.items.length !== before) this.onChange?.(this.items);
  }

  clear(): void {
    for (const cancel of this.timers.values()) cancel();
    this.timers.clear();
    if (this.items.length > 0) {
      this.items = [];
      this.onChange?.(this.items);
    }
  }
}

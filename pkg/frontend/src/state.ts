import type { ElementId, RecommendationItem, SessionContext } from "./types.js";

/** Storage seam so tests can run without a browser localStorage. */
export interface KeyValueStore {
  get(key: string): string | null;
  set(key: string, value: string): void;
}

export const memoryStore = (): KeyValueStore => {
  const data = new Map<string, string>();
  return {
    get: (key) => data.get(key) ?? null,
    set: (key, value) => void data.set(key, value),
  };
};

const ENABLED_KEY = "hmi-adapt-demo/assistance-enabled";

export interface PendingPrediction {
  item: RecommendationItem;
  tier: string;
  version: string;
}

/**
 * Assistance-side session state: whether adaptation is on, the rolling
 * window of recent interactions, and the latest unconsumed prediction.
 * The on/off choice survives reloads; everything else is per session.
 */
export class AssistanceState {
  enabled: boolean;
  context: SessionContext | null = null;
  pending: PendingPrediction | null = null;
  private readonly window: ElementId[] = [];

  constructor(
    private readonly capacity: number,
    private readonly store: KeyValueStore,
  ) {
    let saved: string | null = null;
    try {
      saved = store.get(ENABLED_KEY);
    } catch {
      saved = null;
    }
    this.enabled = saved === null ? true : saved === "true";
  }

  login(context: SessionContext): void {
    this.context = context;
    this.window.length = 0;
    this.pending = null;
  }

  setEnabled(enabled: boolean): void {
    this.enabled = enabled;
    if (!enabled) this.pending = null;
    try {
      this.store.set(ENABLED_KEY, String(enabled));
    } catch {
      // Storage may be unavailable; the toggle still works for this session.
    }
  }

  pushInteraction(element: ElementId): void {
    this.window.push(element);
    while (this.window.length > this.capacity) this.window.shift();
  }

  recentInteractions(): ElementId[] {
    return [...this.window];
  }

  dropLastInteraction(): void {
    this.window.pop();
  }
}

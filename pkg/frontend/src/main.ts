import { ApiClient, fetchTransport } from "./api.js";
import { Assistant } from "./assistant.js";
import { defaultConfig, type DemoConfig } from "./config.js";
import { InteractionLogger } from "./logger.js";
import { AssistanceState, memoryStore, type KeyValueStore } from "./state.js";
import { Toasts } from "./toast.js";
import { defaultSchedule, type Clock, type Schedule, type Transport } from "./types.js";
import { loadVocabulary, Vocabulary } from "./vocabulary.js";
import { PanelView } from "./view.js";

export interface MountOverrides {
  transport?: Transport;
  store?: KeyValueStore;
  schedule?: Schedule;
  clock?: Clock;
  vocabulary?: Vocabulary;
}

export interface MountedPanel {
  config: DemoConfig;
  vocabulary: Vocabulary;
  assistant: Assistant;
  logger: InteractionLogger;
  toasts: Toasts;
  view: PanelView;
}

/** Builds the panel inside root. Overrides exist for tests. */
export async function mount(
  root: HTMLElement,
  config: Partial<DemoConfig> = {},
  overrides: MountOverrides = {},
): Promise<MountedPanel> {
  const merged: DemoConfig = { ...defaultConfig, ...config };
  const vocabulary =
    overrides.vocabulary ?? (await loadVocabulary(merged.vocabularyUrl));

  const transport = overrides.transport ?? fetchTransport(merged.apiBase);
  const api = new ApiClient(transport);
  const schedule = overrides.schedule ?? defaultSchedule;
  const store = overrides.store ?? browserStore();

  const state = new AssistanceState(merged.historyWindow, store);
  const logger = new InteractionLogger(api, merged.retryDelayMs, schedule);
  const toasts = new Toasts(schedule);
  const assistant = new Assistant(
    merged,
    vocabulary,
    state,
    api,
    logger,
    toasts,
    overrides.clock ?? (() => Date.now()),
  );
  const view = new PanelView(root, assistant, vocabulary, logger, toasts);
  view.render();
  return { config: merged, vocabulary, assistant, logger, toasts, view };
}

function browserStore(): KeyValueStore {
  try {
    const probeKey = "hmi-adapt-demo/probe";
    window.localStorage.setItem(probeKey, "1");
    window.localStorage.removeItem(probeKey);
    return {
      get: (key) => window.localStorage.getItem(key),
      set: (key, value) => window.localStorage.setItem(key, value),
    };
  } catch {
    return memoryStore();
  }
}

declare global {
  interface Window {
    hmiAdaptDemo?: Promise<MountedPanel>;
  }
}

const autoRoot = typeof document !== "undefined" ? document.getElementById("app") : null;
if (autoRoot) {
  window.hmiAdaptDemo = mount(autoRoot);
}

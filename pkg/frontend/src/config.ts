/** Runtime configuration for the demo panel. */

export interface DemoConfig {
  /** Base URL of the prediction service, no trailing slash. */
  apiBase: string;
  /** Path of the vocabulary JSON document, relative to the page. */
  vocabularyUrl: string;
  /** Scores at or above this value auto-execute the predicted action. */
  autoExecuteThreshold: number;
  /** How many recent interactions to send with a recommendation request. */
  historyWindow: number;
  /** Delay before a failed event upload is retried. */
  retryDelayMs: number;
  userId: string;
}

export const defaultConfig: DemoConfig = {
  apiBase: "",
  vocabularyUrl: "./vocabulary.json",
  autoExecuteThreshold: 0.5,
  historyWindow: 2,
  retryDelayMs: 2000,
  userId: "demo-operator",
};

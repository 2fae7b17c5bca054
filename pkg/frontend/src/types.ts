/** Shared types for the demo panel and its backend client. */

export type ElementId = string;

/** The vocabulary document served to and shared with the backend. */
export interface VocabularyDoc {
  elements: ElementId[];
  begin_marker: ElementId;
  end_marker: ElementId;
  roles: string[];
  shifts: string[];
}

export interface SessionContext {
  role: string;
  shift: string;
}

/** One interaction record in the backend's event-log wire format. */
export interface EventRecord {
  user_id: string;
  element_id: ElementId;
  timestamp_ms: number;
  role: string;
  shift: string;
}

export interface RecommendationItem {
  element_id: ElementId;
  score: number;
  rank: number;
}

export interface RecommendResponseBody {
  recommendations: RecommendationItem[];
  model_tier: string;
  model_order: number;
  model_version: string;
}

export interface HttpReply {
  status: number;
  body: unknown;
}

/**
 * Minimal HTTP seam. The browser build wraps fetch; tests substitute fakes
 * or wrap the real transport to count and intercept calls.
 */
export interface Transport {
  post(path: string, body: unknown, signal?: AbortSignal): Promise<HttpReply>;
  get(path: string): Promise<HttpReply>;
}

export type Clock = () => number;

/** setTimeout seam: schedules fn after ms, returns a cancel function. */
export type Schedule = (fn: () => void, ms: number) => () => void;

export const defaultSchedule: Schedule = (fn, ms) => {
  const handle = setTimeout(fn, ms);
  return () => clearTimeout(handle);
};

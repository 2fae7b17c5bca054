import type { ApiClient } from "./api.js";
import type { DemoConfig } from "./config.js";
import type { InteractionLogger } from "./logger.js";
import type { AssistanceState } from "./state.js";
import type { Toasts } from "./toast.js";
import type { Clock, ElementId, RecommendationItem, SessionContext } from "./types.js";
import type { Vocabulary } from "./vocabulary.js";
import { applyElement, controlOf, initialMachineState, type MachineState } from "./machine.js";

export type InteractionSource = "user" | "auto";

export type ServiceStatus = "ok" | "not_ready" | "offline";

/**
 * Ties the panel together: every interaction mutates the machine model and
 * logs exactly one event, and user-initiated interactions additionally ask
 * the prediction service what comes next.
 *
 * Adaptation is single step on purpose. An auto-executed action logs and
 * counts as an interaction, but never requests the next prediction itself;
 * otherwise a confident chain would walk the whole task without the
 * operator touching anything.
 */
export class Assistant {
  machine: MachineState = initialMachineState();
  highlight: ElementId | null = null;
  predictions: readonly RecommendationItem[] = [];
  predictionMeta: { tier: string; version: string } | null = null;
  serviceStatus: ServiceStatus = "ok";

  onChange: (() => void) | null = null;

  private generation = 0;
  private inflight: AbortController | null = null;

  constructor(
    private readonly config: DemoConfig,
    private readonly vocabulary: Vocabulary,
    readonly state: AssistanceState,
    private readonly api: ApiClient,
    private readonly logger: InteractionLogger,
    private readonly toasts: Toasts,
    private readonly clock: Clock = () => Date.now(),
  ) {}

  login(context: SessionContext): void {
    this.state.login(context);
    this.machine = initialMachineState();
    this.cancelInflight();
    this.highlight = null;
    this.predictions = [];
    this.predictionMeta = null;
    this.toasts.clear();
    this.emit();
  }

  get enabled(): boolean {
    return this.state.enabled;
  }

  setEnabled(enabled: boolean): void {
    this.state.setEnabled(enabled);
    if (!enabled) {
      this.cancelInflight();
      this.highlight = null;
      this.predictions = [];
      this.predictionMeta = null;
    }
    this.emit();
  }

  /**
   * Single entry point for every interaction with a vocabulary element,
   * whether the operator pressed the control or assistance did.
   */
  handleInteraction(element: ElementId, source: InteractionSource): void {
    const context = this.state.context;
    if (context === null || !this.vocabulary.has(element)) return;

    this.machine = applyElement(this.machine, element);
    this.logger.record({
      user_id: this.config.userId,
      element_id: element,
      timestamp_ms: this.clock(),
      role: context.role,
      shift: context.shift,
    });
    this.state.pushInteraction(element);

    // The previous suggestion is stale the moment anything happens.
    this.highlight = null;
    this.state.pending = null;

    if (source === "user" && this.state.enabled) {
      void this.requestAdaptation(context);
    }
    this.emit();
  }

  private cancelInflight(): void {
    this.generation += 1;
    this.inflight?.abort();
    this.inflight = null;
  }

  private async requestAdaptation(context: SessionContext): Promise<void> {
    this.cancelInflight();
    const generation = this.generation;
    const controller = new AbortController();
    this.inflight = controller;

    const recent = this.state.recentInteractions();
    let outcome;
    try {
      outcome = await this.api.recommend(context, recent, 3, controller.signal);
    } catch {
      if (generation !== this.generation) return;
      this.inflight = null;
      this.setServiceStatus("offline");
      return;
    }
    if (generation !== this.generation) return;
    this.inflight = null;

    if (outcome.kind === "not_ready") {
      this.setServiceStatus("not_ready");
      return;
    }
    if (outcome.kind === "rejected") {
      // Nothing the operator can do about a rejected request; stay quiet.
      return;
    }

    this.setServiceStatus("ok");
    const body = outcome.body;
    this.predictions = body.recommendations;
    this.predictionMeta = { tier: body.model_tier, version: body.model_version };
    const top = body.recommendations[0];
    if (!top || !this.state.enabled) {
      this.emit();
      return;
    }
    this.applyPrediction(top, body.model_tier, body.model_version);
  }

  private applyPrediction(top: RecommendationItem, tier: string, version: string): void {
    if (top.element_id === this.vocabulary.endMarker) {
      // Predicting the end marker means the task looks finished; never
      // confirm a batch on the operator's behalf.
      this.toasts.show(
        "complete",
        "Looks like the task is complete. Confirm the batch when you are done.",
      );
      this.emit();
      return;
    }

    if (top.score >= this.config.autoExecuteThreshold) {
      const snapshot = this.machine;
      this.handleInteraction(top.element_id, "auto");
      const label = controlOf(top.element_id)?.label ?? top.element_id;
      const toastId = this.toasts.show("auto", `Did "${label}" for you.`, () => {
        this.machine = snapshot;
        this.state.dropLastInteraction();
        this.toasts.dismiss(toastId);
        this.emit();
      });
      this.emit();
      return;
    }

    this.highlight = top.element_id;
    this.state.pending = { item: top, tier, version };
    this.emit();
  }

  private setServiceStatus(status: ServiceStatus): void {
    if (this.serviceStatus === status) return;
    this.serviceStatus = status;
    this.emit();
  }

  private emit(): void {
    this.onChange?.();
  }
}

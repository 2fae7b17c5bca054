import type { Assistant } from "./assistant.js";
import type { InteractionLogger } from "./logger.js";
import type { Toasts } from "./toast.js";
import type { Vocabulary } from "./vocabulary.js";
import { describeMachine, SCREENS, screenOf, type ScreenId } from "./machine.js";

/**
 * Renders the whole panel from scratch on every change and drives the
 * assistant through delegated click handling. Screen navigation is pure
 * presentation: switching tabs is not an interaction and is never logged.
 */
export class PanelView {
  private currentScreen: ScreenId = "overview";

  constructor(
    private readonly root: HTMLElement,
    private readonly assistant: Assistant,
    private readonly vocabulary: Vocabulary,
    private readonly logger: InteractionLogger,
    private readonly toasts: Toasts,
  ) {
    this.root.addEventListener("click", (event) => this.onClick(event));
    this.assistant.onChange = () => this.render();
    this.toasts.onChange = () => this.render();
    this.logger.onStatusChange = () => this.render();
  }

  render(): void {
    if (this.assistant.state.context === null) {
      this.root.innerHTML = this.loginHtml();
      return;
    }
    this.root.innerHTML = this.panelHtml();
  }

  private onClick(event: Event): void {
    const target = event.target as HTMLElement | null;
    if (!target) return;

    const control = target.closest<HTMLElement>("[data-element]");
    if (control) {
      const element = control.dataset["element"];
      if (element) this.assistant.handleInteraction(element, "user");
      return;
    }

    const tab = target.closest<HTMLElement>("[data-screen]");
    if (tab) {
      const screen = tab.dataset["screen"] as ScreenId | undefined;
      if (screen) {
        this.currentScreen = screen;
        this.render();
      }
      return;
    }

    const undo = target.closest<HTMLElement>("[data-toast-undo]");
    if (undo) {
      const id = Number(undo.dataset["toastUndo"]);
      const item = this.toasts.active().find((toast) => toast.id === id);
      item?.onUndo?.();
      return;
    }

    const dismiss = target.closest<HTMLElement>("[data-toast-dismiss]");
    if (dismiss) {
      this.toasts.dismiss(Number(dismiss.dataset["toastDismiss"]));
      return;
    }

    if (target.closest("#login-btn")) {
      const role = this.select("#role-select");
      const shift = this.select("#shift-select");
      if (role && shift) {
        this.assistant.login({ role, shift });
        this.currentScreen = "overview";
      }
      return;
    }

    if (target.closest("#assist-toggle")) {
      this.assistant.setEnabled(!this.assistant.enabled);
      return;
    }
  }

  private select(selector: string): string | null {
    const node = this.root.querySelector<HTMLSelectElement>(selector);
    return node ? node.value : null;
  }

  private loginHtml(): string {
    const options = (values: readonly string[]) =>
      values.map((value) => `<option value="${value}">${value}</option>`).join("");
    return `
      <div class="login" id="login-form">
        <h1>Mixing line panel</h1>
        <label>Role
          <select id="role-select">${options(this.vocabulary.roles)}</select>
        </label>
        <label>Shift
          <select id="shift-select">${options(this.vocabulary.shifts)}</select>
        </label>
        <button id="login-btn">Sign in</button>
      </div>`;
  }

  private panelHtml(): string {
    const context = this.assistant.state.context;
    const contextLabel = context ? `${context.role} / ${context.shift}` : "";
    return `
      ${this.bannerHtml()}
      <header class="topbar">
        <h1>Mixing line panel</h1>
        <span class="context" id="session-context">${contextLabel}</span>
        <label class="toggle">
          <input type="checkbox" id="assist-toggle" ${this.assistant.enabled ? "checked" : ""}>
          Assistance
        </label>
        <span class="status" id="service-status">${this.statusText()}</span>
      </header>
      <nav class="tabs">${this.tabsHtml()}</nav>
      <main class="screen">${this.screenHtml()}</main>
      <aside class="sidebar">${this.sidebarHtml()}</aside>
      <footer class="machine-line" id="machine-status">${describeMachine(this.assistant.machine)}</footer>
      <div class="toasts" id="toast-area">${this.toastsHtml()}</div>`;
  }

  private bannerHtml(): string {
    if (!this.logger.isOnline()) {
      return `<div class="banner" id="offline-banner">Offline: interactions are queued and will upload when the connection returns.</div>`;
    }
    if (this.assistant.serviceStatus === "offline") {
      return `<div class="banner" id="offline-banner">Prediction service unreachable; the panel keeps working without suggestions.</div>`;
    }
    return "";
  }

  private statusText(): string {
    if (!this.assistant.enabled) return "assistance off";
    switch (this.assistant.serviceStatus) {
      case "not_ready":
        return "prediction model not ready";
      case "offline":
        return "prediction service offline";
      default:
        return "assistance on";
    }
  }

  private tabsHtml(): string {
    const hintScreen =
      this.assistant.highlight !== null ? screenOf(this.assistant.highlight) : undefined;
    return SCREENS.map((screen) => {
      const classes = ["tab"];
      if (screen.id === this.currentScreen) classes.push("active");
      if (screen.id === hintScreen && screen.id !== this.currentScreen) classes.push("hinted");
      return `<button class="${classes.join(" ")}" data-screen="${screen.id}">${screen.title}</button>`;
    }).join("");
  }

  private screenHtml(): string {
    const screen = SCREENS.find((candidate) => candidate.id === this.currentScreen);
    if (!screen) return "";
    const controls = screen.controls
      .map((control) => {
        const classes = ["control", control.kind];
        if (this.assistant.highlight === control.element) classes.push("highlight");
        const label =
          control.kind === "input"
            ? `${control.label}: ${this.inputValue(control.element)}`
            : control.label;
        return `<button class="${classes.join(" ")}" data-element="${control.element}">${label}</button>`;
      })
      .join("");
    return `<h2>${screen.title}</h2><div class="controls">${controls}</div>`;
  }

  private inputValue(element: string): string {
    const machine = this.assistant.machine;
    if (element === "input_mixer_speed") return `${machine.mixerSpeed} rpm`;
    if (element === "input_mixer_time") return `${machine.mixerTimeMin} min`;
    return "";
  }

  private sidebarHtml(): string {
    if (!this.assistant.enabled) {
      return `<h3>Suggestions</h3><p class="muted">Assistance is off. Interactions are still recorded.</p>`;
    }
    const rows = this.assistant.predictions
      .map((item) => {
        const marker = item.element_id === this.vocabulary.endMarker ? " (task end)" : "";
        return `<li><code>${item.element_id}</code>${marker} <span class="score">${item.score.toFixed(2)}</span></li>`;
      })
      .join("");
    const meta = this.assistant.predictionMeta;
    const metaLine = meta
      ? `<p class="muted">model ${meta.version}, ${meta.tier} tier</p>`
      : "";
    const hint = this.hintHtml();
    return `<h3>Suggestions</h3>${hint}<ol id="prediction-list">${rows}</ol>${metaLine}`;
  }

  private hintHtml(): string {
    const highlight = this.assistant.highlight;
    if (highlight === null) return "";
    const screen = screenOf(highlight);
    const where =
      screen && screen !== this.currentScreen ? ` on the ${screen} screen` : "";
    return `<p class="hint" id="suggestion-hint">Suggested next: <code>${highlight}</code>${where}</p>`;
  }

  private toastsHtml(): string {
    return this.toasts
      .active()
      .map((item) => {
        const undo = item.onUndo
          ? `<button class="undo" data-toast-undo="${item.id}">Undo</button>`
          : "";
        return `
          <div class="toast ${item.kind}" data-toast-id="${item.id}">
            <span>${item.message}</span>
            ${undo}
            <button class="dismiss" data-toast-dismiss="${item.id}">&times;</button>
          </div>`;
      })
      .join("");
  }
}

import type { ElementId } from "./types.js";

/**
 * A small model of the mixing line behind the panel. Every vocabulary
 * element maps onto exactly one control on one screen, and executing an
 * element is a pure state transition so undo can restore a snapshot.
 */

export type ScreenId = "overview" | "recipes" | "dosing" | "mixer" | "discharge";

export type ControlKind = "button" | "input";

export interface ControlSpec {
  element: ElementId;
  label: string;
  kind: ControlKind;
}

export interface ScreenSpec {
  id: ScreenId;
  title: string;
  controls: ControlSpec[];
}

export const SCREENS: readonly ScreenSpec[] = [
  {
    id: "overview",
    title: "Overview",
    controls: [
      { element: "btn_new_batch", label: "Start new batch", kind: "button" },
      { element: "btn_alarm_ack", label: "Acknowledge alarm", kind: "button" },
    ],
  },
  {
    id: "recipes",
    title: "Recipes",
    controls: [
      { element: "recipe_select_dough", label: "Dough", kind: "button" },
      { element: "recipe_select_icing", label: "Icing", kind: "button" },
      { element: "recipe_select_sauce", label: "Sauce", kind: "button" },
    ],
  },
  {
    id: "dosing",
    title: "Dosing",
    controls: [
      { element: "btn_tare_scale", label: "Tare scale", kind: "button" },
      { element: "btn_dose_flour", label: "Dose flour", kind: "button" },
      { element: "btn_dose_sugar", label: "Dose sugar", kind: "button" },
      { element: "btn_dose_oil", label: "Dose oil", kind: "button" },
      { element: "btn_dose_water", label: "Dose water", kind: "button" },
    ],
  },
  {
    id: "mixer",
    title: "Mixer",
    controls: [
      { element: "input_mixer_speed", label: "Mixer speed", kind: "input" },
      { element: "input_mixer_time", label: "Mixer time", kind: "input" },
      { element: "btn_start_mixer", label: "Start mixer", kind: "button" },
      { element: "btn_stop_mixer", label: "Stop mixer", kind: "button" },
    ],
  },
  {
    id: "discharge",
    title: "Discharge",
    controls: [
      { element: "btn_discharge_bowl", label: "Discharge bowl", kind: "button" },
      { element: "btn_confirm_batch", label: "Confirm batch done", kind: "button" },
    ],
  },
];

const screenByElement = new Map<ElementId, ScreenId>();
const controlByElement = new Map<ElementId, ControlSpec>();
for (const screen of SCREENS) {
  for (const control of screen.controls) {
    screenByElement.set(control.element, screen.id);
    controlByElement.set(control.element, control);
  }
}

export function screenOf(element: ElementId): ScreenId | undefined {
  return screenByElement.get(element);
}

export function controlOf(element: ElementId): ControlSpec | undefined {
  return controlByElement.get(element);
}

export function panelElements(): ElementId[] {
  return [...controlByElement.keys()];
}

export interface MachineState {
  batchActive: boolean;
  recipe: string | null;
  scaleTared: boolean;
  dosed: readonly string[];
  mixerSpeed: number;
  mixerTimeMin: number;
  mixerRunning: boolean;
  bowlDischarged: boolean;
  alarmRaised: boolean;
  batchCount: number;
}

export function initialMachineState(): MachineState {
  return {
    batchActive: false,
    recipe: null,
    scaleTared: false,
    dosed: [],
    mixerSpeed: 60,
    mixerTimeMin: 5,
    mixerRunning: false,
    bowlDischarged: false,
    alarmRaised: false,
    batchCount: 0,
  };
}

/** Applies one element to the machine and returns the next state. */
export function applyElement(state: MachineState, element: ElementId): MachineState {
  switch (element) {
    case "btn_new_batch":
      return {
        ...initialMachineState(),
        batchActive: true,
        alarmRaised: state.alarmRaised,
        batchCount: state.batchCount,
      };
    case "btn_alarm_ack":
      return { ...state, alarmRaised: false };
    case "recipe_select_dough":
      return { ...state, recipe: "dough" };
    case "recipe_select_icing":
      return { ...state, recipe: "icing" };
    case "recipe_select_sauce":
      return { ...state, recipe: "sauce" };
    case "btn_tare_scale":
      return { ...state, scaleTared: true, dosed: [] };
    case "btn_dose_flour":
      return { ...state, dosed: [...state.dosed, "flour"] };
    case "btn_dose_sugar":
      return { ...state, dosed: [...state.dosed, "sugar"] };
    case "btn_dose_oil":
      return { ...state, dosed: [...state.dosed, "oil"] };
    case "btn_dose_water":
      return { ...state, dosed: [...state.dosed, "water"] };
    case "input_mixer_speed":
      return { ...state, mixerSpeed: state.mixerSpeed >= 120 ? 60 : state.mixerSpeed + 20 };
    case "input_mixer_time":
      return { ...state, mixerTimeMin: state.mixerTimeMin >= 15 ? 5 : state.mixerTimeMin + 5 };
    case "btn_start_mixer":
      return { ...state, mixerRunning: true };
    case "btn_stop_mixer":
      return { ...state, mixerRunning: false };
    case "btn_discharge_bowl":
      return { ...state, mixerRunning: false, bowlDischarged: true };
    case "btn_confirm_batch":
      return {
        ...state,
        batchActive: false,
        batchCount: state.batchCount + (state.batchActive ? 1 : 0),
      };
    default:
      return state;
  }
}

/** One-line summary of the machine for the status strip. */
export function describeMachine(state: MachineState): string {
  const parts: string[] = [];
  parts.push(state.batchActive ? "batch running" : "idle");
  if (state.recipe !== null) parts.push(`recipe ${state.recipe}`);
  if (state.dosed.length > 0) parts.push(`dosed ${state.dosed.join(", ")}`);
  if (state.mixerRunning) {
    parts.push(`mixing at ${state.mixerSpeed} rpm for ${state.mixerTimeMin} min`);
  }
  if (state.bowlDischarged) parts.push("bowl discharged");
  parts.push(`${state.batchCount} batches done`);
  return parts.join(" | ");
}

// Keyboard-to-command mapping for manual mode. One key event maps to at most
// one server message; unmapped keys yield null and are ignored silently.
//
// Arrows steer the rolling direction, brackets trim the rotation rate,
// L is a hold-to-lift (gradient on while held), T toggles the AC output and
// the digit presets pick the three working AC frequencies.

import type { ClientMessage } from "./protocol.js";

const DIRECTIONS: Record<string, number> = {
  ArrowRight: 0,
  ArrowUp: 90,
  ArrowLeft: 180,
  ArrowDown: 270,
};

const PRESETS: Record<string, 1 | 2 | 3> = { "1": 1, "2": 2, "3": 3 };

export function keyboardMap(
  key: string,
  pressed: boolean,
  manualMode: boolean,
): ClientMessage | null {
  if (!manualMode) {
    return null;
  }
  if (key === "l" || key === "L") {
    // lift follows the key: gradient on at press, off at release
    return { type: "manual", action: "lift", on: pressed };
  }
  if (!pressed) {
    return null;
  }
  if (key in DIRECTIONS) {
    return { type: "manual", action: "set_direction", angle_deg: DIRECTIONS[key] };
  }
  if (key === "]") {
    return { type: "manual", action: "freq_delta", delta_hz: 1 };
  }
  if (key === "[") {
    return { type: "manual", action: "freq_delta", delta_hz: -1 };
  }
  if (key === "t" || key === "T") {
    return { type: "manual", action: "toggle_ac" };
  }
  if (key in PRESETS) {
    return { type: "manual", action: "ac_preset", preset: PRESETS[key] };
  }
  return null;
}

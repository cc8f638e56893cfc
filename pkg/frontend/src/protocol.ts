// Wire types for the live-session websocket (schema_version 1).
// The server is authoritative; these mirror docs/protocol.md.

export type Plane = "bottom" | "top";

export interface RotationEcho {
  axis: [number, number, number];
  hz: number;
  sense: number;
}

export interface CommandEcho {
  b_mt: [number, number, number];
  grad_mt_m: [number, number, number];
  rotation?: RotationEcho | null;
  ac_vpp: number;
  ac_hz: number;
  ac_on: boolean;
}

export interface ParticleSnapshot {
  name: string;
  controlled: boolean;
  x: number;
  y: number;
  z: number;
  plane: "bottom" | "lifting" | "top" | "descending";
  heading_deg: number;
  flip: number;
  cargo: number[];
  stuck: boolean;
  blur: number;
}

export interface CargoSnapshot {
  id: number;
  x: number;
  y: number;
  z: number;
  status: string;
  carrier: number | null;
}

export interface WaypointSnapshot {
  x_um: number;
  y_um: number;
  plane: Plane;
}

export interface HelloMessage {
  type: "hello";
  schema_version: number;
  scenario: string;
  frame_rate_hz: number;
  geometry: {
    width_um: number;
    depth_um: number;
    height_um: number;
    obstacle: { x0_um: number; x1_um: number; height_um: number } | null;
  };
  particles: { name: string; radius_um: number; controlled: boolean }[];
  keyboard_mapping: unknown;
  mode: "manual" | "auto";
}

export interface FrameMessage {
  type: "frame";
  t: number;
  frame: number;
  mode: "manual" | "auto";
  controller_running: boolean;
  command: CommandEcho;
  particles: ParticleSnapshot[];
  cargo: CargoSnapshot[];
  waypoints: WaypointSnapshot[];
}

export interface AckMessage {
  type: "ack";
  of: string;
  [key: string]: unknown;
}

export interface ErrorMessage {
  type: "error";
  reason: string;
}

export type ServerMessage = HelloMessage | FrameMessage | AckMessage | ErrorMessage;

export type ManualAction =
  | { type: "manual"; action: "set_direction"; angle_deg: number }
  | { type: "manual"; action: "freq_delta"; delta_hz: number }
  | { type: "manual"; action: "lift"; on: boolean }
  | { type: "manual"; action: "toggle_ac" }
  | { type: "manual"; action: "ac_preset"; preset: 1 | 2 | 3 };

export type ClientMessage =
  | { type: "mode"; mode: "manual" | "auto" }
  | ManualAction
  | { type: "waypoint_add"; x_um: number; y_um: number; plane: Plane }
  | { type: "waypoint_remove"; index: number }
  | { type: "controller"; action: "start"; kind: "rolling" | "steering" | "ortho4" }
  | { type: "controller"; action: "stop" }
  | { type: "reset" };

// Websocket session client with a latest-snapshot buffer: rendering always
// reads the newest frame and may skip intermediate ones, but frames are never
// observed out of order (older frame indices are discarded).

import type { FrameMessage, HelloMessage, ClientMessage, ServerMessage } from "./protocol.js";

export class LatestFrameBuffer {
  private latest: FrameMessage | null = null;

  offer(frame: FrameMessage): void {
    if (this.latest === null || frame.frame >= this.latest.frame) {
      this.latest = frame;
    }
  }

  take(): FrameMessage | null {
    return this.latest;
  }
}

export interface SessionEvents {
  onHello?: (hello: HelloMessage) => void;
  onReply?: (reply: ServerMessage) => void;
  onStatus?: (status: string) => void;
}

export class SessionClient {
  readonly frames = new LatestFrameBuffer();
  hello: HelloMessage | null = null;
  private socket: WebSocket | null = null;

  constructor(private readonly url: string, private readonly events: SessionEvents = {}) {}

  connect(): void {
    this.events.onStatus?.(`connecting to ${this.url}`);
    const socket = new WebSocket(this.url);
    this.socket = socket;
    socket.onopen = () => this.events.onStatus?.("connected");
    socket.onclose = () => this.events.onStatus?.("disconnected");
    socket.onerror = () => this.events.onStatus?.("socket error");
    socket.onmessage = (event) => this.dispatch(JSON.parse(event.data as string));
  }

  dispatch(message: ServerMessage): void {
    if (message.type === "frame") {
      this.frames.offer(message);
    } else if (message.type === "hello") {
      this.hello = message;
      this.events.onHello?.(message);
    } else {
      this.events.onReply?.(message);
    }
  }

  send(message: ClientMessage): boolean {
    if (this.socket === null || this.socket.readyState !== WebSocket.OPEN) {
      return false;
    }
    this.socket.send(JSON.stringify(message));
    return true;
  }
}

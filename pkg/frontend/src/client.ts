/** WebSocket session client.
 *
 * Owns one SessionView and feeds it every parsed server message in arrival
 * order. All outgoing traffic goes through the wire vocabulary in
 * protocol.ts; nothing else crosses the boundary. On reconnect the client
 * resumes its previous session automatically.
 */

import type { ClientMessage, Embodiment, ServerMessage, Vec2 } from "./protocol";
import {
  acknowledgeReplay,
  parseServerMessage,
  resume,
  startSession,
  submitAction,
} from "./protocol";
import type { SessionView } from "./session";
import { applyMessage, emptyView } from "./session";

export type ConnectionState = "disconnected" | "connecting" | "connected";

export interface ClientEvents {
  /** The view changed; repaint. */
  onChange(view: SessionView, msg: ServerMessage): void;
  /** Connection state changed. */
  onConnection(state: ConnectionState): void;
  /** A frame arrived that is not a valid server message. */
  onBadFrame(raw: string): void;
}

/** Minimal socket surface so tests can substitute a fake. */
export interface Wire {
  send(text: string): void;
  close(): void;
}

export class SessionClient {
  readonly view: SessionView = emptyView();
  private wire: Wire | null = null;
  private state: ConnectionState = "disconnected";

  constructor(private readonly events: ClientEvents) {}

  get connection(): ConnectionState {
    return this.state;
  }

  /** Attach an already-open wire (used by tests). */
  attach(wire: Wire): void {
    this.wire = wire;
    this.setState("connected");
  }

  connect(url: string, onOpen?: () => void): void {
    this.setState("connecting");
    const sock = new WebSocket(url);
    sock.onopen = () => {
      this.wire = {
        send: (text) => sock.send(text),
        close: () => sock.close(),
      };
      this.setState("connected");
      if (this.view.sessionId !== null) {
        this.resumeSession();
      } else {
        onOpen?.();
      }
    };
    sock.onmessage = (ev) => {
      if (typeof ev.data === "string") this.handleFrame(ev.data);
    };
    sock.onclose = () => {
      this.wire = null;
      this.setState("disconnected");
    };
    sock.onerror = () => {
      // onclose follows and handles state
    };
  }

  close(): void {
    this.wire?.close();
    this.wire = null;
    this.setState("disconnected");
  }

  /** Apply one raw frame from the wire. */
  handleFrame(raw: string): void {
    const msg = parseServerMessage(raw);
    if (msg === null) {
      this.events.onBadFrame(raw);
      return;
    }
    applyMessage(this.view, msg);
    this.events.onChange(this.view, msg);
  }

  startSession(embodiment: Embodiment, seed?: number): void {
    this.send(startSession(embodiment, seed));
  }

  submitAction(u: Vec2): void {
    const id = this.view.sessionId;
    if (id !== null) this.send(submitAction(id, u));
  }

  acknowledgeReplay(): void {
    const id = this.view.sessionId;
    if (id !== null) this.send(acknowledgeReplay(id));
  }

  resumeSession(): void {
    const id = this.view.sessionId;
    if (id !== null) this.send(resume(id));
  }

  private send(msg: ClientMessage): void {
    this.wire?.send(JSON.stringify(msg));
  }

  private setState(s: ConnectionState): void {
    this.state = s;
    this.events.onConnection(s);
  }
}

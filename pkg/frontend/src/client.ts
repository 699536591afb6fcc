// Gateway client over an injectable socket, so tests can drive the console
// against a scripted transport instead of a live server.

import {
  closeMsg,
  createMsg,
  gazeMsg,
  parseServerMsg,
  setParamsMsg,
  tickMsg,
  type GazeSampleOut,
  type ServerMsg,
} from "./protocol.js";

export interface SocketLike {
  send(data: string): void;
  close(): void;
  set onmessage(fn: ((ev: { data: string }) => void) | null);
}

export class GatewayClient {
  private socket: SocketLike;
  readonly sent: string[] = [];
  onMessage: ((msg: ServerMsg) => void) | null = null;

  constructor(socket: SocketLike) {
    this.socket = socket;
    socket.onmessage = (ev) => {
      if (this.onMessage) {
        this.onMessage(parseServerMsg(ev.data));
      }
    };
  }

  private send(text: string): void {
    this.sent.push(text);
    this.socket.send(text);
  }

  create(fixture: string, params?: Record<string, number>): void {
    this.send(createMsg(fixture, params));
  }

  sendGaze(samples: GazeSampleOut[]): void {
    if (samples.length > 0) {
      this.send(gazeMsg(samples));
    }
  }

  tick(): void {
    this.send(tickMsg());
  }

  setParams(params: Record<string, number>): void {
    this.send(setParamsMsg(params));
  }

  close(): void {
    this.send(closeMsg());
    this.socket.close();
  }
}

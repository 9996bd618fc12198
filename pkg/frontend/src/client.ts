/**
 * Stream framing and transports.  The protocol is newline-delimited JSON;
 * LineDecoder turns arbitrary byte chunks into complete lines.  Two
 * transports exist: a Node TCP socket (headless clients, tests) and a
 * browser WebSocket speaking to the bundled bridge, both surfacing the same
 * minimal event interface.
 */

import { MAX_LINE_BYTES } from "./protocol.js";

export class LineDecoder {
  private buffer = "";

  /** Feed a chunk; returns every complete line it closed, without the
   * newline.  Oversized lines are truncated defensively. */
  push(chunk: string): string[] {
    this.buffer += chunk;
    const lines: string[] = [];
    let idx: number;
    while ((idx = this.buffer.indexOf("\n")) >= 0) {
      let line = this.buffer.slice(0, idx);
      this.buffer = this.buffer.slice(idx + 1);
      if (line.length > MAX_LINE_BYTES) line = line.slice(0, MAX_LINE_BYTES);
      lines.push(line);
    }
    return lines;
  }
}

export interface Transport {
  send(line: string): void;
  close(): void;
  onLine(handler: (line: string) => void): void;
  onClose(handler: () => void): void;
}

/** TCP transport for Node (the headless client and the test harness). */
export class TcpTransport implements Transport {
  private lineHandler: (line: string) => void = () => {};
  private closeHandler: () => void = () => {};
  private readonly decoder = new LineDecoder();
  private sock: import("node:net").Socket | null = null;

  static async connect(host: string, port: number): Promise<TcpTransport> {
    const net = await import("node:net");
    const transport = new TcpTransport();
    await new Promise<void>((resolve, reject) => {
      const sock = net.createConnection({ host, port }, () => resolve());
      sock.setEncoding("utf8");
      sock.on("error", reject);
      sock.on("data", (chunk: string) => {
        for (const line of transport.decoder.push(chunk)) {
          transport.lineHandler(line);
        }
      });
      sock.on("close", () => transport.closeHandler());
      transport.sock = sock;
    });
    return transport;
  }

  send(line: string): void {
    this.sock?.write(line.endsWith("\n") ? line : line + "\n");
  }

  close(): void {
    this.sock?.end();
  }

  onLine(handler: (line: string) => void): void {
    this.lineHandler = handler;
  }

  onClose(handler: () => void): void {
    this.closeHandler = handler;
  }
}

/** WebSocket transport for the browser panel (via the ws-tcp bridge). */
export class WebSocketTransport implements Transport {
  private lineHandler: (line: string) => void = () => {};
  private closeHandler: () => void = () => {};
  private readonly decoder = new LineDecoder();

  constructor(private readonly ws: WebSocket) {
    ws.onmessage = (event) => {
      const text = typeof event.data === "string" ? event.data : "";
      const framed = text.endsWith("\n") ? text : text + "\n";
      for (const line of this.decoder.push(framed)) this.lineHandler(line);
    };
    ws.onclose = () => this.closeHandler();
  }

  static connect(url: string): Promise<WebSocketTransport> {
    return new Promise((resolve, reject) => {
      const ws = new WebSocket(url);
      ws.onopen = () => resolve(new WebSocketTransport(ws));
      ws.onerror = () => reject(new Error(`cannot reach ${url}`));
    });
  }

  send(line: string): void {
    this.ws.send(line.endsWith("\n") ? line : line + "\n");
  }

  close(): void {
    this.ws.close();
  }

  onLine(handler: (line: string) => void): void {
    this.lineHandler = handler;
  }

  onClose(handler: () => void): void {
    this.closeHandler = handler;
  }
}

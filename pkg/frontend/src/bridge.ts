/**
 * WebSocket-to-TCP bridge.  Browsers cannot open raw TCP sockets, so the
 * panel connects here over WebSocket and the bridge pipes bytes to the
 * teleoperation service unchanged (both directions, no parsing beyond the
 * line framing the protocol already uses).
 *
 * Usage: node dist/bridge.js --listen 8765 --target-port 5555
 *        [--target-host 127.0.0.1]
 */

import { createConnection } from "node:net";
import { exit } from "node:process";

import { WebSocketServer, WebSocket } from "ws";

interface Args {
  listen: number;
  targetHost: string;
  targetPort: number;
}

function parseArgs(argv: string[]): Args {
  const args: Args = { listen: 8765, targetHost: "127.0.0.1", targetPort: 0 };
  for (let i = 0; i < argv.length; i += 2) {
    const key = argv[i];
    const value = argv[i + 1];
    if (key === "--listen") args.listen = Number(value);
    else if (key === "--target-host") args.targetHost = value;
    else if (key === "--target-port") args.targetPort = Number(value);
    else throw new Error(`unknown argument ${key}`);
  }
  if (!Number.isInteger(args.targetPort) || args.targetPort <= 0) {
    throw new Error("--target-port is required");
  }
  return args;
}

export function startBridge(args: Args): WebSocketServer {
  const server = new WebSocketServer({ port: args.listen });
  server.on("connection", (ws: WebSocket) => {
    const tcp = createConnection({ host: args.targetHost, port: args.targetPort });
    tcp.setEncoding("utf8");
    tcp.on("data", (chunk: string) => ws.send(chunk));
    tcp.on("close", () => ws.close());
    tcp.on("error", () => ws.close());
    ws.on("message", (data) => tcp.write(data.toString()));
    ws.on("close", () => tcp.end());
    ws.on("error", () => tcp.end());
  });
  return server;
}

const isMain = process.argv[1]?.endsWith("bridge.js");
if (isMain) {
  const args = parseArgs(process.argv.slice(2));
  startBridge(args);
  console.log(
    `bridge listening on ws://127.0.0.1:${args.listen}, ` +
      `forwarding to tcp://${args.targetHost}:${args.targetPort}`,
  );
  process.on("SIGINT", () => exit(0));
}

/**
 * Headless scripted client: connects to the teleoperation service, replays
 * the canonical short drive (start, 24 descent targets, stop, save) and
 * prints every server line it receives.  Against a lockstep server the
 * output reproduces the committed transcript byte for byte, which is how
 * the integration gate checks protocol conformance without a browser.
 *
 * Usage: node dist/headless.js --port 5555 [--host 127.0.0.1]
 *        [--sent-log sent.ndjson] [--timeout 20]
 */

import { writeFileSync } from "node:fs";
import { exit, stdout } from "node:process";

import { TcpTransport } from "./client.js";
import {
  ClientMessage,
  encode,
  leadMessage,
  saveMessage,
  startMessage,
  stopMessage,
} from "./protocol.js";

export function scriptedMessages(): ClientMessage[] {
  const msgs: ClientMessage[] = [startMessage("tennis")];
  for (let k = 0; k < 24; k++) {
    const frac = (k + 1) / 24;
    msgs.push(leadMessage([-0.775, -0.248 - 0.15 * frac, 1.392, 0.0, 0.0]));
  }
  msgs.push(stopMessage());
  msgs.push(saveMessage());
  return msgs;
}

interface Args {
  host: string;
  port: number;
  sentLog: string | null;
  timeout: number;
}

function parseArgs(argv: string[]): Args {
  const args: Args = { host: "127.0.0.1", port: 0, sentLog: null, timeout: 20 };
  for (let i = 0; i < argv.length; i += 2) {
    const key = argv[i];
    const value = argv[i + 1];
    if (key === "--host") args.host = value;
    else if (key === "--port") args.port = Number(value);
    else if (key === "--sent-log") args.sentLog = value;
    else if (key === "--timeout") args.timeout = Number(value);
    else throw new Error(`unknown argument ${key}`);
  }
  if (!Number.isInteger(args.port) || args.port <= 0) {
    throw new Error("--port is required");
  }
  return args;
}

export async function replay(args: Args): Promise<number> {
  const transport = await TcpTransport.connect(args.host, args.port);
  const sent: string[] = [];
  let sawSaved = false;

  const done = new Promise<number>((resolve) => {
    const timer = setTimeout(() => {
      stdout.write("timeout waiting for episode_saved\n");
      resolve(2);
    }, args.timeout * 1000);
    transport.onLine((line) => {
      stdout.write(line + "\n");
      if (line.includes('"episode_saved"')) {
        sawSaved = true;
        clearTimeout(timer);
        transport.close();
      }
    });
    transport.onClose(() => {
      clearTimeout(timer);
      resolve(sawSaved ? 0 : 2);
    });
  });

  for (const msg of scriptedMessages()) {
    const line = encode(msg);
    sent.push(line);
    transport.send(line);
  }
  const code = await done;
  if (args.sentLog !== null) {
    writeFileSync(args.sentLog, sent.join(""));
  }
  return code;
}

const isMain = process.argv[1]?.endsWith("headless.js");
if (isMain) {
  replay(parseArgs(process.argv.slice(2)))
    .then((code) => exit(code))
    .catch((err) => {
      console.error(String(err));
      exit(2);
    });
}

/** Manual runtime drive: operate the real client stack against a live
 * `teachsim serve` subprocess over TCP, render every arrival, kill the
 * socket mid-session, resume through the client's own resume path, and
 * print observable PASS/FAIL lines. Run with: npx vite-node scripts/drive.ts
 */

import net from "node:net";
import readline from "node:readline";

import { SessionClient } from "../src/client";
import type { ServerMessage } from "../src/protocol";
import { ackGuidance, canSubmit, snapshot } from "../src/session";
import { durationSeconds } from "../src/playback";
import { renderScene } from "../src/render";
import { GREEN_PALETTE } from "../src/palette";
import { VIEW_GEOMETRY } from "../src/view";
import { startServer } from "../tests/ndjson";

interface Inbound {
  raw: string;
  msg: ServerMessage | null;
}

function openSocket(port: number): Promise<{
  socket: net.Socket;
  next(timeoutMs?: number): Promise<Inbound>;
}> {
  return new Promise((resolve, reject) => {
    const socket = net.createConnection({ host: "127.0.0.1", port });
    const inbox: Inbound[] = [];
    const waiters: ((i: Inbound) => void)[] = [];
    socket.once("error", reject);
    socket.once("connect", () => {
      socket.removeListener("error", reject);
      socket.on("error", () => {});
      const rl = readline.createInterface({ input: socket });
      rl.on("line", (raw) => {
        let msg: ServerMessage | null = null;
        try {
          msg = JSON.parse(raw) as ServerMessage;
        } catch {
          msg = null;
        }
        const item = { raw, msg };
        const w = waiters.shift();
        if (w) w(item);
        else inbox.push(item);
      });
      resolve({
        socket,
        next: (timeoutMs = 30_000) => {
          const queued = inbox.shift();
          if (queued) return Promise.resolve(queued);
          return new Promise((res, rej) => {
            const timer = setTimeout(
              () => rej(new Error("timed out waiting for server")),
              timeoutMs,
            );
            waiters.push((i) => {
              clearTimeout(timer);
              res(i);
            });
          });
        },
      });
    });
  });
}

let failures = 0;
function check(name: string, ok: boolean, detail = ""): void {
  console.log(`${ok ? "PASS" : "FAIL"}  ${name}${detail ? ` (${detail})` : ""}`);
  if (!ok) failures += 1;
}

function stubCtx(): { ctx: CanvasRenderingContext2D; texts: string[] } {
  const texts: string[] = [];
  const state: Record<string, unknown> = {};
  const ctx = new Proxy(state, {
    get(obj, prop) {
      if (typeof prop !== "string") return undefined;
      if (prop in obj) return obj[prop];
      return (...args: unknown[]) => {
        if (prop === "fillText") texts.push(String(args[0]));
      };
    },
    set(obj, prop, value) {
      if (typeof prop === "string") obj[prop] = value;
      return true;
    },
  }) as unknown as CanvasRenderingContext2D;
  return { ctx, texts };
}

async function main(): Promise<void> {
  const server = await startServer(555);
  console.log(`server on port ${server.port}, logs in ${server.logDir}`);

  let paints = 0;
  let badFrames = 0;
  const allRaw: string[] = [];
  const { ctx } = stubCtx();

  const client = new SessionClient({
    onChange(view) {
      renderScene(ctx, view, VIEW_GEOMETRY[view.embodiment ?? "SimArm"], GREEN_PALETTE, {
        drag: null,
        replayElapsed: 0,
        now: 0,
        blockedCueUntil: 0,
      });
      paints += 1;
    },
    onConnection(state) {
      console.log(`connection: ${state}`);
    },
    onBadFrame() {
      badFrames += 1;
    },
  });

  let conn = await openSocket(server.port);
  client.attach({
    send: (text) => conn.socket.write(`${text}\n`),
    close: () => conn.socket.destroy(),
  });

  const counts = { query: 0, guidance: 0, replay: 0, phase: 0 };
  let replayDurationsOk = true;
  let resumeChecked = false;
  let killPlanned = true;

  client.startSession("SimArm", 606);

  for (;;) {
    const { raw, msg } = await conn.next();
    allRaw.push(raw);
    client.handleFrame(raw);
    const view = client.view;
    if (msg === null) break;
    if (msg.type === "Error") {
      check("no server errors", false, `${JSON.stringify(msg.payload)}`);
      break;
    }
    if (msg.type === "QueryState") {
      counts.query += 1;
      if (view.guidance !== null) ackGuidance(view);

      if (killPlanned && counts.replay === 1) {
        killPlanned = false;
        const before = snapshot(view);
        conn.socket.destroy();
        conn = await openSocket(server.port);
        client.attach({
          send: (text) => conn.socket.write(`${text}\n`),
          close: () => conn.socket.destroy(),
        });
        client.resumeSession();
        const started = await conn.next();
        allRaw.push(started.raw);
        client.handleFrame(started.raw);
        const query = await conn.next();
        allRaw.push(query.raw);
        client.handleFrame(query.raw);
        check(
          "resume restores the dropped view",
          JSON.stringify(snapshot(client.view)) === JSON.stringify(before),
        );
        resumeChecked = true;
      }

      if (!canSubmit(view)) {
        check("can submit after each query", false, `status ${view.status}`);
        break;
      }
      client.submitAction([0.3, 0.1]);
    } else if (msg.type === "Guidance") {
      counts.guidance += 1;
    } else if (msg.type === "Replay") {
      counts.replay += 1;
      const t = msg.payload.trajectory;
      const dur = durationSeconds({ dt: t.dt, sampleCount: t.positions.length });
      if (Math.abs(dur - 10) > 1e-9) replayDurationsOk = false;
      if (view.guidance !== null) ackGuidance(view);
      client.acknowledgeReplay();
    } else if (msg.type === "PhaseChanged") {
      counts.phase += 1;
    } else if (msg.type === "SessionFinished") {
      break;
    }
  }

  check("session finished", client.view.finished);
  check("12 replays", counts.replay === 12, String(counts.replay));
  check("4 phase changes", counts.phase === 4, String(counts.phase));
  check("60 query states", counts.query === 60, String(counts.query));
  check(
    "guided session: 40 guidance frames",
    counts.guidance === 40,
    String(counts.guidance),
  );
  check("every replay plays 10 s of wall clock", replayDurationsOk);
  check("resume exercised", resumeChecked);
  check("zero unparseable frames", badFrames === 0, String(badFrames));
  check("every arrival painted", paints >= counts.query + counts.replay);
  const leaked = allRaw.some(
    (f) => f.includes("Target") || f.includes("Control") || f.includes('"group"'),
  );
  check("wire never names the study arms", !leaked);
  console.log(`session ${client.view.sessionId}, log dir ${server.logDir}`);

  conn.socket.destroy();
  await server.stop();
  process.exit(failures === 0 ? 0 : 1);
}

main().catch((err) => {
  console.error(err);
  process.exit(1);
});

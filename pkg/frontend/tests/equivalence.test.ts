// @vitest-environment node
//
// Criterion 8: a session driven through the UI layer (Client +
// SessionController, the same code paths the browser uses) with verdict
// sequence V must yield result JSON byte-identical to the scripted CLI run
// `pldiag diagnose --answers V --json` — for both a human-in-the-loop
// session and a machine-only session.

import { execFile, spawn, type ChildProcess } from "node:child_process";
import { mkdtempSync, readFileSync, writeFileSync } from "node:fs";
import { tmpdir } from "node:os";
import { join, resolve } from "node:path";
import { promisify } from "node:util";
import { afterAll, beforeAll, describe, expect, it } from "vitest";

import { Client } from "../src/api.js";
import { SessionController } from "../src/session.js";
import type { Verdict } from "../src/types.js";

const execFileP = promisify(execFile);
const REPO = resolve(__dirname, "../..");
const PROGRAMS = join(REPO, "programs");
const PORT = 8731;
const BASE = `http://127.0.0.1:${PORT}`;

let server: ChildProcess;

async function waitForServer(): Promise<void> {
  for (let i = 0; i < 100; i++) {
    try {
      const res = await fetch(`${BASE}/sessions/nope`);
      if (res.status === 404) return;
    } catch {
      // not up yet
    }
    await new Promise((r) => setTimeout(r, 100));
  }
  throw new Error("service did not come up");
}

beforeAll(async () => {
  server = spawn(
    "python3",
    ["-m", "uvicorn", "pldiag.service:app", "--host", "127.0.0.1", "--port", String(PORT), "--log-level", "warning"],
    { cwd: REPO, stdio: ["ignore", "pipe", "pipe"] },
  );
  await waitForServer();
});

afterAll(() => {
  server.kill();
});

async function uiDrivenResult(
  programFile: string,
  specFile: string,
  query: string,
  verdicts: Verdict[],
): Promise<string> {
  const client = new Client(BASE);
  const program = await client.createProgram(readFileSync(join(PROGRAMS, programFile), "utf8"));
  const spec = await client.createSpec(readFileSync(join(PROGRAMS, specFile), "utf8"));
  const view = await client.createSession({
    program_id: program.id,
    spec_id: spec.id,
    kind: "corr",
    query,
  });
  const ctl = new SessionController(client, view.id);
  await ctl.refresh();
  for (const v of verdicts) {
    if (ctl.state.phase !== "active") throw new Error(`unexpected phase ${ctl.state.phase}`);
    expect(ctl.state.view.state).toBe("awaiting_answer");
    await ctl.answerFlow(v);
  }
  if (ctl.state.phase !== "active") throw new Error(`unexpected phase ${ctl.state.phase}`);
  expect(["done", "undecided"]).toContain(ctl.state.view.state);
  return client.getResultText(view.id);
}

async function cliResult(
  programFile: string,
  specFile: string,
  query: string,
  verdicts: Verdict[],
): Promise<string> {
  const dir = mkdtempSync(join(tmpdir(), "pldiag-ui-"));
  const answersFile = join(dir, "answers.json");
  writeFileSync(answersFile, JSON.stringify({ answers: verdicts }));
  const { stdout } = await execFileP(
    "python3",
    [
      "-m", "pldiag.cli", "diagnose", "corr", join(PROGRAMS, programFile),
      "-q", query, "--spec", join(PROGRAMS, specFile),
      "--answers", answersFile, "--json",
    ],
    { cwd: REPO },
  );
  return stdout;
}

describe("UI/CLI result equivalence", () => {
  it("human-in-the-loop isort session matches the scripted CLI run byte-for-byte", async () => {
    const verdicts: Verdict[] = ["no", "no"];
    const ui = await uiDrivenResult("isort_bug.pl", "isort.spec", "isort([s(0),0],Ys)", verdicts);
    const cli = await cliResult("isort_bug.pl", "isort.spec", "isort([s(0),0],Ys)", verdicts);
    expect(cli).toBe(ui + "\n"); // the CLI adds a trailing newline to the same bytes
    const doc = JSON.parse(ui) as { status: string; clause: number };
    expect(doc.status).toBe("located");
    expect(doc.clause).toBe(4);
  });

  it("machine-only even-bug session matches the scripted CLI run byte-for-byte", async () => {
    const ui = await uiDrivenResult("even_bug.pl", "even.spec", "even(s(0))", []);
    const cli = await cliResult("even_bug.pl", "even.spec", "even(s(0))", []);
    expect(cli).toBe(ui + "\n");
    expect((JSON.parse(ui) as { clause: number }).clause).toBe(2);
  });
});

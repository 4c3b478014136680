// Scripted browser-session flow against the real labeling service: a
// 60-pair queue labeled through the actual client stack in an active
// session with batch 20 must trigger exactly 3 retraining events, persist
// every decision (byte-identical on re-export), and keep illegible choices
// out of training exports.

import { execFileSync, spawn, type ChildProcess } from 'node:child_process';
import { mkdtempSync, readFileSync, writeFileSync } from 'node:fs';
import { tmpdir } from 'node:os';
import { join, dirname } from 'node:path';
import { fileURLToPath } from 'node:url';
import { afterAll, beforeAll, describe, expect, it } from 'vitest';

import { ApiClient } from '../src/api';
import { SessionController } from '../src/session';
import type { Choice } from '../src/types';

const HERE = dirname(fileURLToPath(import.meta.url));
const PYTHON = process.env.VIZKB_PYTHON ?? 'python3';
const PORT = 8700 + Math.floor(Math.random() * 200);
const BASE = `http://127.0.0.1:${PORT}`;

let workDir: string;
let server: ChildProcess | null = null;
let corpusPath: string;
let logPath: string;

async function waitForServer(timeoutMs = 30_000): Promise<void> {
  const deadline = Date.now() + timeoutMs;
  for (;;) {
    try {
      const response = await fetch(`${BASE}/api/session`);
      if (response.ok) return;
    } catch {
      // not up yet
    }
    if (Date.now() > deadline) throw new Error('labeling service did not start');
    await new Promise((r) => setTimeout(r, 250));
  }
}

beforeAll(async () => {
  workDir = mkdtempSync(join(tmpdir(), 'vizkb-e2e-'));
  corpusPath = join(workDir, 'corpus.jsonl');
  logPath = join(workDir, 'labels.log.jsonl');
  execFileSync(PYTHON, [join(HERE, 'make_corpus.py'), corpusPath, '60'], {
    stdio: 'pipe',
  });
  server = spawn(
    PYTHON,
    [
      '-m', 'vizkb.cli', 'serve',
      '--pairs', corpusPath,
      '--strategy', 'active_ml',
      '--batch', '20',
      '--iterations', '20',
      '--labels-log', logPath,
      '--port', String(PORT),
    ],
    { stdio: 'pipe' },
  );
  await waitForServer();
}, 60_000);

afterAll(() => {
  server?.kill('SIGTERM');
});

describe('scripted active labeling session', () => {
  it(
    'labels all 60 pairs with exactly 3 retraining events and durable labels',
    async () => {
      const api = new ApiClient(BASE);
      const controller = new SessionController(api, { pollMs: 250 });
      await controller.start();

      const decisions: Record<string, Choice> = {};
      let n = 0;
      while (controller.current.phase === 'ready') {
        const pair = controller.current.pair;
        expect(pair).not.toBeNull();
        const choice: Choice =
          n === 7 || n === 41 ? 'illegible'
          : n % 9 === 5 ? 0
          : n % 2 === 0 ? -1
          : 1;
        decisions[pair!.pair_id] = choice;
        await controller.submit(choice);
        n += 1;
        expect(n).toBeLessThanOrEqual(60);
      }

      expect(n).toBe(60);
      expect(controller.current.phase).toBe('complete');
      const session = controller.current.session!;
      expect(session.retrain_events).toHaveLength(3);
      expect(session.retrain_events.every((e) => e.outcome === 'trained')).toBe(true);
      expect(session.labeled_manual).toBe(58);
      expect(session.removed).toBe(2);

      // the append-only log holds one entry per decision
      const logLines = readFileSync(logPath, 'utf-8').trim().split('\n');
      expect(logLines).toHaveLength(60);

      const expectedPath = join(workDir, 'expected.json');
      writeFileSync(expectedPath, JSON.stringify(decisions));
      const verdictRaw = execFileSync(
        PYTHON,
        [join(HERE, 'verify_labels.py'), logPath, corpusPath, expectedPath],
        { stdio: 'pipe' },
      ).toString();
      const verdict = JSON.parse(verdictRaw.trim());
      expect(verdict.byte_identical).toBe(true);
      expect(verdict.labels_ok).toBe(true);
      expect(verdict.illegible_excluded).toBe(true);
      expect(verdict.exported).toBe(58);
      expect(verdict.removed).toBe(2);
    },
    180_000,
  );
});

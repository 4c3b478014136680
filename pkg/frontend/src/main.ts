// DOM wiring: header with session progress, two chart panes, lineage and
// illegibility hints, choice buttons mirrored by keyboard shortcuts, and a
// completion screen linking the accuracy report.

import { ApiClient } from './api';
import { bindKeys } from './keyboard';
import { renderPair } from './render';
import { SessionController, type ControllerState } from './session';
import type { Choice, PairView } from './types';

const api = new ApiClient('');
const controller = new SessionController(api);

function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  className?: string,
  text?: string,
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  if (className) node.className = className;
  if (text !== undefined) node.textContent = text;
  return node;
}

function lineageSummary(pair: PairView): string {
  const bits: string[] = [`source: ${pair.source}`];
  if (pair.group) bits.push(`group: ${pair.group}`);
  if (pair.lineage?.origin) bits.push(`origin: ${pair.lineage.origin}`);
  if (pair.lineage?.ablated?.length) {
    bits.push(`ablated: ${pair.lineage.ablated.join(', ')}`);
  }
  const context = pair.lineage?.context;
  if (context && 'feature' in context) {
    bits.push(`context: ${String(context['feature'])}=${String(context['present'])}`);
  }
  return bits.join('  ·  ');
}

async function showAccuracy(container: HTMLElement): Promise<void> {
  const { rows } = await api.getAccuracy();
  const table = el('table', 'accuracy-table');
  const head = el('tr');
  for (const h of ['slice', 'value', 'n', 'accuracy']) {
    head.append(el('th', undefined, h));
  }
  table.append(head);
  for (const row of rows) {
    const tr = el('tr');
    tr.append(
      el('td', undefined, row.slice),
      el('td', undefined, row.value),
      el('td', undefined, String(row.n)),
      el('td', undefined, row.accuracy === null ? '—' : row.accuracy.toFixed(3)),
    );
    table.append(tr);
  }
  container.replaceChildren(el('h2', undefined, 'Compliance accuracy'), table);
}

function buildLayout(root: HTMLElement) {
  const header = el('header');
  const progress = el('div', 'progress');
  const notice = el('div', 'notice');
  header.append(el('h1', undefined, 'vizkb labeling'), progress, notice);

  const stage = el('main', 'stage');
  const leftPane = el('section', 'pane');
  const rightPane = el('section', 'pane');
  const leftChart = el('div', 'chart');
  const rightChart = el('div', 'chart');
  leftPane.append(el('h2', undefined, 'Left (←)'), leftChart);
  rightPane.append(el('h2', undefined, 'Right (→)'), rightChart);
  stage.append(leftPane, rightPane);

  const meta = el('div', 'meta');
  const hint = el('div', 'illegible-hint');
  const lineage = el('div', 'lineage');
  meta.append(hint, lineage);

  const controls = el('div', 'controls');
  const buttons: Array<[string, Choice]> = [
    ['← Left better', -1],
    ['= Comparable', 0],
    ['Right better →', 1],
    ['✕ Illegible', 'illegible'],
  ];
  for (const [labelText, choice] of buttons) {
    const button = el('button', 'choice', labelText);
    button.addEventListener('click', () => void controller.submit(choice));
    controls.append(button);
  }
  const retry = el('button', 'retry hidden', 'Retry submission');
  retry.addEventListener('click', () => void controller.retry());
  controls.append(retry);

  root.append(header, stage, meta, controls);
  return { progress, notice, leftChart, rightChart, hint, lineage, controls, retry, stage };
}

function main(): void {
  const root = document.getElementById('app');
  if (!root) return;
  const ui = buildLayout(root);

  controller.onChange((state: ControllerState) => {
    void renderState(state);
  });

  async function renderState(state: ControllerState): Promise<void> {
    ui.notice.textContent = state.notice ?? '';
    ui.retry.classList.toggle('hidden', state.phase !== 'error');

    const session = state.session;
    if (session) {
      const parts = [
        `iteration ${session.iteration} of ${session.max_iterations}`,
        `labeled ${session.labeled_manual}`,
        `queued ${session.queued}`,
        `total ${session.total_pairs}`,
      ];
      if (session.strategy === 'active_ml') {
        parts.push(`retrains ${session.retrain_events.length}`);
      }
      ui.progress.textContent = parts.join('  ·  ');
    }

    if (state.phase === 'retraining') {
      ui.hint.textContent = '';
      ui.lineage.textContent = '';
      ui.leftChart.replaceChildren(el('div', 'status', 'Retraining the classifier…'));
      ui.rightChart.replaceChildren(el('div', 'status', ''));
      return;
    }
    if (state.phase === 'complete') {
      ui.stage.classList.add('hidden');
      ui.lineage.textContent = '';
      ui.hint.textContent = '';
      const done = el('div', 'complete');
      done.append(el('h2', undefined, 'Session complete'));
      const report = el('div');
      done.append(report);
      ui.notice.replaceChildren(done);
      await showAccuracy(report);
      return;
    }
    if (state.phase === 'loading' || state.phase === 'submitting') {
      return; // keep the current view until the next pair arrives
    }
    const pair = state.pair;
    if (!pair) return;

    ui.stage.classList.remove('hidden');
    ui.hint.textContent = pair.illegible
      ? `⚠ flagged: ${pair.illegible_reason ?? 'possibly illegible'}`
      : '';
    ui.lineage.textContent = lineageSummary(pair);
    await renderPair(
      ui.leftChart,
      ui.rightChart,
      pair.left_render,
      pair.right_render,
      pair.left_spec,
      pair.right_spec,
    );
  }

  bindKeys((choice) => void controller.submit(choice));
  void controller.start();
}

main();

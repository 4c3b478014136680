// Chart rendering via the off-the-shelf vega-embed renderer (loaded as a
// UMD global from vendored bundles). A renderer failure falls back to the
// raw spec JSON with an error banner; labeling stays possible either way.

export type EmbedFn = (
  el: HTMLElement,
  spec: Record<string, unknown>,
  options?: Record<string, unknown>,
) => Promise<unknown>;

declare global {
  interface Window {
    vegaEmbed?: EmbedFn;
  }
}

export function defaultEmbed(): EmbedFn | null {
  if (typeof window !== 'undefined' && typeof window.vegaEmbed === 'function') {
    return window.vegaEmbed;
  }
  return null;
}

function fallback(container: HTMLElement, spec: unknown, message: string): void {
  container.replaceChildren();
  const banner = document.createElement('div');
  banner.className = 'render-error';
  banner.textContent = message;
  const pre = document.createElement('pre');
  pre.className = 'spec-fallback';
  pre.textContent = JSON.stringify(spec, null, 2);
  container.append(banner, pre);
}

/** Render one chart into the container; never throws. */
export async function renderChart(
  container: HTMLElement,
  renderDoc: Record<string, unknown>,
  rawSpec: unknown,
  embed: EmbedFn | null = defaultEmbed(),
): Promise<boolean> {
  if (!embed) {
    fallback(container, rawSpec, 'Renderer unavailable; showing the raw spec.');
    return false;
  }
  try {
    container.replaceChildren();
    await embed(container, renderDoc, { actions: false });
    return true;
  } catch (err) {
    fallback(
      container,
      rawSpec,
      `Renderer failed (${err instanceof Error ? err.message : String(err)}); showing the raw spec.`,
    );
    return false;
  }
}

/** Render both sides of a pair with consistent sizing. */
export async function renderPair(
  leftContainer: HTMLElement,
  rightContainer: HTMLElement,
  leftDoc: Record<string, unknown>,
  rightDoc: Record<string, unknown>,
  leftSpec: unknown,
  rightSpec: unknown,
  embed: EmbedFn | null = defaultEmbed(),
): Promise<void> {
  const sized = (doc: Record<string, unknown>) => ({
    width: 'container',
    height: 300,
    ...doc,
  });
  await Promise.all([
    renderChart(leftContainer, sized(leftDoc), leftSpec, embed),
    renderChart(rightContainer, sized(rightDoc), rightSpec, embed),
  ]);
}

// Keyboard-first labeling: one decision per screen.
//
//   ArrowLeft   prefer the left chart   (-1)
//   ArrowRight  prefer the right chart  (+1)
//   =           the charts are comparable (0)
//   x           illegible; remove from the session

import type { Choice } from './types';

const KEYMAP: Record<string, Choice> = {
  ArrowLeft: -1,
  ArrowRight: 1,
  '=': 0,
  x: 'illegible',
  X: 'illegible',
};

export function bindKeys(
  handler: (choice: Choice) => void,
  target: Pick<Document, 'addEventListener' | 'removeEventListener'> = document,
): () => void {
  const onKeyDown = (event: Event) => {
    const key = (event as KeyboardEvent).key;
    const choice = KEYMAP[key];
    if (choice === undefined) return;
    event.preventDefault();
    handler(choice);
  };
  target.addEventListener('keydown', onKeyDown);
  return () => target.removeEventListener('keydown', onKeyDown);
}

// Entry point: reviewer id comes from the query string (?reviewer=NAME).

import { bootstrap } from './ui.js';

function reviewerFromQuery(): string | null {
  const params = new URLSearchParams(window.location.search);
  return params.get('reviewer');
}

function start(): void {
  const mount = document.getElementById('app');
  if (!mount) throw new Error('missing #app mount point');
  const reviewer = reviewerFromQuery();
  if (!reviewer) {
    mount.textContent = 'Add ?reviewer=YOUR_ID to the URL to begin.';
    return;
  }
  const { session } = bootstrap(mount, '', reviewer);
  void session.start();
}

if (document.readyState === 'loading') {
  document.addEventListener('DOMContentLoaded', start);
} else {
  start();
}

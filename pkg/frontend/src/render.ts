// Pure rendering: server responses in, view structures and HTML strings out.
// No state, no DOM access, so every view is snapshot-testable.

import {
  CLASS_LABELS,
  CLASS_ORDER,
  type DiagnosisResponse,
  type GlycemicClass,
  type WhatIfResponse,
} from './types.js';

export interface DistributionSegment {
  cls: GlycemicClass;
  label: string;
  share: number;
}

export interface RenderedStep {
  index: number;
  node: string;
  attribute: string | null;
  test: string;
  branch: string;
  observed: string;
  fallback: boolean;
  terminal: boolean;
}

export interface TraceView {
  cls: GlycemicClass;
  classLabel: string;
  distribution: DistributionSegment[];
  steps: RenderedStep[];
  badges: string[];
  fallbackNotes: string[];
  modelVersion: string;
  alpha: number | null;
}

function formatObserved(value: unknown): string {
  if (value === null || value === undefined) return 'missing';
  if (typeof value === 'boolean') return value ? 'yes' : 'no';
  return String(value);
}

/** Build the view model for one diagnosis; step order mirrors the response. */
export function buildTraceView(response: DiagnosisResponse): TraceView {
  const steps: RenderedStep[] = response.path.map((step, index) => ({
    index,
    node: step.node,
    attribute: step.attribute,
    test: step.test,
    branch: step.branch,
    observed: formatObserved(step.observed),
    fallback: step.fallback,
    terminal: step.attribute === null,
  }));
  const badges = response.flags.filter((f) => !f.startsWith('fallback:'));
  const fallbackNotes = response.flags
    .filter((f) => f.startsWith('fallback:'))
    .map((f) => f.slice('fallback:'.length).trim());
  const distribution = CLASS_ORDER.map((cls, i) => ({
    cls,
    label: CLASS_LABELS[cls],
    share: response.distribution[i] ?? 0,
  }));
  return {
    cls: response.class,
    classLabel: CLASS_LABELS[response.class],
    distribution,
    steps,
    badges,
    fallbackNotes,
    modelVersion: response.model_version,
    alpha: response.alpha,
  };
}

function escapeHtml(text: string): string {
  return text
    .replace(/&/g, '&amp;')
    .replace(/</g, '&lt;')
    .replace(/>/g, '&gt;')
    .replace(/"/g, '&quot;');
}

function pct(share: number): string {
  return `${(share * 100).toFixed(1)}%`;
}

export interface TraceRenderOptions {
  highlightIndex?: number | null;
  title?: string;
}

/** Render a trace view to HTML. highlightIndex marks the divergent step. */
export function renderTraceHTML(view: TraceView, options: TraceRenderOptions = {}): string {
  const { highlightIndex = null, title = '' } = options;
  const parts: string[] = [];
  parts.push('<section class="trace">');
  if (title) {
    parts.push(`<h3>${escapeHtml(title)}</h3>`);
  }
  parts.push(
    `<div class="outcome outcome-${view.cls}"><strong>${escapeHtml(view.classLabel)}</strong>` +
      (view.alpha !== null ? ` <span class="alpha">blend α=${view.alpha}</span>` : '') +
      '</div>',
  );
  parts.push('<div class="distribution">');
  for (const seg of view.distribution) {
    parts.push(
      `<span class="seg seg-${seg.cls}" style="width:${pct(seg.share)}" ` +
        `title="${escapeHtml(seg.label)}: ${pct(seg.share)}"></span>`,
    );
  }
  parts.push('</div>');
  if (view.badges.length) {
    parts.push('<div class="badges">');
    for (const badge of view.badges) {
      parts.push(`<span class="badge">${escapeHtml(badge)}</span>`);
    }
    parts.push('</div>');
  }
  parts.push('<ol class="steps">');
  for (const step of view.steps) {
    const classes = ['step'];
    if (step.fallback) classes.push('fallback');
    if (step.terminal) classes.push('terminal');
    if (highlightIndex !== null && step.index === highlightIndex) classes.push('divergent');
    const observed = step.terminal ? '' : ` <span class="observed">(observed ${escapeHtml(step.observed)})</span>`;
    parts.push(
      `<li class="${classes.join(' ')}" data-node="${escapeHtml(step.node)}">` +
        `${escapeHtml(step.test)}${observed}` +
        (step.fallback ? ' <span class="note">default branch</span>' : '') +
        '</li>',
    );
  }
  parts.push('</ol>');
  if (view.fallbackNotes.length) {
    parts.push(
      `<p class="fallbacks">Fallbacks: ${view.fallbackNotes.map(escapeHtml).join('; ')}</p>`,
    );
  }
  parts.push(`<p class="meta">model ${escapeHtml(view.modelVersion)}</p>`);
  parts.push('</section>');
  return parts.join('\n');
}

export interface WhatIfView {
  base: TraceView;
  modified: TraceView;
  divergenceIndex: number | null;
  divergentNode: string | null;
  divergentAttribute: string | null;
  changed: boolean;
  noChange: boolean;
}

export function buildWhatIfView(response: WhatIfResponse): WhatIfView {
  const divergence = response.divergence;
  return {
    base: buildTraceView(response.base),
    modified: buildTraceView(response.modified),
    divergenceIndex: divergence ? divergence.index : null,
    divergentNode: divergence ? divergence.node : null,
    divergentAttribute: divergence ? divergence.attribute : null,
    changed: response.changed,
    noChange: divergence === null && !response.changed,
  };
}

/** Side-by-side comparison with the first divergent step highlighted. */
export function renderWhatIfHTML(view: WhatIfView): string {
  const parts: string[] = ['<div class="whatif">'];
  if (view.noChange) {
    parts.push('<p class="no-change">No change: both scenarios follow the identical path.</p>');
  } else if (view.changed) {
    parts.push(
      `<p class="flip">Outcome changes: ${escapeHtml(view.base.classLabel)} &rarr; ` +
        `${escapeHtml(view.modified.classLabel)}` +
        (view.divergentAttribute
          ? ` (paths diverge at ${escapeHtml(view.divergentAttribute)})`
          : '') +
        '</p>',
    );
  } else {
    parts.push('<p class="same-outcome">Outcome unchanged, but the paths differ.</p>');
  }
  parts.push('<div class="side-by-side">');
  parts.push(renderTraceHTML(view.base, { highlightIndex: view.divergenceIndex, title: 'Base' }));
  parts.push(
    renderTraceHTML(view.modified, { highlightIndex: view.divergenceIndex, title: 'Modified' }),
  );
  parts.push('</div>');
  parts.push('</div>');
  return parts.join('\n');
}

// Contract tests against captured service responses: the console's rendering
// must reproduce the API's class/path exactly, and its client-side validation
// must accept precisely the payloads the server accepted.

import { readFileSync } from 'node:fs';
import { describe, expect, it } from 'vitest';

import { buildTraceView, buildWhatIfView, renderTraceHTML, renderWhatIfHTML } from '../src/render.js';
import type { DiagnosisResponse, IntakePayload, WhatIfResponse } from '../src/types.js';
import { validateIntake } from '../src/validation.js';

interface DiagnoseFixture {
  request: IntakePayload;
  status: number;
  response?: DiagnosisResponse;
  errors?: { field: string; message: string }[];
}

interface WhatIfFixture {
  request: { base: IntakePayload; deltas: IntakePayload };
  status: number;
  response: WhatIfResponse;
}

const fixtures = JSON.parse(
  readFileSync(new URL('../fixtures/console_fixtures.json', import.meta.url), 'utf-8'),
) as {
  model_summary: { model_version: string };
  diagnose: DiagnoseFixture[];
  whatif: WhatIfFixture[];
};

const accepted = fixtures.diagnose.filter((f) => f.status === 200);
const rejected = fixtures.diagnose.filter((f) => f.status !== 200);

describe('canned intake forms', () => {
  it('covers the agreed twenty accepted forms', () => {
    expect(accepted.length).toBe(20);
    expect(rejected.length).toBeGreaterThan(0);
  });

  it.each(accepted.map((f, i) => [i, f] as const))(
    'rendered class and path equal the API response (form %i)',
    (_i, fixture) => {
      const response = fixture.response!;
      const view = buildTraceView(response);
      expect(view.cls).toBe(response.class);
      expect(view.steps.map((s) => s.node)).toEqual(response.path.map((p) => p.node));
      expect(view.steps.map((s) => s.branch)).toEqual(response.path.map((p) => p.branch));
      expect(view.steps.map((s) => s.test)).toEqual(response.path.map((p) => p.test));
      // step order is preserved verbatim and the terminal step is last
      expect(view.steps.at(-1)!.terminal).toBe(true);
      const html = renderTraceHTML(view);
      for (const step of response.path) {
        expect(html).toContain(`data-node="${step.node}"`);
      }
      expect(html).toContain(`outcome-${response.class}`);
    },
  );

  it('distribution segments mirror the response distribution', () => {
    for (const fixture of accepted) {
      const view = buildTraceView(fixture.response!);
      expect(view.distribution.map((s) => s.share)).toEqual(fixture.response!.distribution);
    }
  });
});

describe('validation mirror', () => {
  it('accepts exactly the payloads the server accepted', () => {
    for (const fixture of fixtures.diagnose) {
      const problems = validateIntake(fixture.request);
      const serverAccepted = fixture.status === 200;
      expect(problems.length === 0, JSON.stringify({ request: fixture.request, problems })).toBe(
        serverAccepted,
      );
    }
  });

  it('flags the same fields the server flags', () => {
    for (const fixture of rejected) {
      const clientFields = new Set(validateIntake(fixture.request).map((p) => p.field));
      for (const error of fixture.errors!) {
        expect(clientFields.has(error.field), `expected client flag for ${error.field}`).toBe(true);
      }
    }
  });
});

describe('what-if comparison', () => {
  const bmiFlip = fixtures.whatif[0];
  const noop = fixtures.whatif[1];

  it('renders the BMI flip with divergence highlighted at the BMI node', () => {
    const view = buildWhatIfView(bmiFlip.response);
    expect(view.base.cls).toBe('verified_diabetes');
    expect(view.modified.cls).toBe('prediabetes');
    expect(view.changed).toBe(true);
    expect(view.divergentAttribute).toBe('bmi');
    const divergentStep = view.base.steps[view.divergenceIndex!];
    expect(divergentStep.attribute).toBe('bmi');

    const html = renderWhatIfHTML(view);
    const highlighted = html.match(/class="step[^"]*divergent[^"]*" data-node="([^"]+)"/g) ?? [];
    expect(highlighted.length).toBe(2); // one per side
    for (const fragment of highlighted) {
      expect(fragment).toContain(`data-node="${view.divergentNode}"`);
    }
  });

  it('renders a no-change indicator for an empty delta', () => {
    const view = buildWhatIfView(noop.response);
    expect(view.noChange).toBe(true);
    expect(renderWhatIfHTML(view)).toContain('No change');
  });

  it('reports class flips driven by a raised measurement', () => {
    const raised = fixtures.whatif[2];
    const view = buildWhatIfView(raised.response);
    expect(view.changed).toBe(true);
    expect(view.base.cls).not.toBe(view.modified.cls);
  });
});

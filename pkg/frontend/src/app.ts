// Console wiring: intake form -> diagnosis trace -> what-if comparison.
// All rendering goes through the pure view builders in render.ts; this module
// only owns DOM state and API calls.

import { CdssClient } from './api.js';
import {
  buildTraceView,
  buildWhatIfView,
  renderTraceHTML,
  renderWhatIfHTML,
} from './render.js';
import type { FieldError, FieldValue, IntakePayload } from './types.js';
import { FIELD_UNITS, KNOWN_FIELDS, validateIntake } from './validation.js';

interface FieldSpec {
  name: string;
  label: string;
  kind: 'number' | 'select' | 'checkbox';
  options?: string[];
}

const FIELD_SPECS: FieldSpec[] = [
  { name: 'age', label: 'Age', kind: 'number' },
  { name: 'sex', label: 'Sex', kind: 'select', options: ['', 'male', 'female'] },
  { name: 'hba1c', label: 'HbA1c', kind: 'number' },
  { name: 'fpg', label: 'Fasting plasma glucose', kind: 'number' },
  { name: 'ogtt_2h', label: 'OGTT 2-hour glucose', kind: 'number' },
  { name: 'random_glucose', label: 'Random glucose', kind: 'number' },
  { name: 'bmi', label: 'BMI', kind: 'number' },
  { name: 'waist', label: 'Waist circumference', kind: 'number' },
  { name: 'sbp', label: 'Systolic BP', kind: 'number' },
  { name: 'dbp', label: 'Diastolic BP', kind: 'number' },
  { name: 'triglycerides', label: 'Triglycerides', kind: 'number' },
  { name: 'hdl', label: 'HDL cholesterol', kind: 'number' },
  { name: 'physical_activity', label: 'Physical activity', kind: 'select', options: ['', 'high', 'low'] },
  { name: 'family_history', label: 'Family history of diabetes', kind: 'checkbox' },
  { name: 'symptoms', label: 'Hyperglycemia symptoms', kind: 'checkbox' },
  { name: 'balanced_diet', label: 'Balanced diet', kind: 'checkbox' },
  { name: 'htn_medication', label: 'On hypertension medication', kind: 'checkbox' },
];

export class ConsoleApp {
  private client: CdssClient;
  private basePayload: IntakePayload | null = null;

  constructor(private readonly root: HTMLElement, baseUrl: string = '') {
    this.client = new CdssClient(baseUrl);
  }

  mount(): void {
    this.root.innerHTML = `
      <div id="banner" class="banner" hidden></div>
      <form id="intake" novalidate>
        <fieldset id="fields"></fieldset>
        <button id="submit" type="submit" disabled>Diagnose</button>
      </form>
      <div id="result"></div>
      <div id="whatif-controls" hidden>
        <h3>What if?</h3>
        <select id="whatif-field"></select>
        <input id="whatif-value" placeholder="new value" />
        <button id="whatif-run" type="button">Compare</button>
        <button id="whatif-promote" type="button" hidden>Use modified as base</button>
      </div>
      <div id="whatif-result"></div>
    `;
    const fields = this.root.querySelector('#fields') as HTMLElement;
    for (const spec of FIELD_SPECS) {
      fields.appendChild(this.buildField(spec));
    }
    const select = this.root.querySelector('#whatif-field') as HTMLSelectElement;
    for (const spec of FIELD_SPECS) {
      const option = document.createElement('option');
      option.value = spec.name;
      option.textContent = spec.label;
      select.appendChild(option);
    }
    const form = this.root.querySelector('#intake') as HTMLFormElement;
    form.addEventListener('input', () => this.refreshValidation());
    form.addEventListener('submit', (event) => {
      event.preventDefault();
      void this.submit();
    });
    (this.root.querySelector('#whatif-run') as HTMLButtonElement).addEventListener(
      'click',
      () => void this.runWhatIf(),
    );
    (this.root.querySelector('#whatif-promote') as HTMLButtonElement).addEventListener(
      'click',
      () => this.promoteModified(),
    );
    this.refreshValidation();
  }

  private buildField(spec: FieldSpec): HTMLElement {
    const wrap = document.createElement('label');
    wrap.className = 'field';
    wrap.dataset.field = spec.name;
    const unit = FIELD_UNITS[spec.name] ? ` (${FIELD_UNITS[spec.name]})` : '';
    const caption = document.createElement('span');
    caption.textContent = `${spec.label}${unit}`;
    wrap.appendChild(caption);
    let input: HTMLElement;
    if (spec.kind === 'select') {
      const el = document.createElement('select');
      for (const value of spec.options ?? []) {
        const option = document.createElement('option');
        option.value = value;
        option.textContent = value || '(unknown)';
        el.appendChild(option);
      }
      input = el;
    } else if (spec.kind === 'checkbox') {
      const el = document.createElement('select');
      for (const value of ['', 'true', 'false']) {
        const option = document.createElement('option');
        option.value = value;
        option.textContent = value || '(unknown)';
        el.appendChild(option);
      }
      input = el;
    } else {
      const el = document.createElement('input');
      el.type = 'text';
      el.inputMode = 'decimal';
      input = el;
    }
    input.setAttribute('name', spec.name);
    wrap.appendChild(input);
    const message = document.createElement('small');
    message.className = 'field-error';
    wrap.appendChild(message);
    return wrap;
  }

  collectPayload(): IntakePayload {
    const payload: IntakePayload = {};
    for (const spec of FIELD_SPECS) {
      const el = this.root.querySelector(`[name="${spec.name}"]`) as
        | HTMLInputElement
        | HTMLSelectElement
        | null;
      if (!el) continue;
      const raw = el.value.trim();
      if (raw === '') continue;
      if (spec.kind === 'checkbox') {
        payload[spec.name] = raw === 'true';
      } else if (spec.kind === 'number') {
        const parsed = Number(raw);
        payload[spec.name] = Number.isFinite(parsed) && raw !== '' ? parsed : raw;
      } else {
        payload[spec.name] = raw;
      }
    }
    return payload;
  }

  /** Submit stays disabled until the client-side mirror accepts the payload. */
  refreshValidation(): FieldError[] {
    const payload = this.collectPayload();
    const problems = validateIntake(payload);
    this.showFieldErrors(problems);
    const submit = this.root.querySelector('#submit') as HTMLButtonElement;
    submit.disabled = problems.length > 0;
    return problems;
  }

  private showFieldErrors(problems: FieldError[]): void {
    const byField = new Map(problems.map((p) => [p.field, p.message]));
    for (const wrap of this.root.querySelectorAll<HTMLElement>('.field')) {
      const name = wrap.dataset.field ?? '';
      const message = wrap.querySelector('.field-error') as HTMLElement;
      const text = byField.get(name) ?? '';
      message.textContent = text;
      wrap.classList.toggle('invalid', text !== '');
    }
    const banner = this.root.querySelector('#banner') as HTMLElement;
    const general = problems.find((p) => !KNOWN_FIELDS.has(p.field));
    if (general) {
      banner.textContent = general.message;
      banner.hidden = false;
      banner.className = 'banner validation';
    } else if (banner.classList.contains('validation')) {
      banner.hidden = true;
    }
  }

  async submit(): Promise<void> {
    const payload = this.collectPayload();
    const result = await this.client.diagnose(payload);
    const banner = this.root.querySelector('#banner') as HTMLElement;
    const target = this.root.querySelector('#result') as HTMLElement;
    if (result.kind === 'ok') {
      banner.hidden = true;
      this.basePayload = payload;
      target.innerHTML = renderTraceHTML(buildTraceView(result.data));
      (this.root.querySelector('#whatif-controls') as HTMLElement).hidden = false;
    } else if (result.kind === 'invalid') {
      this.showFieldErrors(result.errors);
    } else {
      // network failure or service without a model: keep the form state
      banner.textContent =
        result.kind === 'network'
          ? `Service unreachable (${result.detail}); your entries are preserved, retry when it is back.`
          : 'Service has no model loaded.';
      banner.hidden = false;
      banner.className = 'banner network';
    }
  }

  async runWhatIf(): Promise<void> {
    if (!this.basePayload) return;
    const field = (this.root.querySelector('#whatif-field') as HTMLSelectElement).value;
    const rawValue = (this.root.querySelector('#whatif-value') as HTMLInputElement).value.trim();
    const spec = FIELD_SPECS.find((s) => s.name === field);
    let value: FieldValue = rawValue;
    if (spec?.kind === 'number' && Number.isFinite(Number(rawValue)) && rawValue !== '') {
      value = Number(rawValue);
    } else if (spec?.kind === 'checkbox') {
      value = rawValue === 'true';
    }
    const deltas: IntakePayload = { [field]: value };
    const problems = validateIntake({ ...this.basePayload, ...deltas });
    const target = this.root.querySelector('#whatif-result') as HTMLElement;
    if (problems.some((p) => p.field === field)) {
      target.innerHTML = `<p class="field-error">${problems.find((p) => p.field === field)!.message}</p>`;
      return;
    }
    const result = await this.client.whatif(this.basePayload, deltas);
    if (result.kind === 'ok') {
      const view = buildWhatIfView(result.data);
      target.innerHTML = renderWhatIfHTML(view);
      this.lastModified = { ...this.basePayload, ...deltas };
      (this.root.querySelector('#whatif-promote') as HTMLButtonElement).hidden = view.noChange;
    } else if (result.kind === 'invalid') {
      target.innerHTML = `<p class="field-error">${result.errors
        .map((e) => `${e.field}: ${e.message}`)
        .join('; ')}</p>`;
    } else {
      target.innerHTML = '<p class="banner network">Service unreachable; comparison not run.</p>';
    }
  }

  private lastModified: IntakePayload | null = null;

  /** Adopt the modified scenario as the new base for further exploration. */
  promoteModified(): void {
    if (!this.lastModified) return;
    this.basePayload = this.lastModified;
    for (const [field, value] of Object.entries(this.basePayload)) {
      const el = this.root.querySelector(`[name="${field}"]`) as
        | HTMLInputElement
        | HTMLSelectElement
        | null;
      if (el && value !== undefined) {
        el.value = typeof value === 'boolean' ? String(value) : String(value);
      }
    }
    this.refreshValidation();
    void this.submit();
  }
}

export function bootstrap(): void {
  const root = document.getElementById('app');
  if (root) {
    const baseUrl = root.dataset.apiBase ?? '';
    new ConsoleApp(root, baseUrl).mount();
  }
}

if (typeof document !== 'undefined' && document.getElementById('app')) {
  bootstrap();
}

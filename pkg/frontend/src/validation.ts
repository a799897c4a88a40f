// Client-side mirror of the server's request validation: the console must
// accept exactly the payloads the service accepts, so every rule here
// matches service-side validation (ranges, categories, glycemic requirement,
// blood-pressure ordering, alpha range, unknown-field rejection).

import type { FieldError, FieldValue, IntakePayload } from './types.js';

interface NumericRule {
  lo: number;
  hi: number;
  loClosed?: boolean;
  hiClosed?: boolean;
}

// Physiologic ranges; age is inclusive, the rest are open intervals.
const NUMERIC_RULES: Record<string, NumericRule | null> = {
  age: { lo: 0, hi: 130, loClosed: true, hiClosed: true },
  bmi: { lo: 5, hi: 100 },
  fpg: { lo: 20, hi: 1000 },
  hba1c: { lo: 2, hi: 20 },
  ogtt_2h: { lo: 20, hi: 1000 },
  random_glucose: { lo: 20, hi: 1000 },
  sbp: null,
  dbp: null,
  triglycerides: null,
  hdl: null,
  waist: null,
};

const CATEGORICAL_RULES: Record<string, readonly string[]> = {
  sex: ['male', 'female'],
  physical_activity: ['high', 'low'],
};

const BOOLEAN_FIELDS = [
  'family_history',
  'symptoms',
  'balanced_diet',
  'htn_medication',
] as const;

export const GLYCEMIC_FIELDS = ['fpg', 'hba1c', 'ogtt_2h', 'random_glucose'] as const;

export const KNOWN_FIELDS = new Set<string>([
  ...Object.keys(NUMERIC_RULES),
  ...Object.keys(CATEGORICAL_RULES),
  ...BOOLEAN_FIELDS,
  'alpha',
]);

export const FIELD_UNITS: Record<string, string> = {
  age: 'years',
  bmi: 'kg/m2',
  fpg: 'mg/dL',
  hba1c: '%',
  ogtt_2h: 'mg/dL',
  random_glucose: 'mg/dL',
  sbp: 'mmHg',
  dbp: 'mmHg',
  triglycerides: 'mg/dL',
  hdl: 'mg/dL',
  waist: 'cm',
};

const NUMBER_PATTERN = /^[+-]?(\d+\.?\d*|\.\d+)([eE][+-]?\d+)?$/;

function parseNumber(raw: FieldValue): number | null {
  if (typeof raw === 'number') {
    return Number.isFinite(raw) ? raw : null;
  }
  if (typeof raw === 'string' && NUMBER_PATTERN.test(raw.trim())) {
    return Number(raw.trim());
  }
  return null;
}

function parseBoolean(raw: FieldValue): boolean | null {
  if (typeof raw === 'boolean') return raw;
  if (typeof raw === 'string') {
    const low = raw.toLowerCase();
    if (low === 'true') return true;
    if (low === 'false') return false;
  }
  return null;
}

function unitHint(field: string, value: number): string {
  if (['fpg', 'ogtt_2h', 'random_glucose'].includes(field) && value <= 20) {
    return ' (value looks like mmol/L; supply mg/dL)';
  }
  if (field === 'hba1c' && value >= 20) {
    return ' (value looks like mmol/mol; supply percent)';
  }
  return '';
}

/** Validate a diagnosis payload; an empty result means the server will accept it. */
export function validateIntake(payload: IntakePayload): FieldError[] {
  const problems: FieldError[] = [];
  const parsed: Record<string, number> = {};
  let haveGlycemic = false;

  for (const [field, raw] of Object.entries(payload)) {
    if (raw === undefined || raw === null) continue;
    if (field === 'alpha') {
      const value = parseNumber(raw);
      if (value === null) {
        problems.push({ field, message: `not a number: ${String(raw)}` });
      } else if (value < 0 || value > 1) {
        problems.push({ field, message: `must be in [0, 1], got ${value}` });
      }
      continue;
    }
    if (!KNOWN_FIELDS.has(field)) {
      problems.push({ field, message: 'unknown field' });
      continue;
    }
    if (field in NUMERIC_RULES) {
      const value = parseNumber(raw);
      if (value === null) {
        problems.push({ field, message: `not a number: ${String(raw)}` });
        continue;
      }
      parsed[field] = value;
      // a parsed glycemic value satisfies the presence rule even when its
      // range check fails, matching the server's evaluation order
      if ((GLYCEMIC_FIELDS as readonly string[]).includes(field)) {
        haveGlycemic = true;
      }
      const rule = NUMERIC_RULES[field];
      if (rule) {
        const aboveLo = rule.loClosed ? value >= rule.lo : value > rule.lo;
        const belowHi = rule.hiClosed ? value <= rule.hi : value < rule.hi;
        if (!aboveLo || !belowHi) {
          problems.push({
            field,
            message: `${field}=${value} outside (${rule.lo}, ${rule.hi})${unitHint(field, value)}`,
          });
        }
      }
    } else if (field in CATEGORICAL_RULES) {
      if (typeof raw !== 'string' || !CATEGORICAL_RULES[field].includes(raw)) {
        problems.push({
          field,
          message: `expected one of ${CATEGORICAL_RULES[field].join('/')}, got ${String(raw)}`,
        });
      }
    } else {
      if (parseBoolean(raw) === null) {
        problems.push({ field, message: `expected true/false, got ${String(raw)}` });
      }
    }
  }

  if (parsed.sbp !== undefined && parsed.dbp !== undefined && !(parsed.sbp > parsed.dbp)) {
    problems.push({ field: 'sbp', message: `sbp=${parsed.sbp} not greater than dbp=${parsed.dbp}` });
  }
  if (!haveGlycemic) {
    problems.push({
      field: 'glycemic',
      message: 'at least one of fpg, hba1c, ogtt_2h, random_glucose is required',
    });
  }
  return problems;
}

export function isSubmittable(payload: IntakePayload): boolean {
  return validateIntake(payload).length === 0;
}

// Shared types for the staging service API and the console views.

export const CLASS_ORDER = [
  'verified_diabetes',
  'prediabetes',
  'at_risk',
  'no_diabetes',
] as const;

export type GlycemicClass = (typeof CLASS_ORDER)[number];

export const CLASS_LABELS: Record<GlycemicClass, string> = {
  verified_diabetes: 'Verified Diabetes',
  prediabetes: 'Prediabetes',
  at_risk: 'At Risk',
  no_diabetes: 'No Diabetes',
};

export type FieldValue = number | boolean | string;

/** Diagnosis request payload: schema features plus optional blend weight. */
export interface IntakePayload {
  [field: string]: FieldValue | undefined;
}

export interface PathStep {
  node: string;
  attribute: string | null; // null marks the terminal leaf step
  test: string;
  branch: string;
  observed: FieldValue | null;
  fallback: boolean;
}

export interface DiagnosisResponse {
  class: GlycemicClass;
  distribution: number[];
  path: PathStep[];
  flags: string[];
  model_version: string;
  alpha: number | null;
}

export interface FieldError {
  field: string;
  message: string;
}

export interface Divergence {
  index: number;
  node: string | null;
  attribute: string | null;
  base_branch: string | null;
  modified_branch: string | null;
}

export interface WhatIfResponse {
  base: DiagnosisResponse;
  modified: DiagnosisResponse;
  divergence: Divergence | null;
  changed: boolean;
}

export interface ModelSummary {
  model_version: string;
  kind: string;
  source: string;
  nodes: number;
  leaves: number;
  rules: number;
  attributes: string[];
  annotations: string[];
  alpha?: number;
  grafts?: number;
}

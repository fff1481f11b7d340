// Wire types mirroring the register JSON schema served under /api/v1.

export interface ProfileDoc {
  locus: string;
  asset: string;
  risk_type: string;
  description: string;
  consequence: string;
}

export interface AssessmentDoc {
  vulnerability: string;
  threat: string;
  threat_agent: string;
  impact: string;
  likelihood: string;
  severity: string;
  rating: string;
}

export interface EvaluationDoc {
  decision: string;
  solution: string;
}

export interface ActionDoc {
  text: string;
  owner: string;
  due: string;
}

export interface TreatmentDoc {
  actions: ActionDoc[];
  controls: string[];
  validation_note: string;
}

export interface MonitoringDoc {
  observation: string;
  effective: string;
  reviewed_by: string;
}

export type StepName = "Profile" | "Assessment" | "Evaluation" | "Treatment" | "Monitoring";

export const STEP_ORDER: StepName[] = [
  "Profile",
  "Assessment",
  "Evaluation",
  "Treatment",
  "Monitoring",
];

export interface StepRecordDoc {
  step: StepName;
  iteration: number;
  documentation: string;
  actor: string;
  timestamp: string;
  payload: Record<string, unknown>;
}

export interface CaseStatusDoc {
  text: string;
  iteration: number;
  last_completed: StepName | null;
  next_step: StepName | null;
  complete: boolean;
}

export interface CaseDoc {
  case_id: number;
  profile: ProfileDoc;
  assessment: AssessmentDoc | null;
  evaluation: EvaluationDoc | null;
  treatment: TreatmentDoc | null;
  monitoring: MonitoringDoc | null;
  history: StepRecordDoc[];
  status: CaseStatusDoc;
}

export interface MatrixDoc {
  name: string;
  version: number;
  likelihood_axis: string[];
  severity_axis: string[];
  cells: string[]; // row-major, likelihood descending, severity descending
}

export interface IterationDoc {
  index: number;
  cadence_days: number;
  opened_at: string;
  closed_at: string | null;
  carryover: { case_id: number; resume_after: StepName | null; justification: string }[];
}

export interface JudgmentDoc {
  i: number; // 1-based, upper triangle (i < j)
  j: number;
  value: string;
}

export interface PairwiseDoc {
  labels: string[];
  judgments: JudgmentDoc[];
}

export interface RankedCaseDoc {
  case_id: number;
  score: number;
}

export interface SessionResultDoc {
  ranking: RankedCaseDoc[];
  criteria_weights: number[];
  consistency: Record<string, number>;
}

export interface SessionDoc {
  session_id: number;
  tie_group: number[];
  rating: string;
  criteria: string[];
  criteria_matrix: PairwiseDoc | null;
  alternative_matrices: PairwiseDoc[];
  cr_overrides: Record<string, string>;
  status: "Draft" | "Complete";
  result: SessionResultDoc | null;
  consistency_preview: Record<string, { cr: number; acceptable: boolean }>;
}

export interface TieGroupDoc {
  rating: string;
  cases: number[];
}

export interface HeatCellDoc {
  likelihood: string;
  severity: string;
  rating: string;
  count: number;
}

export interface HeatmapDoc {
  likelihoods: string[]; // descending
  severities: string[]; // descending
  cells: HeatCellDoc[][];
  total: number;
}

export interface WhatIfDoc {
  case_id: number;
  likelihood: string;
  severity: string;
  rating: string;
  current_rating: string | null;
}

export interface RegisterDoc {
  schema_version: number;
  revision: number;
  matrix: MatrixDoc;
  cases: Omit<CaseDoc, "status">[];
  iterations: IterationDoc[];
  ahp_sessions: Omit<SessionDoc, "consistency_preview">[];
}

export interface ErrorBody {
  code: string;
  message: string;
  details: Record<string, unknown>;
}

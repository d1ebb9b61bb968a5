/** Payload types mirroring the review-service JSON API. */

export type Verdict = "ihc_recommended" | "ihc_not_recommended";

export interface Recommendation {
  slide_id: string;
  cancer_probability: number;
  operating_threshold: number;
  verdict: Verdict;
  heatmap_ref: string | null;
  final_isup: number | string | null;
}

export interface AiFields {
  cancer_probability: number;
  verdict: Verdict;
  final_isup: number | string | null;
  heatmap_ref: string | null;
}

export interface CaseView {
  case_id: string;
  position: number;
  total: number;
  image_ref: string | null;
  /** present only in unblinded sessions */
  ai?: AiFields;
}

export interface NextCaseResponse {
  done: boolean;
  case: CaseView | null;
}

export interface SessionSummary {
  session_id: string;
  reviewer_id: string;
  n_cases: number;
  blinded: boolean;
  state: "open" | "finalized";
  n_decided?: number;
}

export type Diagnosis =
  | "benign"
  | "atypia_sfc"
  | "isup_1"
  | "isup_2"
  | "isup_3"
  | "isup_4"
  | "isup_5"
  | "suspicious_ductal";

export interface DecisionPayload {
  case_id: string;
  diagnosis: Diagnosis;
  ihc_required: boolean;
  note: string;
}

export interface StoredDecision extends DecisionPayload {
  reviewer_id: string;
  timestamp: string;
}

export interface ConcordanceRow {
  case_id: string;
  is_decoy: boolean;
  reference_class: number | string | null;
  ai_probability: number;
  ai_verdict: Verdict;
  ai_isup: number | string | null;
  diagnosis: Diagnosis | null;
  ihc_required: boolean | null;
  note: string | null;
}

export interface ConcordanceReport {
  session_id: string;
  reviewer_id: string;
  n_cases: number;
  n_decided: number;
  n_ihc_required: number;
  cases: ConcordanceRow[];
}

export interface ThresholdRow {
  threshold: number;
  sensitivity: number | null;
  specificity: number | null;
  tp: number;
  fp: number;
  tn: number;
  fn: number;
  fn_isup_breakdown: Record<string, number>;
  ihc_reduction_count: number;
  ihc_reduction_fraction: number;
  isup_label_level: "slide" | "location";
}

export interface CurvePoint {
  threshold: number;
  sensitivity: number | null;
  specificity: number | null;
}

export interface CohortReport {
  cohort_id: string;
  n_slides: number;
  auc: number | null;
  thresholds: ThresholdRow[];
  curve?: CurvePoint[];
  roc?: [number, number][];
}

export interface TrustSnapshot {
  confirmed_benign: number;
  ihc_showed_cancer: number;
  npv: number | null;
  alerts: { slide_id: string; outcome: string; timestamp?: string }[];
}

/** Payload shapes of the review-service HTTP API. */

export interface TopicView {
  id: number;
  top_words_by_slice: string[][];
  pooled_top_words: string[];
}

export interface TopicsResponse {
  slice_count: number;
  cardinality: number;
  topics: TopicView[];
}

export interface LabelEntry {
  label: string;
  words: [string, number][];
  truncated: boolean;
}

export interface LabelsResponse {
  labels: LabelEntry[];
  skipped_labels: string[];
  extra_labels: string[];
}

export interface AssignmentEntry {
  topic: number;
  label: string | null;
  score: number | null;
  rank_within_topic: number | null;
  provenance: "auto" | "human_override";
  measure: string;
  evicted: boolean;
  similarity: Record<string, number>;
}

export interface AssignmentsResponse {
  measure: string;
  assignments: AssignmentEntry[];
  unused_labels: string[];
}

export interface AnnotationRecord {
  annotator: string;
  topic_id: number;
  first: string;
  second: string | null;
  timestamp: string | null;
}

export interface AnnotationsResponse {
  annotations: AnnotationRecord[];
}

export interface ReportRow {
  topic: number;
  auto_label: string | null;
  auto_score: number | null;
  provenance: string;
  top_words: string[];
  expert_labels: string[] | null;
  prop_first: number | null;
  prop_second: number | null;
  fleiss_kappa: number | null;
}

export interface ReportResponse {
  format: string;
  version: number;
  cardinality: number;
  has_annotations: boolean;
  rows: ReportRow[];
  summary: {
    topics: number;
    labeled: number;
    unlabeled: number;
    annotated: number;
    mean_kappa: number | null;
  };
  method_notes: string;
}

export type SliceChoice = number | "union";

export type Mode = "annotate" | "review" | "report";

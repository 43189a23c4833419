// Shapes served by the session service. Field names mirror the wire
// format exactly; nothing here is computed client-side.

export type NodeKind = "root" | "intermediate" | "observable";

export interface NodeDef {
  id: string;
  kind: NodeKind;
  label: string;
  target: boolean;
  cost: number;
}

export interface LinkDef {
  parent: string;
  child: string;
  p_given_true: number;
  p_given_false: number;
}

export interface NetworkDefinition {
  name: string;
  root_prior: number;
  nodes: NodeDef[];
  links: LinkDef[];
  thresholds: Record<string, { high: number; low: number }>;
}

export interface NetworkSummary {
  name: string;
  nodes: number;
  links: number;
  root: string;
  leaves: string[];
  targets: string[];
  definition: NetworkDefinition;
}

export interface StrategyPayload {
  mode: string;
  depth_vector?: number[] | null;
  ev?: string;
  ev_timing?: string;
  goal?: string;
  selected_targets?: string[];
  name?: string;
}

export interface QueryLogEntry {
  node: string;
  value: number;
  cost: number;
}

export interface SessionView {
  session_id: string;
  network: string;
  created_at: string;
  status: "active" | "terminated";
  strategy: Required<StrategyPayload>;
  posteriors: Record<string, number>;
  evidence: Record<string, number>;
  suggestion: string | null;
  focus: string[];
  query_log: QueryLogEntry[];
  query_count: number;
  total_cost: number;
  decisions: Record<string, string> | null;
}

export interface WhatIfView {
  session_id: string;
  node: string;
  ev_score: number;
  if_true: Record<string, number>;
  if_false: Record<string, number>;
}

export interface ApiErrorBody {
  code: string;
  message: string;
}

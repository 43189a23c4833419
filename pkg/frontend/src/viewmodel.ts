import type { NetworkDefinition, SessionView, QueryLogEntry } from "./types";

// The view model is a pure projection of one get_state response plus
// the static network definition. Probabilities are only ever
// formatted; no inference happens on the client.

export type EvidenceMark = "hard-true" | "hard-false" | "soft" | "none";

export interface NodeView {
  id: string;
  label: string;
  kind: string;
  level: number;
  isLeaf: boolean;
  posterior: number;
  display: string;
  barPercent: number;
  evidence: EvidenceMark;
  evidenceValue: number | null;
  suggested: boolean;
  focused: boolean;
  decision: string | null;
}

export interface ViewModel {
  sessionId: string;
  network: string;
  status: "active" | "terminated";
  strategyLabel: string;
  levels: NodeView[][];
  suggestion: string | null;
  history: QueryLogEntry[];
  decisions: Record<string, string> | null;
  queryCount: number;
  totalCost: number;
}

export function formatProbability(p: number): string {
  return p.toFixed(3);
}

export function nodeLevels(definition: NetworkDefinition): Map<string, number> {
  const parents = new Map<string, string>();
  for (const link of definition.links) parents.set(link.child, link.parent);
  const levels = new Map<string, number>();
  const levelOf = (id: string): number => {
    const known = levels.get(id);
    if (known !== undefined) return known;
    const parent = parents.get(id);
    const level = parent === undefined ? 1 : levelOf(parent) + 1;
    levels.set(id, level);
    return level;
  };
  for (const node of definition.nodes) levelOf(node.id);
  return levels;
}

function evidenceMark(value: number | undefined): EvidenceMark {
  if (value === undefined) return "none";
  if (value === 1) return "hard-true";
  if (value === 0) return "hard-false";
  return "soft";
}

export function strategyLabel(view: SessionView): string {
  const s = view.strategy;
  return s.name || `${s.mode}-${s.ev}-${s.ev_timing}`;
}

export function buildViewModel(
  definition: NetworkDefinition,
  view: SessionView,
): ViewModel {
  const levels = nodeLevels(definition);
  const parents = new Set(definition.links.map((l) => l.parent));
  const focused = new Set(view.focus);

  const byLevel: NodeView[][] = [];
  for (const node of definition.nodes) {
    const level = levels.get(node.id) ?? 1;
    const posterior = view.posteriors[node.id];
    const raw = view.evidence[node.id];
    const nodeView: NodeView = {
      id: node.id,
      label: node.label,
      kind: node.kind,
      level,
      isLeaf: !parents.has(node.id),
      posterior,
      display: formatProbability(posterior),
      barPercent: Math.round(posterior * 1000) / 10,
      evidence: evidenceMark(raw),
      evidenceValue: raw === undefined ? null : raw,
      suggested: view.suggestion === node.id,
      focused: focused.has(node.id),
      decision: view.decisions ? (view.decisions[node.id] ?? null) : null,
    };
    while (byLevel.length < level) byLevel.push([]);
    byLevel[level - 1].push(nodeView);
  }

  return {
    sessionId: view.session_id,
    network: view.network,
    status: view.status,
    strategyLabel: strategyLabel(view),
    levels: byLevel,
    suggestion: view.suggestion,
    history: view.query_log,
    decisions: view.decisions,
    queryCount: view.query_count,
    totalCost: view.total_cost,
  };
}

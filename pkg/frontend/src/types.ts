/**
 * Payload types mirroring the risk service's JSON contract.
 *
 * Every interface here describes a response (or request body) exactly as the
 * service serializes it. The UI never derives risk numbers of its own: all
 * values rendered anywhere trace back to a field on one of these payloads.
 */

/** One entry per perspective, in the order given by `perspectives`. */
export type Vector = number[];

/** Edge identity as the service spells it: [source, target, label]. */
export type EdgeRef = [string, string, string];

export interface GraphNode {
  id: string;
  concept: string;
  measured_risk: Vector | null;
}

export interface GraphEdge {
  source: string;
  target: string;
  label: string;
  kind: "abstraction" | "dependency";
  importance: Vector;
}

export interface GraphPayload {
  version: number;
  perspectives: string[];
  relation_kinds: Record<string, string>;
  nodes: GraphNode[];
  edges: GraphEdge[];
}

export interface NodeRisk {
  dr: Vector;
  fr: Vector;
  tr: Vector;
}

export interface Witness {
  leaf: string;
  path: EdgeRef[];
}

export interface PropagationStats {
  nodes: number;
  sweeps: number;
  relaxations: number;
  visited: number;
}

export interface ResultPayload {
  perspectives: string[];
  nodes: Record<string, NodeRisk>;
  provenance: Record<string, Witness[][]>;
  concepts: Record<string, string>;
  stats: PropagationStats;
}

export interface PropagateResponse extends ResultPayload {
  version: number;
  snapshot_id: string | null;
}

export interface AlertPayload {
  node: string;
  perspective: string;
  value: number;
  threshold: number;
  margin: number;
}

export interface RankingEntry {
  node: string;
  value: number;
}

export interface AssessResponse {
  version: number;
  alerts: AlertPayload[];
  ranking?: RankingEntry[];
}

export interface RootCause {
  leaf: string;
  path: EdgeRef[];
  value: number;
}

export interface RootCausesResponse {
  version: number;
  node: string;
  causes: Record<string, RootCause[]>;
}

/** What-if action in wire form; values length matches the perspective count. */
export interface ActionPayload {
  kind: string;
  node?: string;
  edge?: { source: string; target: string; label: string };
  values?: Vector;
}

export interface DeltaCell {
  before: number;
  after: number;
  delta: number;
}

export interface DeltaPayload {
  perspectives: string[];
  /** Per node, one cell per perspective. */
  changes: Record<string, DeltaCell[]>;
  before_only: Record<string, Vector>;
  after_only: Record<string, Vector>;
  max_abs_delta: Vector;
}

export interface WhatifResponse {
  version: number;
  result: ResultPayload;
  delta: DeltaPayload;
}

export interface CommitResponse {
  version: number;
  applied: number;
}

export interface SnapshotInfo {
  id: string;
  created_at: string;
  label: string | null;
}

export interface SnapshotListResponse {
  snapshots: SnapshotInfo[];
}

export interface SnapshotPayload {
  id: string;
  created_at: string;
  label: string | null;
  model: unknown;
  result: ResultPayload;
}

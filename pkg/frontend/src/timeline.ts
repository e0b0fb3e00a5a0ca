/**
 * Snapshot timeline: how a node's total risk evolved across saved snapshots,
 * plus tabular diffs between two snapshots. Values are read out of snapshot
 * payloads as stored; the sparkline's vertical axis is always the full [0, 1]
 * range so shapes are comparable between nodes and perspectives.
 */

import type { DeltaPayload, SnapshotPayload } from "./types.js";

export interface SeriesPoint {
  snapshotId: string;
  createdAt: string;
  label: string | null;
  value: number;
}

export interface NodeSeries {
  node: string;
  perspective: string;
  points: SeriesPoint[];
}

/**
 * Why a set of snapshots cannot be charted together, or null when it can.
 * Snapshots taken under different perspective schemas are not comparable,
 * so the timeline is disabled with an explanation instead of guessing.
 */
export function mismatchReason(snapshots: SnapshotPayload[]): string | null {
  if (snapshots.length === 0) {
    return null;
  }
  const first = snapshots[0].result.perspectives;
  for (const snap of snapshots.slice(1)) {
    const other = snap.result.perspectives;
    if (other.length !== first.length || other.some((p, i) => p !== first[i])) {
      return (
        `snapshots disagree on perspectives: ` +
        `[${first.join(", ")}] vs [${other.join(", ")}]`
      );
    }
  }
  return null;
}

/** Per-perspective series of a node's total risk, ordered by creation time. */
export function nodeSeries(
  snapshots: SnapshotPayload[],
  nodeId: string,
): NodeSeries[] {
  const mismatch = mismatchReason(snapshots);
  if (mismatch !== null) {
    throw new Error(mismatch);
  }
  const ordered = [...snapshots].sort((a, b) =>
    a.created_at < b.created_at ? -1 : a.created_at > b.created_at ? 1 : 0,
  );
  const relevant = ordered.filter((snap) => nodeId in snap.result.nodes);
  if (relevant.length === 0) {
    return [];
  }
  const perspectives = relevant[0].result.perspectives;
  return perspectives.map((perspective, k) => ({
    node: nodeId,
    perspective,
    points: relevant.map((snap) => ({
      snapshotId: snap.id,
      createdAt: snap.created_at,
      label: snap.label,
      value: snap.result.nodes[nodeId].tr[k],
    })),
  }));
}

/** Inline SVG sparkline with a fixed [0, 1] vertical scale. */
export function sparkline(values: number[], width = 120, height = 28): string {
  const pad = 2;
  const usableW = width - 2 * pad;
  const usableH = height - 2 * pad;
  const y = (v: number) => pad + (1 - Math.min(1, Math.max(0, v))) * usableH;

  let body: string;
  if (values.length === 0) {
    body = "";
  } else if (values.length === 1) {
    body = `<circle cx="${pad + usableW / 2}" cy="${y(values[0])}" r="2.5" fill="#06c"/>`;
  } else {
    const step = usableW / (values.length - 1);
    const points = values
      .map((v, i) => `${(pad + i * step).toFixed(1)},${y(v).toFixed(1)}`)
      .join(" ");
    body = `<polyline points="${points}" fill="none" stroke="#06c" stroke-width="1.5"/>`;
  }
  return (
    `<svg xmlns="http://www.w3.org/2000/svg" width="${width}" height="${height}" ` +
    `viewBox="0 0 ${width} ${height}">${body}</svg>`
  );
}

export interface DiffRow {
  node: string;
  perspective: string;
  before: number;
  after: number;
  delta: number;
}

/**
 * Flatten a snapshot diff into table rows, one per changed node/perspective
 * cell. Identical snapshots produce an empty table.
 */
export function diffRows(delta: DeltaPayload): DiffRow[] {
  const rows: DiffRow[] = [];
  for (const node of Object.keys(delta.changes).sort()) {
    delta.changes[node].forEach((cell, k) => {
      if (cell.delta !== 0) {
        rows.push({
          node,
          perspective: delta.perspectives[k],
          before: cell.before,
          after: cell.after,
          delta: cell.delta,
        });
      }
    });
  }
  return rows;
}

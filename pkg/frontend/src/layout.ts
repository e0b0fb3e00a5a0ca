/**
 * Layered graph layout. Nodes are placed in rows by abstraction depth:
 * measured leaves sit at the bottom, each abstraction level one row higher,
 * so risk visibly flows upward from observations to the processes built on
 * them. Dependency edges do not affect placement.
 */

import type { GraphPayload } from "./types.js";

export interface Placement {
  id: string;
  depth: number;
  x: number;
  y: number;
}

export interface Layout {
  placements: Placement[];
  width: number;
  height: number;
}

export interface LayoutOptions {
  columnWidth?: number;
  rowHeight?: number;
  margin?: number;
}

/**
 * Depth of each node along abstraction edges: 0 for nodes with no abstraction
 * in-edges, otherwise one more than the deepest abstraction in-neighbor.
 * Abstraction cycles are invalid upstream; if one slips through, members are
 * treated as depth 0 rather than recursing forever.
 */
export function abstractionDepths(graph: GraphPayload): Map<string, number> {
  const inNeighbors = new Map<string, string[]>();
  for (const node of graph.nodes) {
    inNeighbors.set(node.id, []);
  }
  for (const edge of graph.edges) {
    if (edge.kind === "abstraction") {
      inNeighbors.get(edge.target)?.push(edge.source);
    }
  }

  const depths = new Map<string, number>();
  const visiting = new Set<string>();

  const depthOf = (id: string): number => {
    const known = depths.get(id);
    if (known !== undefined) {
      return known;
    }
    if (visiting.has(id)) {
      return 0;
    }
    visiting.add(id);
    const sources = inNeighbors.get(id) ?? [];
    let depth = 0;
    for (const source of sources) {
      depth = Math.max(depth, depthOf(source) + 1);
    }
    visiting.delete(id);
    depths.set(id, depth);
    return depth;
  };

  for (const node of graph.nodes) {
    depthOf(node.id);
  }
  return depths;
}

/** Place nodes on a grid: one row per depth, columns ordered by node id. */
export function layeredLayout(
  graph: GraphPayload,
  options: LayoutOptions = {},
): Layout {
  const columnWidth = options.columnWidth ?? 150;
  const rowHeight = options.rowHeight ?? 110;
  const margin = options.margin ?? 60;

  const depths = abstractionDepths(graph);
  const rows = new Map<number, string[]>();
  let maxDepth = 0;
  for (const node of graph.nodes) {
    const depth = depths.get(node.id) ?? 0;
    maxDepth = Math.max(maxDepth, depth);
    const row = rows.get(depth);
    if (row) {
      row.push(node.id);
    } else {
      rows.set(depth, [node.id]);
    }
  }

  const placements: Placement[] = [];
  let widestRow = 0;
  for (const [depth, ids] of rows) {
    ids.sort();
    widestRow = Math.max(widestRow, ids.length);
    ids.forEach((id, index) => {
      placements.push({
        id,
        depth,
        x: margin + index * columnWidth,
        // deeper nodes sit higher on the canvas; leaves (depth 0) at the bottom
        y: margin + (maxDepth - depth) * rowHeight,
      });
    });
  }
  placements.sort((a, b) => (a.id < b.id ? -1 : a.id > b.id ? 1 : 0));

  return {
    placements,
    width: 2 * margin + Math.max(0, widestRow - 1) * columnWidth,
    height: 2 * margin + maxDepth * rowHeight,
  };
}

/**
 * Root-cause panel content. Turns a root-causes response into display rows —
 * the leaf that wins each perspective, the path it took, and its contributed
 * value, all read directly from the service payload.
 */

import type { RootCausesResponse } from "./types.js";

export interface CauseRow {
  perspective: string;
  leaf: string;
  /** Human-readable path, e.g. "imp-C → asset-210 → DoorDisassembly". */
  route: string;
  hops: number;
  value: number;
}

export function causeRows(response: RootCausesResponse): CauseRow[] {
  const rows: CauseRow[] = [];
  for (const [perspective, causes] of Object.entries(response.causes)) {
    for (const cause of causes) {
      const stations =
        cause.path.length > 0
          ? [cause.path[0][0], ...cause.path.map(([, target]) => target)]
          : [cause.leaf];
      rows.push({
        perspective,
        leaf: cause.leaf,
        route: stations.join(" → "),
        hops: cause.path.length,
        value: cause.value,
      });
    }
  }
  return rows;
}

function escapeHtml(text: string): string {
  return text
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;");
}

/** HTML for the root-causes side panel. */
export function causesPanelHtml(response: RootCausesResponse): string {
  const rows = causeRows(response);
  if (rows.length === 0) {
    return `<h3>root causes of ${escapeHtml(response.node)}</h3><p>no risk reaches this node</p>`;
  }
  const items = rows
    .map(
      (row) =>
        `<li><strong>${escapeHtml(row.perspective)}</strong>: ` +
        `${escapeHtml(row.leaf)} contributes ${row.value.toFixed(3)} ` +
        `via ${escapeHtml(row.route)}</li>`,
    )
    .join("");
  return `<h3>root causes of ${escapeHtml(response.node)}</h3><ul>${items}</ul>`;
}

/**
 * Graph rendering. Builds a drawable model (and an SVG string) for one
 * perspective of a propagation result. Every number shown comes straight out
 * of the service payload — this module colors and positions values, it never
 * computes risk. If the payload does not line up with the graph, rendering
 * fails as a whole rather than drawing a partial or mixed picture.
 */

import { labelColor, riskColor } from "./colors.js";
import { layeredLayout } from "./layout.js";
import type { AlertPayload, GraphPayload, ResultPayload } from "./types.js";

export interface RenderNode {
  id: string;
  concept: string;
  x: number;
  y: number;
  /** Total risk for the selected perspective, verbatim from the payload. */
  value: number;
  fill: string;
  textColor: string;
  alerted: boolean;
  /** Optional annotation, e.g. a what-if delta such as "-0.300". */
  badge?: string;
}

export interface RenderEdge {
  source: string;
  target: string;
  label: string;
  kind: "abstraction" | "dependency";
  dashed: boolean;
  x1: number;
  y1: number;
  x2: number;
  y2: number;
}

export interface RenderModel {
  perspective: string;
  width: number;
  height: number;
  nodes: RenderNode[];
  edges: RenderEdge[];
}

export interface RenderOptions {
  perspective: string;
  alerts?: AlertPayload[];
  badges?: Record<string, string>;
}

export type RenderOutcome =
  | { ok: true; model: RenderModel; svg: string }
  | { ok: false; error: string };

function sameStrings(a: readonly string[], b: readonly string[]): boolean {
  return a.length === b.length && a.every((value, i) => value === b[i]);
}

/**
 * Check that the result payload actually describes this graph before any
 * drawing happens. A mismatch yields an error and no model at all.
 */
function contractError(
  graph: GraphPayload,
  result: ResultPayload,
  perspective: string,
): string | null {
  if (!sameStrings(graph.perspectives, result.perspectives)) {
    return (
      `perspective mismatch: graph has [${graph.perspectives.join(", ")}], ` +
      `result has [${result.perspectives.join(", ")}]`
    );
  }
  const k = result.perspectives.indexOf(perspective);
  if (k < 0) {
    return `unknown perspective '${perspective}'`;
  }
  for (const node of graph.nodes) {
    const risk = result.nodes[node.id];
    if (!risk) {
      return `result payload has no entry for node '${node.id}'`;
    }
    if (!Array.isArray(risk.tr) || risk.tr.length !== graph.perspectives.length) {
      return `total risk for '${node.id}' does not cover every perspective`;
    }
  }
  return null;
}

export function renderGraph(
  graph: GraphPayload,
  result: ResultPayload,
  options: RenderOptions,
): RenderOutcome {
  const error = contractError(graph, result, options.perspective);
  if (error !== null) {
    return { ok: false, error };
  }

  const k = result.perspectives.indexOf(options.perspective);
  const layout = layeredLayout(graph);
  const positions = new Map(layout.placements.map((p) => [p.id, p]));
  const alerted = new Set(
    (options.alerts ?? [])
      .filter((alert) => alert.perspective === options.perspective)
      .map((alert) => alert.node),
  );

  const nodes: RenderNode[] = graph.nodes.map((node) => {
    const place = positions.get(node.id)!;
    const value = result.nodes[node.id].tr[k];
    const badge = options.badges?.[node.id];
    return {
      id: node.id,
      concept: node.concept,
      x: place.x,
      y: place.y,
      value,
      fill: riskColor(value),
      textColor: labelColor(value),
      alerted: alerted.has(node.id),
      ...(badge !== undefined ? { badge } : {}),
    };
  });

  const edges: RenderEdge[] = graph.edges.map((edge) => {
    const from = positions.get(edge.source)!;
    const to = positions.get(edge.target)!;
    return {
      source: edge.source,
      target: edge.target,
      label: edge.label,
      kind: edge.kind,
      dashed: edge.kind === "dependency",
      x1: from.x,
      y1: from.y,
      x2: to.x,
      y2: to.y,
    };
  });

  const model: RenderModel = {
    perspective: options.perspective,
    width: layout.width,
    height: layout.height,
    nodes,
    edges,
  };
  return { ok: true, model, svg: toSvg(model) };
}

function escapeXml(text: string): string {
  return text
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}

export function toSvg(model: RenderModel): string {
  const parts: string[] = [
    `<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 ${model.width} ${model.height}" ` +
      `width="${model.width}" height="${model.height}" role="img">`,
  ];
  for (const edge of model.edges) {
    const dash = edge.dashed ? ' stroke-dasharray="6 4"' : "";
    parts.push(
      `<line x1="${edge.x1}" y1="${edge.y1}" x2="${edge.x2}" y2="${edge.y2}" ` +
        `stroke="#8a8a8a" stroke-width="1.5"${dash} data-kind="${edge.kind}"/>`,
    );
  }
  for (const node of model.nodes) {
    const outline = node.alerted
      ? ' stroke="#d11" stroke-width="3"'
      : ' stroke="#555" stroke-width="1"';
    parts.push(
      `<g data-node="${escapeXml(node.id)}">` +
        `<circle cx="${node.x}" cy="${node.y}" r="26" fill="${node.fill}"${outline}/>` +
        `<text x="${node.x}" y="${node.y + 4}" text-anchor="middle" ` +
        `font-size="11" fill="${node.textColor}">${node.value.toFixed(3)}</text>` +
        `<text x="${node.x}" y="${node.y + 42}" text-anchor="middle" ` +
        `font-size="11" fill="#333">${escapeXml(node.id)}</text>` +
        (node.badge !== undefined
          ? `<text x="${node.x}" y="${node.y - 32}" text-anchor="middle" ` +
            `font-size="11" font-weight="bold" fill="#06c" data-badge="true">` +
            `${escapeXml(node.badge)}</text>`
          : "") +
        `</g>`,
    );
  }
  parts.push("</svg>");
  return parts.join("");
}

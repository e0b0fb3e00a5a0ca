/**
 * Browser entry point. Wires the typed service client, the pure render and
 * state modules, and the what-if session into a single-page analyst view.
 * All risk numbers on screen come from service responses; this file only
 * moves them between the network and the DOM.
 */

import { ApiClient, ApiError } from "./api.js";
import { causesPanelHtml } from "./causes.js";
import { renderGraph } from "./render.js";
import {
  initialViewState,
  pushAction,
  popAction,
  withPerspective,
  withSelectedNode,
  withThreshold,
  type ViewState,
} from "./state.js";
import { deltaBadges, WhatIfSession } from "./whatif.js";
import { diffRows, mismatchReason, nodeSeries, sparkline } from "./timeline.js";
import type {
  ActionPayload,
  AlertPayload,
  GraphPayload,
  SnapshotPayload,
} from "./types.js";

const MODEL_ID = "workbench";

function byId<T extends HTMLElement>(id: string): T {
  const element = document.getElementById(id);
  if (!element) {
    throw new Error(`missing element #${id}`);
  }
  return element as T;
}

function showError(message: string): void {
  const banner = byId<HTMLDivElement>("error-banner");
  banner.textContent = message;
  banner.hidden = false;
}

function clearError(): void {
  byId<HTMLDivElement>("error-banner").hidden = true;
}

function describe(error: unknown): string {
  if (error instanceof ApiError) {
    return `service rejected the request (${error.status}): ${error.message}`;
  }
  return error instanceof Error ? error.message : String(error);
}

class App {
  private state: ViewState;
  private graph: GraphPayload | null = null;
  private session: WhatIfSession | null = null;
  private alerts: AlertPayload[] = [];
  private version = 0;

  constructor(private readonly client: ApiClient) {
    this.state = {
      perspective: "",
      thresholds: {},
      selectedNode: null,
      actionStack: [],
      snapshotPair: null,
    };
  }

  async loadModel(document8: unknown): Promise<void> {
    const put = await this.client.putModel(MODEL_ID, document8);
    this.version = put.version;
    this.graph = await this.client.getGraph(MODEL_ID);
    const baseline = await this.client.propagate(MODEL_ID, {
      snapshot: true,
      label: "loaded",
    });
    this.session = new WhatIfSession(this.client, MODEL_ID, baseline);
    this.state = initialViewState(this.graph.perspectives);
    this.populatePerspectives();
    await this.refreshAlerts();
    this.draw();
    await this.refreshSnapshots();
  }

  private populatePerspectives(): void {
    const select = byId<HTMLSelectElement>("perspective");
    select.innerHTML = "";
    for (const perspective of this.graph?.perspectives ?? []) {
      const option = document.createElement("option");
      option.value = perspective;
      option.textContent = perspective;
      select.appendChild(option);
    }
    select.value = this.state.perspective;
  }

  setPerspective(perspective: string): void {
    if (!this.graph) {
      return;
    }
    this.state = withPerspective(this.state, perspective, this.graph.perspectives);
    this.draw();
  }

  async setThreshold(raw: string): Promise<void> {
    const trimmed = raw.trim();
    const value = trimmed === "" ? null : Number(trimmed);
    if (value !== null && (!Number.isFinite(value) || value < 0 || value > 1)) {
      showError(`threshold must be a number in [0, 1], got '${raw}'`);
      return;
    }
    this.state = withThreshold(this.state, this.state.perspective, value);
    await this.refreshAlerts();
    this.draw();
  }

  private async refreshAlerts(): Promise<void> {
    if (Object.keys(this.state.thresholds).length === 0) {
      this.alerts = [];
      return;
    }
    try {
      const response = await this.client.assess(MODEL_ID, {
        thresholds: this.state.thresholds,
      });
      this.alerts = response.alerts;
      clearError();
    } catch (error) {
      this.alerts = [];
      showError(describe(error));
    }
  }

  async selectNode(nodeId: string | null): Promise<void> {
    this.state = withSelectedNode(this.state, nodeId);
    const panel = byId<HTMLDivElement>("causes");
    if (!nodeId) {
      panel.innerHTML = "";
      return;
    }
    try {
      const response = await this.client.rootCauses(MODEL_ID, nodeId);
      panel.innerHTML = causesPanelHtml(response);
      clearError();
    } catch (error) {
      showError(describe(error));
    }
  }

  async pushAction(action: ActionPayload): Promise<void> {
    if (!this.session) {
      return;
    }
    try {
      await this.session.push(action);
      this.state = pushAction(this.state, action);
      clearError();
    } catch (error) {
      showError(describe(error));
    }
    this.draw();
  }

  async undoAction(): Promise<void> {
    if (!this.session) {
      return;
    }
    try {
      await this.session.undo();
      this.state = popAction(this.state);
      clearError();
    } catch (error) {
      showError(describe(error));
    }
    this.draw();
  }

  async commitActions(): Promise<void> {
    if (!this.session) {
      return;
    }
    try {
      this.version = await this.session.commit(this.version);
      this.state = { ...this.state, actionStack: [] };
      this.graph = await this.client.getGraph(MODEL_ID);
      await this.refreshAlerts();
      clearError();
      await this.refreshSnapshots();
    } catch (error) {
      showError(describe(error));
    }
    this.draw();
  }

  private draw(): void {
    if (!this.graph || !this.session) {
      return;
    }
    const overlay = this.session.overlay;
    const badges = overlay
      ? deltaBadges(overlay.delta, this.state.perspective)
      : undefined;
    const outcome = renderGraph(this.graph, this.session.effectiveResult, {
      perspective: this.state.perspective,
      alerts: this.alerts,
      ...(badges ? { badges } : {}),
    });
    const host = byId<HTMLDivElement>("graph");
    if (!outcome.ok) {
      host.innerHTML = "";
      showError(outcome.error);
      return;
    }
    host.innerHTML = outcome.svg;
    for (const group of Array.from(host.querySelectorAll("g[data-node]"))) {
      group.addEventListener("click", () => {
        void this.selectNode(group.getAttribute("data-node"));
      });
    }
    byId<HTMLDivElement>("stack").textContent = this.state.actionStack.length
      ? `what-if stack: ${this.state.actionStack
          .map((a) => a.kind + (a.node ? ` ${a.node}` : ""))
          .join(" | ")}`
      : "what-if stack: empty";
  }

  private async refreshSnapshots(): Promise<void> {
    try {
      const listing = await this.client.listSnapshots();
      const payloads: SnapshotPayload[] = [];
      for (const info of listing.snapshots) {
        payloads.push(await this.client.getSnapshot(info.id));
      }
      this.renderTimeline(payloads);
    } catch (error) {
      showError(describe(error));
    }
  }

  private renderTimeline(snapshots: SnapshotPayload[]): void {
    const host = byId<HTMLDivElement>("timeline");
    const reason = mismatchReason(snapshots);
    if (reason !== null) {
      host.innerHTML = `<p>timeline unavailable: ${reason}</p>`;
      return;
    }
    const nodeId = this.state.selectedNode ?? this.graph?.nodes[0]?.id;
    if (!nodeId || snapshots.length === 0) {
      host.innerHTML = "<p>no snapshots yet</p>";
      return;
    }
    const rows = nodeSeries(snapshots, nodeId)
      .map(
        (series) =>
          `<div>${series.perspective}: ` +
          sparkline(series.points.map((p) => p.value)) +
          `</div>`,
      )
      .join("");
    host.innerHTML = `<h3>${nodeId} over time</h3>${rows}`;

    if (snapshots.length >= 2) {
      const [a, b] = [snapshots[0].id, snapshots[snapshots.length - 1].id];
      void this.client.diffSnapshots(a, b).then((delta) => {
        const table = diffRows(delta)
          .map(
            (row) =>
              `<tr><td>${row.node}</td><td>${row.perspective}</td>` +
              `<td>${row.before.toFixed(3)}</td><td>${row.after.toFixed(3)}</td>` +
              `<td>${row.delta.toFixed(3)}</td></tr>`,
          )
          .join("");
        byId<HTMLDivElement>("diff").innerHTML = table
          ? `<table><thead><tr><th>node</th><th>perspective</th><th>before</th>` +
            `<th>after</th><th>delta</th></tr></thead><tbody>${table}</tbody></table>`
          : "<p>snapshots are identical</p>";
      });
    }
  }
}

/**
 * Where the risk service lives. Defaults to the page's own origin; when the
 * page is served statically, point at the service with ?api=http://host:port.
 */
function apiBase(): string {
  return new URLSearchParams(window.location.search).get("api") ?? "";
}

function wire(): void {
  const app = new App(new ApiClient(apiBase()));

  byId<HTMLInputElement>("model-file").addEventListener("change", (event) => {
    const input = event.target as HTMLInputElement;
    const file = input.files?.[0];
    if (!file) {
      return;
    }
    void file.text().then((text) => {
      try {
        const parsed: unknown = JSON.parse(text);
        void app.loadModel(parsed).catch((error) => showError(describe(error)));
      } catch (error) {
        showError(`not valid JSON: ${describe(error)}`);
      }
    });
  });

  byId<HTMLSelectElement>("perspective").addEventListener("change", (event) => {
    app.setPerspective((event.target as HTMLSelectElement).value);
  });

  byId<HTMLInputElement>("threshold").addEventListener("change", (event) => {
    void app.setThreshold((event.target as HTMLInputElement).value);
  });

  byId<HTMLButtonElement>("zero-selected").addEventListener("click", () => {
    const form = byId<HTMLInputElement>("action-node");
    const node = form.value.trim();
    if (node) {
      void app.pushAction({ kind: "zero", node });
    }
  });

  byId<HTMLButtonElement>("undo").addEventListener("click", () => {
    void app.undoAction();
  });

  byId<HTMLButtonElement>("commit").addEventListener("click", () => {
    void app.commitActions();
  });
}

wire();

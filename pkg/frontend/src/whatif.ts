/**
 * What-if session: a stack of candidate mitigation actions evaluated against
 * the live model without mutating it. Every evaluation round-trips through
 * the service — the overlay result and the per-node deltas shown in the UI
 * are taken verbatim from the what-if response, never recomputed locally.
 *
 * Requests are serialized: at most one what-if evaluation is in flight at a
 * time, so a fast second toggle cannot overtake the first and leave the
 * overlay describing a stale stack.
 */

import type { ApiClient } from "./api.js";
import type { ActionPayload, DeltaPayload, ResultPayload, WhatifResponse } from "./types.js";

export class WhatIfSession {
  private actions: ActionPayload[] = [];
  private current: WhatifResponse | null = null;
  private queue: Promise<unknown> = Promise.resolve();

  constructor(
    private readonly client: ApiClient,
    private readonly modelId: string,
    private baselineResult: ResultPayload,
  ) {}

  /** Actions currently applied, oldest first. */
  get stack(): readonly ActionPayload[] {
    return this.actions;
  }

  /** The latest what-if response, or null when the stack is empty. */
  get overlay(): WhatifResponse | null {
    return this.current;
  }

  /** What the graph view should display right now. */
  get effectiveResult(): ResultPayload {
    return this.current ? this.current.result : this.baselineResult;
  }

  get baseline(): ResultPayload {
    return this.baselineResult;
  }

  /**
   * Evaluate the stack plus one more action. On success both the stack and
   * the overlay advance together; on failure neither changes and the error
   * propagates to the caller for inline display.
   */
  push(action: ActionPayload): Promise<WhatifResponse> {
    return this.enqueue(async () => {
      const next = [...this.actions, action];
      const response = await this.client.whatif(this.modelId, next);
      this.actions = next;
      this.current = response;
      return response;
    });
  }

  /**
   * Remove the most recent action. An emptied stack needs no service call:
   * the baseline result is already on hand, so the overlay is simply dropped.
   */
  undo(): Promise<WhatifResponse | null> {
    return this.enqueue(async () => {
      if (this.actions.length === 0) {
        return this.current;
      }
      const rest = this.actions.slice(0, -1);
      if (rest.length === 0) {
        this.actions = rest;
        this.current = null;
        return null;
      }
      const response = await this.client.whatif(this.modelId, rest);
      this.actions = rest;
      this.current = response;
      return response;
    });
  }

  /**
   * Apply the stack to the live model. The overlay result becomes the new
   * baseline and the session starts fresh at the returned version.
   */
  commit(version: number): Promise<number> {
    return this.enqueue(async () => {
      if (this.actions.length === 0) {
        throw new Error("nothing to commit: the action stack is empty");
      }
      const response = await this.client.commit(this.modelId, this.actions, version);
      if (this.current) {
        this.baselineResult = this.current.result;
      }
      this.actions = [];
      this.current = null;
      return response.version;
    });
  }

  private enqueue<T>(job: () => Promise<T>): Promise<T> {
    const run = this.queue.then(job);
    this.queue = run.catch(() => undefined);
    return run;
  }
}

/**
 * Badge text for nodes whose total risk moved, straight from the delta
 * payload: the displayed figure is the service's delta formatted to a fixed
 * precision, with removed nodes marked as such.
 */
export function deltaBadges(
  delta: DeltaPayload,
  perspective: string,
  precision = 3,
): Record<string, string> {
  const k = delta.perspectives.indexOf(perspective);
  const badges: Record<string, string> = {};
  if (k < 0) {
    return badges;
  }
  for (const [node, cells] of Object.entries(delta.changes)) {
    const cell = cells[k];
    if (cell && cell.delta !== 0) {
      badges[node] = `${cell.delta > 0 ? "+" : ""}${cell.delta.toFixed(precision)}`;
    }
  }
  for (const node of Object.keys(delta.before_only)) {
    badges[node] = "removed";
  }
  return badges;
}

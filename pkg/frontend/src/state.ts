/**
 * View state for the analyst UI: which perspective is shown, which thresholds
 * apply, which node is selected, and which snapshots are being compared.
 * Everything here is plain data with pure updaters so state transitions are
 * trivial to test.
 */

import type { ActionPayload } from "./types.js";

export interface ViewState {
  perspective: string;
  thresholds: Record<string, number>;
  selectedNode: string | null;
  actionStack: ActionPayload[];
  snapshotPair: [string, string] | null;
}

export function initialViewState(perspectives: string[]): ViewState {
  if (perspectives.length === 0) {
    throw new Error("cannot build a view without perspectives");
  }
  return {
    perspective: perspectives[0],
    thresholds: {},
    selectedNode: null,
    actionStack: [],
    snapshotPair: null,
  };
}

export function withPerspective(
  state: ViewState,
  perspective: string,
  known: string[],
): ViewState {
  if (!known.includes(perspective)) {
    throw new Error(`unknown perspective '${perspective}'`);
  }
  return { ...state, perspective };
}

export function withThreshold(
  state: ViewState,
  perspective: string,
  value: number | null,
): ViewState {
  const thresholds = { ...state.thresholds };
  if (value === null) {
    delete thresholds[perspective];
  } else {
    thresholds[perspective] = value;
  }
  return { ...state, thresholds };
}

export function withSelectedNode(state: ViewState, node: string | null): ViewState {
  return { ...state, selectedNode: node };
}

export function withSnapshotPair(
  state: ViewState,
  pair: [string, string] | null,
): ViewState {
  return { ...state, snapshotPair: pair };
}

export function pushAction(state: ViewState, action: ActionPayload): ViewState {
  return { ...state, actionStack: [...state.actionStack, action] };
}

export function popAction(state: ViewState): ViewState {
  return { ...state, actionStack: state.actionStack.slice(0, -1) };
}

// Session state: everything the panes render from. The comparison view is
// always the last server snapshot (identified by its hash) plus edits the
// server has acknowledged - the client never invents comparison state.

import type { SlotValues, TaskDescriptor, WorkspaceDoc } from "./types";
import { emptySlotValues } from "./types";

export interface UiSessionState {
    tasks: TaskDescriptor[];
    workspaceId: string | null;
    selectedScenario: string | null;
    values: SlotValues;
    lastPrompt: string | null;
    pastedResponse: string;
    workspace: WorkspaceDoc | null;
    snapshotHash: string | null;
    pendingEdits: number;
    notice: string | null;
    error: string | null;
}

export function initialState(): UiSessionState {
    return {
        tasks: [],
        workspaceId: null,
        selectedScenario: null,
        values: emptySlotValues(),
        lastPrompt: null,
        pastedResponse: "",
        workspace: null,
        snapshotHash: null,
        pendingEdits: 0,
        notice: null,
        error: null,
    };
}

export function applyWorkspace(state: UiSessionState, doc: WorkspaceDoc): void {
    state.workspace = doc;
    state.workspaceId = doc.id;
    state.snapshotHash = doc.snapshot_hash;
    if (!state.values.problem && doc.problem) state.values.problem = doc.problem;
}

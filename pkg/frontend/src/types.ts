// Wire types of the local HTTP service.

export interface SlotSpec {
    name: string;
    required: boolean;
    multiplicity: "one" | "many";
    min_count: number;
}

export interface TaskDescriptor {
    id: string;
    group: string;
    title: string;
    provenance: string;
    slots: SlotSpec[];
}

export interface ContextValue {
    label: string | null;
    body: string;
}

export interface DimensionValue {
    name: string;
    definition: string;
}

/** Field values the user has typed, one bucket per slot name. */
export interface SlotValues {
    problem: string;
    contexts: ContextValue[];
    entities: string[];
    dimensions: DimensionValue[];
    call_objectives: string;
    keywords: string[];
}

export function emptySlotValues(): SlotValues {
    return {
        problem: "",
        contexts: [],
        entities: [],
        dimensions: [],
        call_objectives: "",
        keywords: [],
    };
}

export interface ComparisonDoc {
    problem: string;
    columns: { label: string; source_ref: string | null }[];
    dimensions: { name: string; definition: string; origin: string; needs_curation: boolean }[];
    cells: string[][];
}

export interface WorkspaceDoc {
    id: string;
    problem: string;
    created: string;
    modified: string;
    contexts: { label: string; body: string; source: string | null }[];
    comparison: ComparisonDoc;
    log: unknown[];
    snapshot_hash: string;
}

export interface WorkspaceSummary {
    id: string;
    problem: string;
    modified: string;
    dimensions: number;
    columns: number;
}

export type EditCommand =
    | { kind: "add_dimension"; name: string; definition?: string }
    | { kind: "delete_dimension"; name: string }
    | { kind: "rename_dimension"; name: string; new_name: string }
    | { kind: "set_definition"; name: string; definition: string }
    | { kind: "add_column"; label: string }
    | { kind: "delete_column"; label: string }
    | { kind: "rename_column"; label: string; new_label: string }
    | { kind: "set_cell"; name: string; label: string; value: string };

export type ExportFlavor = "generic" | "definitions" | "orkg";

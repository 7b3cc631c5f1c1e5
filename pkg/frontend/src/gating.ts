// Pure enable/disable rules. The UI never decides business outcomes; it only
// mirrors the slot schemas served by /api/tasks, so a card lights up exactly
// when the server would accept the prompt request.

import type { SlotSpec, SlotValues, TaskDescriptor } from "./types";

function nonblank(s: string | null | undefined): boolean {
    return !!s && s.trim().length > 0;
}

/** Number of usable values currently entered for one slot. */
export function slotCount(name: string, values: SlotValues): number {
    switch (name) {
        case "problem":
            return nonblank(values.problem) ? 1 : 0;
        case "call_objectives":
            return nonblank(values.call_objectives) ? 1 : 0;
        case "contexts":
        case "context_single":
            return values.contexts.filter((c) => nonblank(c.body)).length;
        case "entities":
            return values.entities.filter(nonblank).length;
        case "dimensions":
            return values.dimensions.filter((d) => nonblank(d.name)).length;
        case "keywords":
            return values.keywords.filter(nonblank).length;
        default:
            return 0;
    }
}

export function slotSatisfied(spec: SlotSpec, values: SlotValues): boolean {
    const count = slotCount(spec.name, values);
    if (spec.required) {
        const need = Math.max(spec.min_count, 1);
        if (count < need) return false;
    }
    if (spec.multiplicity === "one" && count > 1) return false;
    return true;
}

/** True iff every required slot has nonempty values with min_count met. */
export function cardEnabled(task: TaskDescriptor, values: SlotValues): boolean {
    return task.slots.every((spec) => slotSatisfied(spec, values));
}

/** The paste-back action needs a workspace and some pasted text. */
export function ingestEnabled(workspaceId: string | null, pastedText: string): boolean {
    return !!workspaceId && nonblank(pastedText);
}

/** Exports make sense once the comparison has at least one dimension. */
export function exportEnabled(dimensionCount: number): boolean {
    return dimensionCount > 0;
}

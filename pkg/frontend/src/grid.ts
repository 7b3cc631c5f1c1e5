// Comparison grid and the dimensions-and-definitions editor underneath it.
// Both panes render from the same server snapshot and report user intent
// through GridActions; deleting a definition row therefore removes the
// matching grid row once the server acknowledges the edit.

import type { ComparisonDoc } from "./types";

export interface GridActions {
    setCell(name: string, label: string, value: string): void;
    renameDimension(name: string, newName: string): void;
    renameColumn(label: string, newLabel: string): void;
    deleteDimension(name: string): void;
    deleteColumn(label: string): void;
    setDefinition(name: string, definition: string): void;
    addDimension(name: string): void;
    addColumn(label: string): void;
}

function el<K extends keyof HTMLElementTagNameMap>(
    tag: K,
    attrs: Record<string, string> = {},
    text?: string,
): HTMLElementTagNameMap[K] {
    const node = document.createElement(tag);
    for (const [key, value] of Object.entries(attrs)) node.setAttribute(key, value);
    if (text !== undefined) node.textContent = text;
    return node;
}

function textInput(value: string, onCommit: (next: string) => void, attrs: Record<string, string> = {}) {
    const input = el("input", { type: "text", ...attrs }) as HTMLInputElement;
    input.value = value;
    input.addEventListener("change", () => {
        if (input.value !== value) onCommit(input.value);
    });
    return input;
}

export function renderComparisonGrid(
    host: HTMLElement,
    comparison: ComparisonDoc,
    actions: GridActions,
): void {
    host.textContent = "";
    if (comparison.dimensions.length === 0 && comparison.columns.length === 0) {
        host.appendChild(el("p", { class: "hint" }, "No comparison yet - ingest a response first."));
        return;
    }
    const table = el("table", { class: "grid", "data-role": "comparison-grid" });
    const head = el("tr");
    head.appendChild(el("th", {}, "Dimension"));
    for (const column of comparison.columns) {
        const th = el("th", { "data-column": column.label });
        th.appendChild(
            textInput(column.label, (next) => actions.renameColumn(column.label, next), {
                "data-role": "column-name",
            }),
        );
        const drop = el("button", { "data-role": "delete-column", title: "delete column" }, "×");
        drop.addEventListener("click", () => actions.deleteColumn(column.label));
        th.appendChild(drop);
        head.appendChild(th);
    }
    head.appendChild(el("th"));
    table.appendChild(head);

    comparison.dimensions.forEach((dimension, i) => {
        const row = el("tr", { "data-dimension": dimension.name });
        if (dimension.needs_curation) row.classList.add("needs-curation");
        const nameCell = el("td", { class: "dim-name" });
        nameCell.appendChild(
            textInput(dimension.name, (next) => actions.renameDimension(dimension.name, next), {
                "data-role": "dimension-name",
            }),
        );
        row.appendChild(nameCell);
        comparison.columns.forEach((column, j) => {
            const cell = el("td");
            cell.appendChild(
                textInput(comparison.cells[i][j], (next) =>
                    actions.setCell(dimension.name, column.label, next), {
                    "data-role": "cell",
                    "data-column": column.label,
                }),
            );
            row.appendChild(cell);
        });
        const dropCell = el("td");
        const drop = el("button", { "data-role": "delete-dimension", title: "delete dimension" }, "×");
        drop.addEventListener("click", () => actions.deleteDimension(dimension.name));
        dropCell.appendChild(drop);
        row.appendChild(dropCell);
        table.appendChild(row);
    });
    host.appendChild(table);

    const adders = el("div", { class: "adders" });
    const dimInput = el("input", { type: "text", placeholder: "new dimension", "data-role": "new-dimension" }) as HTMLInputElement;
    const dimButton = el("button", { "data-role": "add-dimension" }, "add dimension");
    dimButton.addEventListener("click", () => {
        if (dimInput.value.trim()) actions.addDimension(dimInput.value.trim());
    });
    const colInput = el("input", { type: "text", placeholder: "new column", "data-role": "new-column" }) as HTMLInputElement;
    const colButton = el("button", { "data-role": "add-column" }, "add column");
    colButton.addEventListener("click", () => {
        if (colInput.value.trim()) actions.addColumn(colInput.value.trim());
    });
    adders.append(dimInput, dimButton, colInput, colButton);
    host.appendChild(adders);
}

export function renderDefinitionsPane(
    host: HTMLElement,
    comparison: ComparisonDoc,
    actions: GridActions,
): void {
    host.textContent = "";
    host.appendChild(el("h3", {}, "Dimensions and definitions"));
    if (comparison.dimensions.length === 0) {
        host.appendChild(el("p", { class: "hint" }, "No dimensions yet."));
        return;
    }
    const table = el("table", { class: "defs", "data-role": "definitions-pane" });
    const head = el("tr");
    head.append(el("th", {}, "Dimension"), el("th", {}, "Definition"), el("th"));
    table.appendChild(head);
    for (const dimension of comparison.dimensions) {
        const row = el("tr", { "data-dimension": dimension.name });
        const nameCell = el("td");
        nameCell.appendChild(
            textInput(dimension.name, (next) => actions.renameDimension(dimension.name, next), {
                "data-role": "definition-dimension-name",
            }),
        );
        const defCell = el("td");
        defCell.appendChild(
            textInput(dimension.definition, (next) => actions.setDefinition(dimension.name, next), {
                "data-role": "definition-text",
            }),
        );
        const dropCell = el("td");
        const drop = el(
            "button",
            { "data-role": "delete-definition", title: "delete dimension" },
            "×",
        );
        drop.addEventListener("click", () => actions.deleteDimension(dimension.name));
        dropCell.appendChild(drop);
        row.append(nameCell, defCell, dropCell);
        table.appendChild(row);
    }
    host.appendChild(table);
}

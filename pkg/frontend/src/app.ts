// Application shell: two panes. Left, the scenario cards with their input
// fields, the generated prompt (with copy), and the paste-back area. Right,
// the comparison grid above the dimensions-and-definitions editor, plus the
// CSV download buttons. Every mutation is an /edits (or /ingest) round trip;
// the panes re-render from whatever snapshot the server returns.

import { ApiClient, ApiError } from "./api";
import { copyText } from "./clipboard";
import { cardEnabled, exportEnabled, ingestEnabled } from "./gating";
import { GridActions, renderComparisonGrid, renderDefinitionsPane } from "./grid";
import { applyWorkspace, initialState, UiSessionState } from "./state";
import type { EditCommand, ExportFlavor, TaskDescriptor } from "./types";

export class RaApp {
    state: UiSessionState = initialState();
    private mutex: Promise<void> = Promise.resolve();
    private inflight = 0;
    private idleWaiters: (() => void)[] = [];

    constructor(
        public root: HTMLElement,
        public api: ApiClient = new ApiClient(),
    ) {}

    // --- lifecycle ---

    async init(): Promise<void> {
        await this.track(async () => {
            this.state.tasks = await this.api.tasks();
        });
        this.render();
    }

    /** Resolves once no request is in flight and the re-render has run
     *  (settles on a macrotask so pending continuations finish first). */
    whenIdle(): Promise<void> {
        return new Promise((resolve) => {
            const settle = () => setTimeout(resolve, 0);
            if (this.inflight === 0) settle();
            else this.idleWaiters.push(settle);
        });
    }

    private acquire(): void {
        this.inflight += 1;
    }

    private release(): void {
        this.inflight -= 1;
        if (this.inflight === 0) {
            const waiters = this.idleWaiters.splice(0);
            for (const resolve of waiters) resolve();
        }
    }

    private async track<T>(work: () => Promise<T>): Promise<T | undefined> {
        this.acquire();
        try {
            this.state.error = null;
            return await work();
        } catch (error) {
            if (error instanceof ApiError) {
                this.state.error = error.pointer
                    ? `${error.message} (field: ${error.pointer})`
                    : error.message;
            } else {
                this.state.error = String(error);
            }
            return undefined;
        } finally {
            this.release();
        }
    }

    // --- workspace actions ---

    async createWorkspace(id: string, problem: string): Promise<void> {
        await this.track(async () => {
            const doc = await this.api.createWorkspace(id, problem);
            applyWorkspace(this.state, doc);
        });
        this.render();
    }

    async openWorkspace(id: string): Promise<void> {
        await this.track(async () => {
            const doc = await this.api.workspace(id);
            applyWorkspace(this.state, doc);
        });
        this.render();
    }

    selectScenario(id: string): void {
        this.state.selectedScenario = id;
        this.state.lastPrompt = null;
        this.render();
    }

    scenario(): TaskDescriptor | null {
        return this.state.tasks.find((t) => t.id === this.state.selectedScenario) ?? null;
    }

    async generatePrompt(): Promise<void> {
        const scenario = this.scenario();
        if (!scenario || !this.state.workspaceId) return;
        if (!cardEnabled(scenario, this.state.values)) return;
        await this.track(async () => {
            const result = await this.api.prompt(
                this.state.workspaceId!,
                scenario.id,
                this.state.values,
            );
            this.state.lastPrompt = result.prompt;
        });
        this.render();
    }

    async ingest(strategy: "replace" | "extend" = "replace"): Promise<void> {
        if (!ingestEnabled(this.state.workspaceId, this.state.pastedResponse)) return;
        await this.track(async () => {
            const result = await this.api.ingest(
                this.state.workspaceId!,
                this.state.pastedResponse,
                strategy,
            );
            applyWorkspace(this.state, result.workspace);
            this.state.notice = result.warnings.length
                ? `ingested with ${result.warnings.length} warning(s): ${result.warnings.join("; ")}`
                : "response ingested";
            this.state.pastedResponse = "";
        });
        this.render();
    }

    /**
     * One mutation in flight at a time; each batch carries the hash of the
     * snapshot it was built against. A 409 means another tab moved the
     * comparison: reload and ask the user to replay.
     */
    submitEdit(command: EditCommand): Promise<void> {
        this.acquire(); // reserve before queueing so whenIdle sees the pending edit
        const run = this.mutex.then(async () => {
            try {
                if (!this.state.workspaceId) return;
                await this.track(async () => {
                    try {
                        const result = await this.api.edits(
                            this.state.workspaceId!,
                            [command],
                            this.state.snapshotHash ?? undefined,
                        );
                        applyWorkspace(this.state, result.workspace);
                    } catch (error) {
                        if (error instanceof ApiError && error.status === 409) {
                            const doc = await this.api.workspace(this.state.workspaceId!);
                            applyWorkspace(this.state, doc);
                            this.state.notice =
                                "comparison changed in another tab; reloaded - please replay your edit";
                            return;
                        }
                        throw error;
                    }
                });
                this.render();
            } finally {
                this.release();
            }
        });
        this.mutex = run;
        return run;
    }

    async fetchExport(flavor: ExportFlavor): Promise<Uint8Array | undefined> {
        if (!this.state.workspaceId) return undefined;
        return await this.track(() => this.api.exportBytes(this.state.workspaceId!, flavor));
    }

    async downloadCsv(flavor: ExportFlavor): Promise<void> {
        const bytes = await this.fetchExport(flavor);
        if (!bytes || !this.state.workspaceId) return;
        try {
            const url = URL.createObjectURL(new Blob([bytes.buffer as ArrayBuffer], { type: "text/csv" }));
            const anchor = document.createElement("a");
            anchor.href = url;
            anchor.download = this.api.exportFilename(this.state.workspaceId, flavor);
            anchor.click();
            URL.revokeObjectURL(url);
        } catch {
            this.state.error = "download not supported in this browser";
            this.render();
        }
    }

    // --- rendering ---

    render(): void {
        const root = this.root;
        root.textContent = "";
        root.appendChild(this.renderHeader());
        const panes = document.createElement("div");
        panes.className = "panes";
        panes.appendChild(this.renderLeftPane());
        panes.appendChild(this.renderRightPane());
        root.appendChild(panes);
    }

    private renderHeader(): HTMLElement {
        const header = document.createElement("header");
        const title = document.createElement("h1");
        title.textContent = "ra-forge";
        header.appendChild(title);
        if (this.state.notice) {
            const notice = document.createElement("div");
            notice.className = "notice";
            notice.dataset.role = "notice";
            notice.textContent = this.state.notice;
            header.appendChild(notice);
        }
        if (this.state.error) {
            const error = document.createElement("div");
            error.className = "error";
            error.dataset.role = "error";
            error.textContent = this.state.error;
            header.appendChild(error);
        }
        return header;
    }

    private renderLeftPane(): HTMLElement {
        const pane = document.createElement("section");
        pane.className = "pane left";
        pane.appendChild(this.renderWorkspaceBox());
        pane.appendChild(this.renderCards());
        if (this.state.selectedScenario) pane.appendChild(this.renderInputs());
        if (this.state.lastPrompt) pane.appendChild(this.renderPromptBox());
        pane.appendChild(this.renderGenerateData());
        return pane;
    }

    private renderWorkspaceBox(): HTMLElement {
        const box = document.createElement("div");
        box.className = "workspace-box";
        const label = document.createElement("strong");
        label.textContent = this.state.workspaceId
            ? `workspace: ${this.state.workspaceId}`
            : "no workspace open";
        box.appendChild(label);
        const idInput = document.createElement("input");
        idInput.placeholder = "workspace id";
        idInput.dataset.role = "workspace-id";
        const problemInput = document.createElement("input");
        problemInput.placeholder = "research problem";
        problemInput.dataset.role = "workspace-problem";
        const create = document.createElement("button");
        create.textContent = "create";
        create.dataset.role = "create-workspace";
        create.addEventListener("click", () => {
            void this.createWorkspace(idInput.value.trim(), problemInput.value);
        });
        const open = document.createElement("button");
        open.textContent = "open";
        open.dataset.role = "open-workspace";
        open.addEventListener("click", () => {
            void this.openWorkspace(idInput.value.trim());
        });
        box.append(idInput, problemInput, create, open);
        return box;
    }

    private renderCards(): HTMLElement {
        const list = document.createElement("div");
        list.className = "cards";
        for (const task of this.state.tasks) {
            const card = document.createElement("button");
            card.className = "card";
            card.dataset.scenario = task.id;
            card.dataset.enabled = String(cardEnabled(task, this.state.values));
            if (task.id === this.state.selectedScenario) card.classList.add("selected");
            card.textContent = `${task.group} - ${task.title}`;
            card.addEventListener("click", () => this.selectScenario(task.id));
            list.appendChild(card);
        }
        return list;
    }

    private renderInputs(): HTMLElement {
        const scenario = this.scenario()!;
        const box = document.createElement("div");
        box.className = "inputs";
        const heading = document.createElement("h3");
        heading.textContent = scenario.title;
        box.appendChild(heading);
        for (const spec of scenario.slots) {
            box.appendChild(this.renderSlotField(spec.name, spec.required));
        }
        const generate = document.createElement("button");
        generate.textContent = "Generate Prompt";
        generate.dataset.role = "generate-prompt";
        generate.disabled =
            !this.state.workspaceId || !cardEnabled(scenario, this.state.values);
        generate.addEventListener("click", () => void this.generatePrompt());
        box.appendChild(generate);
        return box;
    }

    private renderSlotField(name: string, required: boolean): HTMLElement {
        const wrap = document.createElement("label");
        wrap.className = "slot";
        const caption = document.createElement("span");
        caption.textContent = required ? `${name} *` : name;
        wrap.appendChild(caption);
        const values = this.state.values;
        const area = document.createElement("textarea");
        area.dataset.slot = name;
        area.rows = name === "problem" || name === "keywords" || name === "entities" ? 2 : 5;
        switch (name) {
            case "problem":
                area.value = values.problem;
                area.addEventListener("input", () => {
                    values.problem = area.value;
                    this.refreshGating();
                });
                break;
            case "call_objectives":
                area.value = values.call_objectives;
                area.addEventListener("input", () => {
                    values.call_objectives = area.value;
                    this.refreshGating();
                });
                break;
            case "contexts":
            case "context_single":
                area.placeholder = "one context per blank-line-separated block";
                area.value = values.contexts.map((c) => c.body).join("\n\n");
                area.addEventListener("input", () => {
                    values.contexts = area.value
                        .split(/\n\s*\n/)
                        .filter((block) => block.trim())
                        .map((block) => ({ label: null, body: block.trim() }));
                    this.refreshGating();
                });
                break;
            case "entities":
            case "keywords":
                area.placeholder = "comma-separated";
                area.value = (name === "entities" ? values.entities : values.keywords).join(", ");
                area.addEventListener("input", () => {
                    const items = area.value.split(",").map((s) => s.trim()).filter(Boolean);
                    if (name === "entities") values.entities = items;
                    else values.keywords = items;
                    this.refreshGating();
                });
                break;
            case "dimensions":
                area.placeholder = "name: definition (one per line)";
                area.value = values.dimensions
                    .map((d) => (d.definition ? `${d.name}: ${d.definition}` : d.name))
                    .join("\n");
                area.addEventListener("input", () => {
                    values.dimensions = area.value
                        .split("\n")
                        .map((line) => line.trim())
                        .filter(Boolean)
                        .map((line) => {
                            const colon = line.indexOf(":");
                            if (colon < 0) return { name: line, definition: "" };
                            return {
                                name: line.slice(0, colon).trim(),
                                definition: line.slice(colon + 1).trim(),
                            };
                        });
                    this.refreshGating();
                });
                break;
        }
        wrap.appendChild(area);
        return wrap;
    }

    /** Re-evaluate card/button enablement without rebuilding the inputs
     *  (rebuilding would steal focus from the field being typed in). */
    private refreshGating(): void {
        for (const card of this.root.querySelectorAll<HTMLElement>(".card")) {
            const task = this.state.tasks.find((t) => t.id === card.dataset.scenario);
            if (task) card.dataset.enabled = String(cardEnabled(task, this.state.values));
        }
        const generate = this.root.querySelector<HTMLButtonElement>(
            'button[data-role="generate-prompt"]',
        );
        const scenario = this.scenario();
        if (generate && scenario) {
            generate.disabled =
                !this.state.workspaceId || !cardEnabled(scenario, this.state.values);
        }
        const ingestButton = this.root.querySelector<HTMLButtonElement>(
            'button[data-role="ingest"]',
        );
        if (ingestButton) {
            ingestButton.disabled = !ingestEnabled(
                this.state.workspaceId,
                this.state.pastedResponse,
            );
        }
    }

    private renderPromptBox(): HTMLElement {
        const box = document.createElement("div");
        box.className = "prompt-box";
        const heading = document.createElement("h3");
        heading.textContent = "Generated prompt";
        const pre = document.createElement("pre");
        pre.dataset.role = "prompt-text";
        pre.textContent = this.state.lastPrompt ?? "";
        const copy = document.createElement("button");
        copy.textContent = "Copy to clipboard";
        copy.dataset.role = "copy-prompt";
        copy.addEventListener("click", () => {
            void copyText(this.state.lastPrompt ?? "", box);
        });
        box.append(heading, pre, copy);
        return box;
    }

    private renderGenerateData(): HTMLElement {
        const box = document.createElement("div");
        box.className = "generate-data";
        const heading = document.createElement("h3");
        heading.textContent = "Generate Data";
        const area = document.createElement("textarea");
        area.rows = 8;
        area.placeholder = "paste the chat agent's response here";
        area.dataset.role = "paste-response";
        area.value = this.state.pastedResponse;
        area.addEventListener("input", () => {
            this.state.pastedResponse = area.value;
            this.refreshGating();
        });
        const replace = document.createElement("button");
        replace.textContent = "Generate Data";
        replace.dataset.role = "ingest";
        replace.disabled = !ingestEnabled(this.state.workspaceId, this.state.pastedResponse);
        replace.addEventListener("click", () => void this.ingest("replace"));
        const extend = document.createElement("button");
        extend.textContent = "Extend comparison";
        extend.dataset.role = "ingest-extend";
        extend.addEventListener("click", () => void this.ingest("extend"));
        box.append(heading, area, replace, extend);
        return box;
    }

    private renderRightPane(): HTMLElement {
        const pane = document.createElement("section");
        pane.className = "pane right";
        const comparison = this.state.workspace?.comparison;
        const actions: GridActions = {
            setCell: (name, label, value) =>
                void this.submitEdit({ kind: "set_cell", name, label, value }),
            renameDimension: (name, newName) =>
                void this.submitEdit({ kind: "rename_dimension", name, new_name: newName }),
            renameColumn: (label, newLabel) =>
                void this.submitEdit({ kind: "rename_column", label, new_label: newLabel }),
            deleteDimension: (name) =>
                void this.submitEdit({ kind: "delete_dimension", name }),
            deleteColumn: (label) => void this.submitEdit({ kind: "delete_column", label }),
            setDefinition: (name, definition) =>
                void this.submitEdit({ kind: "set_definition", name, definition }),
            addDimension: (name) => void this.submitEdit({ kind: "add_dimension", name }),
            addColumn: (label) => void this.submitEdit({ kind: "add_column", label }),
        };
        const gridHost = document.createElement("div");
        gridHost.dataset.role = "grid-host";
        const defsHost = document.createElement("div");
        defsHost.dataset.role = "definitions-host";
        if (comparison) {
            renderComparisonGrid(gridHost, comparison, actions);
            renderDefinitionsPane(defsHost, comparison, actions);
        } else {
            gridHost.innerHTML = '<p class="hint">Open a workspace to see its comparison.</p>';
        }
        pane.appendChild(gridHost);
        pane.appendChild(defsHost);
        pane.appendChild(this.renderExports());
        return pane;
    }

    private renderExports(): HTMLElement {
        const box = document.createElement("div");
        box.className = "exports";
        const enabled = exportEnabled(this.state.workspace?.comparison.dimensions.length ?? 0);
        for (const flavor of ["generic", "definitions", "orkg"] as ExportFlavor[]) {
            const button = document.createElement("button");
            button.textContent = `Export ${flavor} CSV`;
            button.dataset.role = `export-${flavor}`;
            button.disabled = !enabled;
            button.addEventListener("click", () => void this.downloadCsv(flavor));
            box.appendChild(button);
        }
        return box;
    }
}

export function mount(root: HTMLElement, baseUrl = ""): RaApp {
    const app = new RaApp(root, new ApiClient(baseUrl));
    void app.init();
    return app;
}

declare global {
    interface Window {
        raApp?: RaApp;
    }
}

if (typeof document !== "undefined") {
    const host = document.getElementById("app");
    if (host) window.raApp = mount(host);
}

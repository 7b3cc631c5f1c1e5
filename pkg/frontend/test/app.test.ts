// Full UI flow against the real backend in a headless DOM: workspace
// creation, prompt generation, paste-back ingest, grid/definitions editing
// with pane sync, conflict handling, and export parity with the raw API.

import { readFileSync } from "node:fs";
import { fileURLToPath } from "node:url";
import { dirname, join } from "node:path";

import { afterAll, beforeAll, describe, expect, it } from "vitest";

import { RaApp } from "../src/app";
import { ApiClient } from "../src/api";
import { startServer, TestServer } from "./server";

const here = dirname(fileURLToPath(import.meta.url));
const GPT_RESPONSE = readFileSync(
    join(here, "..", "..", "tests", "fixtures", "responses", "gpt_fixture.md"),
    "utf-8",
);
const GPT_PROBLEM = "GPT family of large language models";

let server: TestServer;
let api: ApiClient;

beforeAll(async () => {
    server = await startServer();
    api = new ApiClient(server.baseUrl);
});

afterAll(async () => {
    await server.stop();
});

function mountApp(): RaApp {
    const host = document.createElement("div");
    document.body.appendChild(host);
    return new RaApp(host, new ApiClient(server.baseUrl));
}

function type(element: HTMLTextAreaElement | HTMLInputElement, value: string): void {
    element.value = value;
    element.dispatchEvent(new Event("input", { bubbles: true }));
}

function commit(element: HTMLInputElement, value: string): void {
    element.value = value;
    element.dispatchEvent(new Event("change", { bubbles: true }));
}

function q<T extends HTMLElement>(app: RaApp, selector: string): T {
    const node = app.root.querySelector<T>(selector);
    if (!node) throw new Error(`no element matches ${selector}`);
    return node;
}

async function appWithIngestedFixture(wsId: string): Promise<RaApp> {
    const app = mountApp();
    await app.init();
    await app.createWorkspace(wsId, GPT_PROBLEM);
    type(q(app, '[data-role="paste-response"]'), GPT_RESPONSE);
    q<HTMLButtonElement>(app, 'button[data-role="ingest"]').click();
    await app.whenIdle();
    return app;
}

describe("workbench flow", () => {
    it("walks prompt -> paste-back -> grid", async () => {
        const app = mountApp();
        await app.init();
        expect(app.state.tasks).toHaveLength(11);
        expect(app.root.querySelectorAll(".card")).toHaveLength(11);

        await app.createWorkspace("flow-ws", GPT_PROBLEM);
        expect(app.state.workspaceId).toBe("flow-ws");

        app.selectScenario("compare-contexts");
        // problem was adopted from the workspace; card still needs contexts
        const card = q(app, '[data-scenario="compare-contexts"]');
        expect(card.dataset.enabled).toBe("false");
        const generate = q<HTMLButtonElement>(app, 'button[data-role="generate-prompt"]');
        expect(generate.disabled).toBe(true);

        type(q(app, 'textarea[data-slot="contexts"]'),
            "GPT-1 uses a 12-layer transformer.\n\nGPT-2 scales to 1.5B parameters.");
        expect(card.dataset.enabled).toBe("true");
        expect(generate.disabled).toBe(false);

        generate.click();
        await app.whenIdle();
        const prompt = q(app, '[data-role="prompt-text"]').textContent ?? "";
        expect(prompt.startsWith("Generate a research-dimension-and-value-based")).toBe(true);
        expect(prompt).toContain("GPT-1 uses a 12-layer transformer.");

        type(q(app, '[data-role="paste-response"]'), GPT_RESPONSE);
        q<HTMLButtonElement>(app, 'button[data-role="ingest"]').click();
        await app.whenIdle();

        const grid = q(app, '[data-role="comparison-grid"]');
        expect(grid.querySelectorAll("tr[data-dimension]")).toHaveLength(7);
        const defs = q(app, '[data-role="definitions-pane"]');
        expect(defs.querySelectorAll("tr[data-dimension]")).toHaveLength(7);
    });

    it("deleting a definition row removes the grid row too", async () => {
        const app = await appWithIngestedFixture("sync-ws");
        const defsRow = q(app, '[data-role="definitions-pane"] tr[data-dimension="optimizer"]');
        defsRow.querySelector<HTMLButtonElement>('button[data-role="delete-definition"]')!.click();
        await app.whenIdle();

        expect(
            app.root.querySelector('[data-role="comparison-grid"] tr[data-dimension="optimizer"]'),
        ).toBeNull();
        expect(
            app.root.querySelector('[data-role="definitions-pane"] tr[data-dimension="optimizer"]'),
        ).toBeNull();
        expect(app.state.workspace!.comparison.dimensions).toHaveLength(6);
    });

    it("grid edits and raw API edits produce identical snapshot hashes", async () => {
        const app = await appWithIngestedFixture("parity-ui");
        await api.createWorkspace("parity-api", GPT_PROBLEM);
        await api.ingest("parity-api", GPT_RESPONSE, "replace");

        // UI: delete a dimension and edit a cell through the grid
        q(app, '[data-role="comparison-grid"] tr[data-dimension="optimizer"]')
            .querySelector<HTMLButtonElement>('button[data-role="delete-dimension"]')!
            .click();
        await app.whenIdle();
        const cell = q<HTMLInputElement>(
            app,
            '[data-role="comparison-grid"] tr[data-dimension="parameters"] input[data-role="cell"][data-column="GPT-1"]',
        );
        commit(cell, "117 million");
        await app.whenIdle();

        // raw API: the same two edits
        const result = await api.edits("parity-api", [
            { kind: "delete_dimension", name: "optimizer" },
            { kind: "set_cell", name: "parameters", label: "GPT-1", value: "117 million" },
        ]);

        expect(app.state.snapshotHash).toBe(result.workspace.snapshot_hash);
    });

    it("export buttons use the same bytes as the API", async () => {
        const app = await appWithIngestedFixture("export-ws");
        const viaApp = await app.fetchExport("generic");
        const direct = new Uint8Array(
            await (await fetch(`${server.baseUrl}/api/workspaces/export-ws/export?flavor=generic`)).arrayBuffer(),
        );
        expect(viaApp).toBeDefined();
        expect(Buffer.from(viaApp!)).toEqual(Buffer.from(direct));
        expect(direct[direct.length - 1]).toBe(0x0a); // trailing newline
        const text = Buffer.from(direct).toString("utf-8");
        expect(text.startsWith("Dimension,GPT-1,GPT-2,GPT-3\n")).toBe(true);
    });

    it("export buttons stay disabled until a comparison exists", async () => {
        const app = mountApp();
        await app.init();
        await app.createWorkspace("empty-ws", "p");
        expect(q<HTMLButtonElement>(app, 'button[data-role="export-generic"]').disabled).toBe(true);
        const full = await appWithIngestedFixture("full-ws");
        expect(q<HTMLButtonElement>(full, 'button[data-role="export-generic"]').disabled).toBe(false);
    });

    it("a stale snapshot triggers reload and a replay notice", async () => {
        const app = await appWithIngestedFixture("conflict-ws");
        // another tab moves the comparison: the app's hash is now stale
        await api.edits("conflict-ws", [{ kind: "delete_dimension", name: "optimizer" }]);

        q(app, '[data-role="comparison-grid"] tr[data-dimension="parameters"]')
            .querySelector<HTMLButtonElement>('button[data-role="delete-dimension"]')!
            .click();
        await app.whenIdle();

        const notice = q(app, '[data-role="notice"]').textContent ?? "";
        expect(notice).toContain("another tab");
        // reloaded server state: optimizer gone (other tab), parameters still present
        const names = app.state.workspace!.comparison.dimensions.map((d) => d.name);
        expect(names).toContain("parameters");
        expect(names).not.toContain("optimizer");
    });

    it("a rejected edit shows an inline error and changes nothing", async () => {
        const app = await appWithIngestedFixture("invalid-ws");
        const before = app.state.snapshotHash;
        const nameInput = q<HTMLInputElement>(
            app,
            '[data-role="definitions-pane"] tr[data-dimension="optimizer"] input[data-role="definition-dimension-name"]',
        );
        commit(nameInput, "Model Size"); // collides with an existing dimension
        await app.whenIdle();

        const error = q(app, '[data-role="error"]').textContent ?? "";
        expect(error.toLowerCase()).toContain("key");
        expect(app.state.snapshotHash).toBe(before);
        expect(
            app.root.querySelector('[data-role="comparison-grid"] tr[data-dimension="optimizer"]'),
        ).not.toBeNull();
    });

    it("clipboard copy falls back to a visible text area", async () => {
        // force the no-permission path: jsdom may or may not stub the API
        Object.defineProperty(navigator, "clipboard", { value: undefined, configurable: true });
        const app = await appWithIngestedFixture("copy-ws");
        app.selectScenario("dimensions-for-problem");
        q<HTMLButtonElement>(app, 'button[data-role="generate-prompt"]').click();
        await app.whenIdle();

        q<HTMLButtonElement>(app, 'button[data-role="copy-prompt"]').click();
        await new Promise((resolve) => setTimeout(resolve, 0));
        const fallback = app.root.querySelector<HTMLTextAreaElement>("textarea.copy-fallback");
        expect(fallback).not.toBeNull();
        expect(fallback!.value).toContain("research dimensions");
    });
});

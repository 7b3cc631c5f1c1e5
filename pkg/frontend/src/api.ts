// Thin typed client over the local JSON service. Every mutation flows
// through these calls; the UI holds no business logic of its own.

import type {
    EditCommand,
    ExportFlavor,
    SlotValues,
    TaskDescriptor,
    WorkspaceDoc,
    WorkspaceSummary,
} from "./types";

export class ApiError extends Error {
    constructor(
        public status: number,
        public code: string,
        message: string,
        public pointer?: string,
    ) {
        super(message);
    }
}

async function asApiError(response: Response): Promise<ApiError> {
    let code = "error";
    let message = `${response.status} ${response.statusText}`;
    let pointer: string | undefined;
    try {
        const body = await response.json();
        if (body && body.error) {
            code = body.error.code ?? code;
            message = body.error.message ?? message;
            pointer = body.error.pointer;
        }
    } catch {
        // non-JSON error body; keep the status text
    }
    return new ApiError(response.status, code, message, pointer);
}

export class ApiClient {
    constructor(public baseUrl: string = "") {}

    private async request<T>(method: string, path: string, body?: unknown): Promise<T> {
        const response = await fetch(this.baseUrl + path, {
            method,
            headers: body === undefined ? {} : { "Content-Type": "application/json" },
            body: body === undefined ? undefined : JSON.stringify(body),
        });
        if (!response.ok) throw await asApiError(response);
        return (await response.json()) as T;
    }

    tasks(): Promise<TaskDescriptor[]> {
        return this.request("GET", "/api/tasks");
    }

    listWorkspaces(): Promise<WorkspaceSummary[]> {
        return this.request("GET", "/api/workspaces");
    }

    createWorkspace(id: string, problem: string): Promise<WorkspaceDoc> {
        return this.request("POST", "/api/workspaces", { id, problem });
    }

    workspace(id: string): Promise<WorkspaceDoc> {
        return this.request("GET", `/api/workspaces/${id}`);
    }

    prompt(wsId: string, scenario: string, values: SlotValues): Promise<{ prompt: string }> {
        return this.request("POST", `/api/workspaces/${wsId}/prompt`, {
            scenario,
            inputs: {
                problem: values.problem.trim() || null,
                contexts: values.contexts
                    .filter((c) => c.body.trim())
                    .map((c) => ({ label: c.label, body: c.body.trim() })),
                entities: values.entities.filter((e) => e.trim()),
                dimensions: values.dimensions
                    .filter((d) => d.name.trim())
                    .map((d) => ({ name: d.name.trim(), definition: d.definition })),
                call_objectives: values.call_objectives.trim() || null,
                keywords: values.keywords.filter((k) => k.trim()),
            },
        });
    }

    ingest(
        wsId: string,
        text: string,
        strategy: "replace" | "extend",
    ): Promise<{ warnings: string[]; workspace: WorkspaceDoc }> {
        return this.request("POST", `/api/workspaces/${wsId}/ingest`, { text, strategy });
    }

    edits(
        wsId: string,
        commands: EditCommand[],
        baseHash?: string,
    ): Promise<{ applied: number; workspace: WorkspaceDoc }> {
        const body: Record<string, unknown> = { edits: commands };
        if (baseHash) body.base_hash = baseHash;
        return this.request("POST", `/api/workspaces/${wsId}/edits`, body);
    }

    async exportBytes(wsId: string, flavor: ExportFlavor): Promise<Uint8Array> {
        const response = await fetch(
            `${this.baseUrl}/api/workspaces/${wsId}/export?flavor=${flavor}`,
        );
        if (!response.ok) throw await asApiError(response);
        return new Uint8Array(await response.arrayBuffer());
    }

    exportFilename(wsId: string, flavor: ExportFlavor): string {
        const suffix = flavor === "generic" ? "comparison" : flavor === "orkg" ? "orkg-import" : flavor;
        return `${wsId}-${suffix}.csv`;
    }
}

// Clipboard copy with a visible fallback: when the permission flow is
// unavailable (or denied) the prompt is shown selected in a textarea so the
// user can copy it by hand.

export async function copyText(text: string, fallbackHost: HTMLElement): Promise<boolean> {
    if (typeof navigator !== "undefined" && navigator.clipboard) {
        try {
            await navigator.clipboard.writeText(text);
            return true;
        } catch {
            // fall through to the visible textarea
        }
    }
    showFallback(text, fallbackHost);
    return false;
}

function showFallback(text: string, host: HTMLElement): void {
    let area = host.querySelector<HTMLTextAreaElement>("textarea.copy-fallback");
    if (!area) {
        area = document.createElement("textarea");
        area.className = "copy-fallback";
        area.rows = 6;
        area.readOnly = true;
        host.appendChild(area);
    }
    area.value = text;
    area.focus();
    area.select();
}

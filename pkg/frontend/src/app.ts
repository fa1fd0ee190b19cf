/**
 * Page orchestrator.
 *
 * The screen is a pure function of the last server view plus whatever
 * sits in the input box; every mutation round-trips through the service
 * and the response replaces the view wholesale. At most one mutating
 * request is in flight, and all inputs are disabled while it runs, so
 * the server never sees interleaved edits from one page.
 */

import { ApiError, Client } from './api.js';
import { ChartCanvas } from './chart.js';
import { clear, el } from './dom.js';
import { RecommendationPanel } from './recommendations.js';
import { ShelfPanel, encodingsFromChart } from './shelves.js';
import type {
    DatasetProfile,
    EncodingsRequest,
    Recommendation,
    View,
} from './types.js';

export interface AppElements {
    attributes: HTMLElement;
    shelves: HTMLElement;
    input: HTMLInputElement;
    send: HTMLButtonElement;
    undo: HTMLButtonElement;
    clearSelection: HTMLButtonElement;
    feedback: HTMLElement;
    chart: HTMLElement;
    recommendations: HTMLElement;
    session: HTMLElement;
}

const TRANSITION_BADGES: Record<string, string> = {
    initial: 'new thread',
    continue: 'continuing',
    retain: 'same focus',
    shift: 'shifted focus',
};

export class App {
    readonly client: Client;
    private readonly parts: AppElements;
    private readonly canvas: ChartCanvas;
    private readonly recPanel: RecommendationPanel;
    private readonly shelfPanel: ShelfPanel;
    private view: View | null = null;
    private profile: DatasetProfile | null = null;
    private busy = false;
    private transportError: string | null = null;

    constructor(client: Client, parts: AppElements) {
        this.client = client;
        this.parts = parts;
        this.canvas = new ChartCanvas(parts.chart, (rowIds) => {
            void this.mutate(() =>
                this.client.setSelection(this.session(), rowIds),
            );
        });
        this.recPanel = new RecommendationPanel(parts.recommendations, {
            onSelect: (rec) => {
                void this.mutate(() =>
                    this.client.selectRecommendation(this.session(), rec.id),
                );
            },
            onCopy: (rec) => this.copyToInput(rec),
            onUtterance: (text) => void this.submit(text),
            fetchSimilar: (rec) => this.client.similar(this.session(), rec.id),
        });
        this.shelfPanel = new ShelfPanel(parts.attributes, parts.shelves, {
            onEncodings: (req: EncodingsRequest) => {
                void this.mutate(() =>
                    this.client.setEncodings(this.session(), req),
                );
            },
        });
        parts.send.addEventListener('click', () => {
            void this.submit(parts.input.value);
        });
        parts.input.addEventListener('keydown', (event) => {
            if (event.key === 'Enter') {
                void this.submit(parts.input.value);
            }
        });
        parts.undo.addEventListener('click', () => {
            void this.mutate(() => this.client.undo(this.session()));
        });
        parts.clearSelection.addEventListener('click', () => {
            void this.mutate(() => this.client.setSelection(this.session(), []));
        });
    }

    session(): string {
        if (!this.view) {
            throw new Error('no active session');
        }
        return this.view.session;
    }

    currentView(): View | null {
        return this.view;
    }

    chartCanvas(): ChartCanvas {
        return this.canvas;
    }

    isBusy(): boolean {
        return this.busy;
    }

    /** Create a fresh session on the given dataset. */
    async start(dataset: string, seed = 0): Promise<void> {
        await this.mutate(() => this.client.createSession({ dataset, seed }));
    }

    /** Rebuild the page for an existing session from server state alone. */
    async resume(session: string): Promise<void> {
        await this.mutate(() => this.client.state(session));
    }

    async submit(text: string): Promise<void> {
        const trimmed = text.trim();
        if (!trimmed) {
            return;
        }
        const done = await this.mutate(() =>
            this.client.utterance(this.session(), trimmed),
        );
        if (done && !this.view?.error) {
            this.parts.input.value = '';
            this.render();
        }
    }

    private copyToInput(rec: Recommendation): void {
        this.parts.input.value = rec.text;
        this.parts.input.focus();
    }

    private async mutate(call: () => Promise<View>): Promise<boolean> {
        if (this.busy) {
            return false;
        }
        this.busy = true;
        this.transportError = null;
        this.render();
        try {
            const next = await call();
            if (next.profile) {
                this.profile = next.profile;
            }
            this.view = next;
            return true;
        } catch (error) {
            this.transportError =
                error instanceof ApiError
                    ? `${error.status}: ${error.message}`
                    : String(error);
            return false;
        } finally {
            this.busy = false;
            this.render();
        }
    }

    /** Redraw everything from the current view; no incremental state. */
    render(): void {
        const view = this.view;
        this.parts.input.disabled = this.busy || view === null;
        this.parts.send.disabled = this.busy || view === null;
        this.parts.undo.disabled =
            this.busy || view === null || view.state.undo_stack.length === 0;
        this.parts.clearSelection.disabled =
            this.busy || view === null || view.state.selection.length === 0;
        this.recPanel.setEnabled(!this.busy && view !== null);
        this.shelfPanel.setEnabled(!this.busy && view !== null);

        this.renderFeedback();
        if (view === null) {
            return;
        }
        this.parts.session.textContent = `${view.dataset} · session ${view.session}`;
        this.shelfPanel.render(this.profile, view.chart);
        this.canvas.render(view.chart, view.chart_data, view.state.selection);
        this.recPanel.render(view.recommendations);
    }

    private renderFeedback(): void {
        const box = this.parts.feedback;
        clear(box);
        if (this.busy) {
            box.appendChild(el('div', 'feedback-busy', 'Thinking...'));
            return;
        }
        if (this.transportError) {
            box.appendChild(
                el('div', 'feedback-error', `Request failed (${this.transportError})`),
            );
            return;
        }
        const view = this.view;
        if (!view) {
            return;
        }
        if (view.error) {
            box.appendChild(el('div', 'feedback-error', view.error));
        }
        if (view.transition) {
            const badge = el(
                'span',
                `transition-badge transition-${view.transition}`,
                TRANSITION_BADGES[view.transition] ?? view.transition,
            );
            box.appendChild(badge);
        }
        for (const diagnostic of view.diagnostics) {
            box.appendChild(
                el('div', `feedback-diagnostic code-${diagnostic.code}`, diagnostic.message),
            );
        }
        for (const message of view.messages) {
            box.appendChild(el('div', 'feedback-message', message));
        }
    }
}

export { encodingsFromChart };

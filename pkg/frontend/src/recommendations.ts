/**
 * Right-hand recommendation panel.
 *
 * Three sections: computations over the current selection, refinements
 * of the current chart, and new inquiries. Click applies the utterance;
 * right-click copies its text into the input box for editing; the "~"
 * affordance expands alternate parameterizations fetched on demand.
 * Entity bolding comes straight from server span offsets.
 */

import { clear, el } from './dom.js';
import type { Recommendation, RecommendationSet, Span } from './types.js';

export interface RecommendationHandlers {
    onSelect(rec: Recommendation): void;
    onCopy(rec: Recommendation): void;
    /** Alternates are not part of the served list, so they apply as text. */
    onUtterance(text: string): void;
    fetchSimilar(rec: Recommendation): Promise<Recommendation[]>;
}

const SECTION_TITLES: Array<[keyof Omit<RecommendationSet, 'seed'>, string]> = [
    ['deictics', 'About your selection'],
    ['followups', 'Refine this chart'],
    ['new_inquiries', 'Start a new inquiry'],
];

/** Text nodes interleaved with <b> segments at the server's offsets. */
export function spanNodes(text: string, spans: Span[]): Node[] {
    const nodes: Node[] = [];
    let cursor = 0;
    const ordered = [...spans].sort((a, b) => a.start - b.start);
    for (const span of ordered) {
        if (span.start < cursor || span.end > text.length) {
            continue; // never trust offsets past what the text can hold
        }
        if (span.start > cursor) {
            nodes.push(document.createTextNode(text.slice(cursor, span.start)));
        }
        const bold = el('b');
        bold.textContent = text.slice(span.start, span.end);
        nodes.push(bold);
        cursor = span.end;
    }
    if (cursor < text.length) {
        nodes.push(document.createTextNode(text.slice(cursor)));
    }
    return nodes;
}

export class RecommendationPanel {
    private readonly root: HTMLElement;
    private readonly handlers: RecommendationHandlers;
    private enabled = true;

    constructor(root: HTMLElement, handlers: RecommendationHandlers) {
        this.root = root;
        this.handlers = handlers;
    }

    setEnabled(enabled: boolean): void {
        this.enabled = enabled;
        this.root.classList.toggle('disabled', !enabled);
    }

    render(recs: RecommendationSet): void {
        clear(this.root);
        for (const [key, title] of SECTION_TITLES) {
            const items = recs[key];
            if (items.length === 0) {
                continue;
            }
            const section = el('div', `rec-section rec-${key}`);
            section.appendChild(el('h3', 'rec-title', title));
            const list = el('ul', 'rec-list');
            for (const rec of items) {
                list.appendChild(this.renderItem(rec));
            }
            section.appendChild(list);
            this.root.appendChild(section);
        }
        if (!this.root.firstChild) {
            this.root.appendChild(el('div', 'rec-empty', 'No suggestions yet.'));
        }
    }

    private renderItem(rec: Recommendation): HTMLLIElement {
        const item = el('li', `rec-item rec-type-${rec.rtype}`);
        item.dataset.recId = rec.id;

        const body = el('div', 'rec-text');
        body.title = rec.explanation;
        for (const node of spanNodes(rec.text, rec.spans)) {
            body.appendChild(node);
        }
        body.addEventListener('click', () => {
            if (this.enabled) {
                this.handlers.onSelect(rec);
            }
        });
        body.addEventListener('contextmenu', (event) => {
            event.preventDefault();
            if (this.enabled) {
                this.handlers.onCopy(rec);
            }
        });
        item.appendChild(body);

        const more = el('button', 'rec-similar-toggle', '~');
        more.type = 'button';
        more.title = 'Similar suggestions';
        more.addEventListener('click', async () => {
            if (!this.enabled) {
                return;
            }
            const open = item.querySelector('.rec-similar');
            if (open) {
                open.remove();
                return;
            }
            const alternates = await this.handlers.fetchSimilar(rec);
            const sub = el('ul', 'rec-similar');
            if (alternates.length === 0) {
                sub.appendChild(el('li', 'rec-similar-empty', 'No close alternatives.'));
            }
            for (const alt of alternates) {
                const altItem = el('li', 'rec-item rec-alt');
                const altBody = el('div', 'rec-text');
                altBody.title = alt.explanation;
                for (const node of spanNodes(alt.text, alt.spans)) {
                    altBody.appendChild(node);
                }
                altBody.addEventListener('click', () => {
                    if (this.enabled) {
                        this.handlers.onUtterance(alt.text);
                    }
                });
                altBody.addEventListener('contextmenu', (event) => {
                    event.preventDefault();
                    if (this.enabled) {
                        this.handlers.onCopy(alt);
                    }
                });
                altItem.appendChild(altBody);
                sub.appendChild(altItem);
            }
            item.appendChild(sub);
        });
        item.appendChild(more);
        return item;
    }
}

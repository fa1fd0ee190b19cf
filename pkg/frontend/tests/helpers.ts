/** Shared scaffolding for unit and end-to-end tests. */

import type { AppElements } from '../src/app.js';

/** Build the page skeleton the app expects and return its parts. */
export function makeParts(): { root: HTMLElement; parts: AppElements } {
    const root = document.createElement('div');
    root.innerHTML = `
        <section id="attributes"></section>
        <section id="shelves"></section>
        <input id="utterance" type="text">
        <button id="send"></button>
        <button id="undo"></button>
        <button id="clear-selection"></button>
        <div id="feedback"></div>
        <div id="chart"></div>
        <aside id="recommendations"></aside>
        <span id="session-label"></span>
    `;
    document.body.appendChild(root);
    const pick = <T extends HTMLElement>(selector: string): T => {
        const node = root.querySelector(selector);
        if (!node) {
            throw new Error(`missing ${selector}`);
        }
        return node as T;
    };
    return {
        root,
        parts: {
            attributes: pick('#attributes'),
            shelves: pick('#shelves'),
            input: pick<HTMLInputElement>('#utterance'),
            send: pick<HTMLButtonElement>('#send'),
            undo: pick<HTMLButtonElement>('#undo'),
            clearSelection: pick<HTMLButtonElement>('#clear-selection'),
            feedback: pick('#feedback'),
            chart: pick('#chart'),
            recommendations: pick('#recommendations'),
            session: pick('#session-label'),
        },
    };
}

export async function waitFor(
    condition: () => boolean,
    timeoutMs = 10000,
    label = 'condition',
): Promise<void> {
    const started = Date.now();
    while (!condition()) {
        if (Date.now() - started > timeoutMs) {
            throw new Error(`timed out waiting for ${label}`);
        }
        await new Promise((resolve) => setTimeout(resolve, 25));
    }
}

export function mouse(
    target: Element,
    type: 'mousedown' | 'mousemove' | 'mouseup',
    clientX: number,
    clientY: number,
): void {
    target.dispatchEvent(
        new MouseEvent(type, { bubbles: true, cancelable: true, clientX, clientY }),
    );
}

/**
 * Browser bootstrap.
 *
 * Finds the service (same origin by default, ?api= or localStorage
 * override for a dev setup), then resumes the session remembered for
 * that service or offers the dataset picker. The session id rides in
 * localStorage so a reload rebuilds the exact same page from GET state.
 */

import { Client } from './api.js';
import { App, AppElements } from './app.js';
import { clear, el } from './dom.js';

const SESSION_KEY = 'vizguide-session';
const BASE_KEY = 'vizguide-api';

function apiBase(): string {
    const fromQuery = new URLSearchParams(location.search).get('api');
    if (fromQuery) {
        localStorage.setItem(BASE_KEY, fromQuery);
        return fromQuery;
    }
    const remembered = localStorage.getItem(BASE_KEY);
    if (remembered) {
        return remembered;
    }
    if (location.protocol === 'file:') {
        return 'http://127.0.0.1:8731';
    }
    return `${location.protocol}//${location.host}`;
}

function byId<T extends HTMLElement>(id: string): T {
    const node = document.getElementById(id);
    if (!node) {
        throw new Error(`missing #${id}`);
    }
    return node as T;
}

async function pickDataset(client: Client, host: HTMLElement): Promise<string> {
    const { datasets } = await client.datasets();
    return new Promise((resolve) => {
        clear(host);
        const picker = el('div', 'dataset-picker');
        picker.appendChild(el('h2', undefined, 'Pick a dataset'));
        for (const name of datasets) {
            const button = el('button', 'dataset-choice', name);
            button.type = 'button';
            button.addEventListener('click', () => {
                clear(host);
                resolve(name);
            });
            picker.appendChild(button);
        }
        host.appendChild(picker);
    });
}

async function boot(): Promise<void> {
    const client = new Client(apiBase());
    const parts: AppElements = {
        attributes: byId('attributes'),
        shelves: byId('shelves'),
        input: byId<HTMLInputElement>('utterance'),
        send: byId<HTMLButtonElement>('send'),
        undo: byId<HTMLButtonElement>('undo'),
        clearSelection: byId<HTMLButtonElement>('clear-selection'),
        feedback: byId('feedback'),
        chart: byId('chart'),
        recommendations: byId('recommendations'),
        session: byId('session-label'),
    };
    const app = new App(client, parts);

    const remembered = localStorage.getItem(SESSION_KEY);
    if (remembered) {
        await app.resume(remembered);
        if (app.currentView()) {
            return;
        }
        localStorage.removeItem(SESSION_KEY); // stale session id
    }
    const dataset = await pickDataset(client, byId('overlay'));
    await app.start(dataset);
    const view = app.currentView();
    if (view) {
        localStorage.setItem(SESSION_KEY, view.session);
    }
}

document.addEventListener('DOMContentLoaded', () => {
    void boot();
});

/**
 * Thin typed client for the vizguide session service.
 *
 * Transport failures and non-2xx statuses raise ApiError; engine
 * refusals do not (the server reports those inside a 200 view under
 * its "error" field, and the app renders them as feedback).
 */

import type {
    EncodingsRequest,
    Recommendation,
    RecommendationSet,
    SimilarResponse,
    View,
} from './types.js';

export class ApiError extends Error {
    readonly status: number;

    constructor(status: number, message: string) {
        super(message);
        this.name = 'ApiError';
        this.status = status;
    }
}

export interface CreateSessionRequest {
    dataset?: string;
    csv?: string;
    name?: string;
    seed?: number;
    k_followup?: number;
    k_new?: number;
}

async function readError(res: Response): Promise<string> {
    try {
        const body = (await res.json()) as { detail?: unknown };
        if (typeof body.detail === 'string') {
            return body.detail;
        }
        if (Array.isArray(body.detail)) {
            return body.detail
                .map((d) => {
                    const item = d as { loc?: unknown[]; msg?: string };
                    const loc = (item.loc ?? []).join('.');
                    return loc ? `${loc}: ${item.msg ?? ''}` : item.msg ?? '';
                })
                .join('; ');
        }
        return JSON.stringify(body);
    } catch {
        return res.statusText;
    }
}

export class Client {
    readonly baseUrl: string;

    constructor(baseUrl: string) {
        this.baseUrl = baseUrl.replace(/\/$/, '');
    }

    private async request<T>(method: string, path: string, body?: unknown): Promise<T> {
        const init: RequestInit = { method, headers: {} };
        if (body !== undefined) {
            init.headers = { 'Content-Type': 'application/json' };
            init.body = JSON.stringify(body);
        }
        const res = await fetch(`${this.baseUrl}${path}`, init);
        if (!res.ok) {
            throw new ApiError(res.status, await readError(res));
        }
        return (await res.json()) as T;
    }

    datasets(): Promise<{ datasets: string[] }> {
        return this.request('GET', '/datasets');
    }

    createSession(req: CreateSessionRequest): Promise<View> {
        return this.request('POST', '/sessions', req);
    }

    utterance(session: string, text: string): Promise<View> {
        return this.request('POST', `/sessions/${session}/utterances`, { text });
    }

    selectRecommendation(session: string, recId: string): Promise<View> {
        return this.request(
            'POST',
            `/sessions/${session}/recommendations/${recId}/select`,
            {},
        );
    }

    async similar(session: string, recId: string): Promise<Recommendation[]> {
        const res = await this.request<SimilarResponse>(
            'GET',
            `/sessions/${session}/recommendations/${recId}/similar`,
        );
        return res.similar;
    }

    setEncodings(session: string, req: EncodingsRequest): Promise<View> {
        return this.request('PUT', `/sessions/${session}/encodings`, req);
    }

    setSelection(session: string, rowIds: number[]): Promise<View> {
        return this.request('POST', `/sessions/${session}/selection`, {
            row_ids: rowIds,
        });
    }

    undo(session: string): Promise<View> {
        return this.request('POST', `/sessions/${session}/undo`, {});
    }

    state(session: string): Promise<View> {
        return this.request('GET', `/sessions/${session}/state`);
    }

    async recommendations(session: string): Promise<RecommendationSet> {
        const res = await this.request<{ recommendations: RecommendationSet }>(
            'GET',
            `/sessions/${session}/recommendations`,
        );
        return res.recommendations;
    }
}

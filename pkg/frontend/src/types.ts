/**
 * Wire types for the vizguide session service.
 *
 * These mirror the server's JSON exactly; the client renders them as-is
 * and never derives analytic facts on its own.
 */

export type Mark = 'bar' | 'line' | 'point';

export type TransitionName = 'initial' | 'continue' | 'retain' | 'shift';

export type AttributeKind = 'categorical' | 'quantitative' | 'temporal';

export interface Encoding {
    /** Null for pure count axes (count needs no column). */
    attribute: string | null;
    aggregate: string | null;
    binned: boolean;
}

export interface FilterSpec {
    attribute: string;
    kind: 'values' | 'range' | 'top_n';
    values?: Array<string | number>;
    low?: number | null;
    high?: number | null;
    low_open?: boolean;
    high_open?: boolean;
    label?: string | null;
    n?: number;
}

export interface ChartSpec {
    mark: Mark;
    x: Encoding | null;
    y: Encoding | null;
    color: Encoding | null;
    filters: FilterSpec[];
    sort: string | null;
}

/** One dot on a scatterplot; color is the series value when encoded. */
export interface PointItem {
    row_id: number;
    x: number;
    y: number;
    color?: string;
}

/** One bar, or one vertex of a line series. */
export interface SeriesItem {
    x: string | number;
    value: number;
    row_ids: number[];
    color?: string;
}

export type ChartData =
    | { kind: 'point'; items: PointItem[] }
    | { kind: 'bar'; items: SeriesItem[] }
    | { kind: 'line'; items: SeriesItem[] };

/** Character offsets into a recommendation's text, for bolding entities. */
export interface Span {
    start: number;
    end: number;
    text: string;
}

export type RecommendationType = 'deictic' | 'followup' | 'new_inquiry';

export interface Recommendation {
    id: string;
    text: string;
    spans: Span[];
    rtype: RecommendationType;
    intents: string[];
    transition: TransitionName;
    parameters: Record<string, unknown>;
    explanation: string;
    action: Record<string, unknown>;
}

export interface RecommendationSet {
    seed: number;
    deictics: Recommendation[];
    followups: Recommendation[];
    new_inquiries: Recommendation[];
}

export interface Diagnostic {
    code: 'ambiguous_reference' | 'underspecified' | 'unsupported' | string;
    message: string;
    subject: string | null;
}

export interface ComputedStat {
    stat: string;
    values: Array<Record<string, unknown>>;
}

export interface ValueCount {
    value: string | number;
    count: number;
}

export interface QuantStats {
    min: number;
    max: number;
    mean: number;
    stddev: number;
}

export interface AttributeProfile {
    name: string;
    kind: AttributeKind;
    cardinality: number;
    null_count: number;
    values?: ValueCount[];
    stats?: QuantStats;
}

export interface DatasetProfile {
    name: string;
    row_count: number;
    attributes: AttributeProfile[];
}

export interface SessionState {
    dataset: string;
    active_utterance: string | null;
    attribute_scores: Record<string, number>;
    intent_scores: Record<string, number>;
    value_scores: Record<string, number>;
    selection: number[];
    filters: FilterSpec[];
    chart: ChartSpec | null;
    history: unknown[];
    undo_stack: unknown[];
}

/** Every service response carries the whole picture. */
export interface View {
    session: string;
    dataset: string;
    error: string | null;
    transition: TransitionName | null;
    messages: string[];
    computed: ComputedStat | null;
    diagnostics: Diagnostic[];
    chart: ChartSpec | null;
    chart_data: ChartData | null;
    state: SessionState;
    recommendations: RecommendationSet;
    profile?: DatasetProfile;
    selected?: Recommendation;
}

export interface SimilarResponse {
    session: string;
    similar: Recommendation[];
}

export interface EncodingsRequest {
    x?: string | null;
    y?: string | null;
    color?: string | null;
    aggregation?: string | null;
    sort?: string | null;
    filters?: FilterSpec[] | null;
}

/**
 * Attribute panel and manual view specification.
 *
 * Attribute pills drag onto the x / y / color shelves (click a pill,
 * then a shelf, for the keyboard path). Every edit sends the complete
 * channel assignment: the service replaces, it does not merge.
 * Active filters appear as chips; categorical chips carry a dropdown
 * that narrows the filter to a single value, and every chip can be
 * removed.
 */

import { clear, el } from './dom.js';
import type {
    AttributeProfile,
    ChartSpec,
    DatasetProfile,
    EncodingsRequest,
    FilterSpec,
} from './types.js';

const KIND_GLYPHS: Record<string, string> = {
    categorical: 'A',
    quantitative: '#',
    temporal: 'T',
};

const CHANNELS = ['x', 'y', 'color'] as const;
type Channel = (typeof CHANNELS)[number];

const AGGREGATIONS = ['', 'mean', 'sum', 'count', 'min', 'max'];
const SORTS = ['', 'asc', 'desc'];

export interface ShelfHandlers {
    onEncodings(req: EncodingsRequest): void;
}

function channelAttribute(chart: ChartSpec | null, channel: Channel): string | null {
    const encoding = chart ? chart[channel] : null;
    return encoding ? encoding.attribute : null;
}

/** The full replacement request implied by the current chart. */
export function encodingsFromChart(chart: ChartSpec | null): EncodingsRequest {
    return {
        x: channelAttribute(chart, 'x'),
        y: channelAttribute(chart, 'y'),
        color: channelAttribute(chart, 'color'),
        aggregation: chart?.y?.aggregate ?? chart?.x?.aggregate ?? null,
        sort: chart?.sort ?? null,
        filters: chart ? chart.filters : [],
    };
}

export function filterLabel(filter: FilterSpec): string {
    if (filter.kind === 'values') {
        const values = filter.values ?? [];
        const shown = values.slice(0, 3).join(', ');
        const extra = values.length > 3 ? ` +${values.length - 3}` : '';
        return `${filter.attribute}: ${shown}${extra}`;
    }
    if (filter.kind === 'top_n') {
        return `${filter.attribute}: top ${filter.n ?? ''}`.trim();
    }
    if (filter.label) {
        return `${filter.attribute}: ${filter.label}`;
    }
    return `${filter.attribute}: ${filter.low ?? ''}..${filter.high ?? ''}`;
}

export class ShelfPanel {
    private readonly attributesRoot: HTMLElement;
    private readonly shelvesRoot: HTMLElement;
    private readonly handlers: ShelfHandlers;
    private profile: DatasetProfile | null = null;
    private chart: ChartSpec | null = null;
    private armed: string | null = null; // pill picked for click-to-place
    private enabled = true;

    constructor(
        attributesRoot: HTMLElement,
        shelvesRoot: HTMLElement,
        handlers: ShelfHandlers,
    ) {
        this.attributesRoot = attributesRoot;
        this.shelvesRoot = shelvesRoot;
        this.handlers = handlers;
    }

    setEnabled(enabled: boolean): void {
        this.enabled = enabled;
        this.attributesRoot.classList.toggle('disabled', !enabled);
        this.shelvesRoot.classList.toggle('disabled', !enabled);
    }

    render(profile: DatasetProfile | null, chart: ChartSpec | null): void {
        this.profile = profile;
        this.chart = chart;
        this.renderAttributes();
        this.renderShelves();
    }

    private renderAttributes(): void {
        clear(this.attributesRoot);
        if (!this.profile) {
            return;
        }
        this.attributesRoot.appendChild(el('h3', 'panel-title', 'Attributes'));
        const list = el('ul', 'attribute-list');
        for (const attribute of this.profile.attributes) {
            list.appendChild(this.renderPill(attribute));
        }
        this.attributesRoot.appendChild(list);
    }

    private renderPill(attribute: AttributeProfile): HTMLLIElement {
        const pill = el('li', `attribute-pill kind-${attribute.kind}`);
        pill.draggable = true;
        pill.dataset.attribute = attribute.name;
        pill.appendChild(el('span', 'kind-glyph', KIND_GLYPHS[attribute.kind] ?? '?'));
        pill.appendChild(document.createTextNode(attribute.name));
        pill.title = `${attribute.kind}, ${attribute.cardinality} distinct`;
        pill.addEventListener('dragstart', (event) => {
            event.dataTransfer?.setData('text/attribute', attribute.name);
        });
        pill.addEventListener('click', () => {
            if (!this.enabled) {
                return;
            }
            this.armed = this.armed === attribute.name ? null : attribute.name;
            this.attributesRoot
                .querySelectorAll('.attribute-pill.armed')
                .forEach((node) => node.classList.remove('armed'));
            if (this.armed) {
                pill.classList.add('armed');
            }
        });
        return pill;
    }

    private renderShelves(): void {
        clear(this.shelvesRoot);
        this.shelvesRoot.appendChild(el('h3', 'panel-title', 'Encoding'));
        for (const channel of CHANNELS) {
            this.shelvesRoot.appendChild(this.renderShelf(channel));
        }
        this.shelvesRoot.appendChild(this.renderAggregationRow());
        this.shelvesRoot.appendChild(this.renderFilters());
    }

    private renderShelf(channel: Channel): HTMLDivElement {
        const row = el('div', 'shelf-row');
        row.appendChild(el('span', 'shelf-name', channel));
        const target = el('div', 'shelf-target');
        target.dataset.channel = channel;
        const current = channelAttribute(this.chart, channel);
        if (current) {
            const chip = el('span', 'shelf-chip', current);
            const remove = el('button', 'chip-remove', 'x');
            remove.type = 'button';
            remove.title = `Clear ${channel}`;
            remove.addEventListener('click', () => this.assign(channel, null));
            chip.appendChild(remove);
            target.appendChild(chip);
        } else {
            target.appendChild(el('span', 'shelf-hint', 'drop attribute'));
        }
        target.addEventListener('dragover', (event) => event.preventDefault());
        target.addEventListener('drop', (event) => {
            event.preventDefault();
            const name = event.dataTransfer?.getData('text/attribute');
            if (name) {
                this.assign(channel, name);
            }
        });
        target.addEventListener('click', () => {
            if (this.armed) {
                const name = this.armed;
                this.armed = null;
                this.assign(channel, name);
            }
        });
        row.appendChild(target);
        return row;
    }

    private renderAggregationRow(): HTMLDivElement {
        const row = el('div', 'shelf-row shelf-extras');
        const agg = el('select', 'agg-select');
        agg.title = 'Aggregation';
        for (const option of AGGREGATIONS) {
            const node = el('option', undefined, option === '' ? 'no aggregation' : option);
            node.setAttribute('value', option);
            agg.appendChild(node);
        }
        agg.value = this.chart?.y?.aggregate ?? this.chart?.x?.aggregate ?? '';
        agg.addEventListener('change', () => {
            this.send({ aggregation: agg.value === '' ? null : agg.value });
        });
        const sort = el('select', 'sort-select');
        sort.title = 'Sort';
        for (const option of SORTS) {
            const node = el('option', undefined, option === '' ? 'unsorted' : option);
            node.setAttribute('value', option);
            sort.appendChild(node);
        }
        sort.value = this.chart?.sort ?? '';
        sort.addEventListener('change', () => {
            this.send({ sort: sort.value === '' ? null : sort.value });
        });
        row.appendChild(agg);
        row.appendChild(sort);
        return row;
    }

    private renderFilters(): HTMLDivElement {
        const box = el('div', 'filter-box');
        box.appendChild(el('h3', 'panel-title', 'Filters'));
        const filters = this.chart?.filters ?? [];
        if (filters.length === 0) {
            box.appendChild(el('div', 'filter-empty', 'No filters.'));
            return box;
        }
        for (let index = 0; index < filters.length; index += 1) {
            box.appendChild(this.renderFilterChip(filters, index));
        }
        return box;
    }

    private renderFilterChip(filters: FilterSpec[], index: number): HTMLDivElement {
        const filter = filters[index];
        const chip = el('div', 'filter-chip');
        chip.appendChild(el('span', 'filter-text', filterLabel(filter)));

        const attribute = this.profile?.attributes.find(
            (a) => a.name === filter.attribute,
        );
        if (filter.kind === 'values' && attribute?.values) {
            const refine = el('select', 'filter-refine');
            refine.title = `Narrow ${filter.attribute}`;
            const keep = el('option', undefined, 'all selected');
            keep.setAttribute('value', '');
            refine.appendChild(keep);
            for (const vc of attribute.values) {
                const value = String(vc.value);
                const node = el('option', undefined, value);
                node.setAttribute('value', value);
                refine.appendChild(node);
            }
            refine.addEventListener('change', () => {
                if (refine.value === '') {
                    return;
                }
                const next = filters.slice();
                next[index] = { ...filter, values: [refine.value] };
                this.send({ filters: next });
            });
            chip.appendChild(refine);
        }

        const remove = el('button', 'chip-remove', 'x');
        remove.type = 'button';
        remove.title = 'Remove filter';
        remove.addEventListener('click', () => {
            const next = filters.slice(0, index).concat(filters.slice(index + 1));
            this.send({ filters: next });
        });
        chip.appendChild(remove);
        return chip;
    }

    private assign(channel: Channel, attribute: string | null): void {
        this.send({ [channel]: attribute });
    }

    private send(change: Partial<EncodingsRequest>): void {
        if (!this.enabled) {
            return;
        }
        this.handlers.onEncodings({ ...encodingsFromChart(this.chart), ...change });
    }
}

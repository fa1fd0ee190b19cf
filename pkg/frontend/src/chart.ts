/**
 * SVG renderer for the engine's chart JSON.
 *
 * Bars, lines, and scatterplots are drawn straight from chart_data; the
 * client computes pixel positions and nothing else. Scatterplots get a
 * rectangular brush: drag to select, release to post the covered row
 * ids; a click without drag clears the selection.
 */

import { clear, el, formatNumber, svgEl } from './dom.js';
import type { ChartData, ChartSpec, PointItem, SeriesItem } from './types.js';

export const WIDTH = 640;
export const HEIGHT = 360;
const MARGIN = { top: 16, right: 20, bottom: 64, left: 64 };
const PLOT_W = WIDTH - MARGIN.left - MARGIN.right;
const PLOT_H = HEIGHT - MARGIN.top - MARGIN.bottom;

const SERIES_COLORS = [
    '#4c78a8', '#f58518', '#54a24b', '#e45756', '#72b7b2',
    '#b279a2', '#9d755d', '#eeca3b', '#bab0ac', '#d67195',
];

interface PlacedPoint {
    rowId: number;
    px: number;
    py: number;
}

interface Scale {
    (value: number): number;
    ticks: number[];
}

function linearScale(lo: number, hi: number, rangeLo: number, rangeHi: number): Scale {
    if (lo === hi) {
        lo -= 1;
        hi += 1;
    }
    const span = hi - lo;
    const scale = ((value: number) =>
        rangeLo + ((value - lo) / span) * (rangeHi - rangeLo)) as Scale;
    const step = niceStep(span / 5);
    const ticks: number[] = [];
    for (let t = Math.ceil(lo / step) * step; t <= hi + step / 1e6; t += step) {
        ticks.push(Math.abs(t) < step / 1e6 ? 0 : t);
    }
    scale.ticks = ticks;
    return scale;
}

function niceStep(rough: number): number {
    const power = Math.pow(10, Math.floor(Math.log10(rough)));
    const unit = rough / power;
    if (unit <= 1) return power;
    if (unit <= 2) return 2 * power;
    if (unit <= 5) return 5 * power;
    return 10 * power;
}

function seriesExtent(items: SeriesItem[]): [number, number] {
    let lo = 0;
    let hi = 0;
    for (const item of items) {
        lo = Math.min(lo, item.value);
        hi = Math.max(hi, item.value);
    }
    return [lo, hi];
}

function colorsOf(items: Array<{ color?: string }>): Map<string, string> {
    const assigned = new Map<string, string>();
    for (const item of items) {
        if (item.color !== undefined && !assigned.has(item.color)) {
            assigned.set(item.color, SERIES_COLORS[assigned.size % SERIES_COLORS.length]);
        }
    }
    return assigned;
}

export class ChartCanvas {
    private readonly root: HTMLElement;
    private readonly onBrush: (rowIds: number[]) => void;
    private placed: PlacedPoint[] = [];
    private svg: SVGSVGElement | null = null;

    constructor(root: HTMLElement, onBrush: (rowIds: number[]) => void) {
        this.root = root;
        this.onBrush = onBrush;
    }

    render(chart: ChartSpec | null, data: ChartData | null, selection: number[]): void {
        clear(this.root);
        this.placed = [];
        this.svg = null;
        if (chart === null || data === null) {
            const placeholder = el('div', 'chart-placeholder');
            placeholder.textContent = 'Ask a question to start charting.';
            this.root.appendChild(placeholder);
            return;
        }
        const svg = svgEl('svg', {
            viewBox: `0 0 ${WIDTH} ${HEIGHT}`,
            width: WIDTH,
            height: HEIGHT,
            class: `chart chart-${data.kind}`,
        });
        this.svg = svg;
        const selected = new Set(selection);
        if (data.kind === 'bar') {
            this.renderBars(svg, chart, data.items, selected);
        } else if (data.kind === 'line') {
            this.renderLines(svg, chart, data.items, selected);
        } else {
            this.renderPoints(svg, chart, data.items, selected);
            this.attachBrush(svg);
        }
        this.root.appendChild(svg);
        this.renderLegend(data);
    }

    private axisLabels(svg: SVGSVGElement, chart: ChartSpec): void {
        const xName = chart.x ? describeEncoding(chart.x) : '';
        const yName = chart.y ? describeEncoding(chart.y) : '';
        const xLabel = svgEl('text', {
            x: MARGIN.left + PLOT_W / 2,
            y: HEIGHT - 6,
            'text-anchor': 'middle',
            class: 'axis-title',
        });
        xLabel.textContent = xName;
        svg.appendChild(xLabel);
        const yLabel = svgEl('text', {
            x: 14,
            y: MARGIN.top + PLOT_H / 2,
            'text-anchor': 'middle',
            transform: `rotate(-90 14 ${MARGIN.top + PLOT_H / 2})`,
            class: 'axis-title',
        });
        yLabel.textContent = yName;
        svg.appendChild(yLabel);
    }

    private yAxis(svg: SVGSVGElement, scale: Scale): void {
        for (const tick of scale.ticks) {
            const py = scale(tick);
            svg.appendChild(svgEl('line', {
                x1: MARGIN.left, x2: MARGIN.left + PLOT_W,
                y1: py, y2: py,
                class: 'gridline',
            }));
            const label = svgEl('text', {
                x: MARGIN.left - 6,
                y: py + 4,
                'text-anchor': 'end',
                class: 'tick-label',
            });
            label.textContent = formatNumber(tick);
            svg.appendChild(label);
        }
    }

    private xAxisLinear(svg: SVGSVGElement, scale: Scale): void {
        for (const tick of scale.ticks) {
            const px = scale(tick);
            const label = svgEl('text', {
                x: px,
                y: MARGIN.top + PLOT_H + 18,
                'text-anchor': 'middle',
                class: 'tick-label',
            });
            label.textContent = formatNumber(tick);
            svg.appendChild(label);
        }
    }

    private renderBars(
        svg: SVGSVGElement,
        chart: ChartSpec,
        items: SeriesItem[],
        selected: Set<number>,
    ): void {
        const [lo, hi] = seriesExtent(items);
        const y = linearScale(lo, hi, MARGIN.top + PLOT_H, MARGIN.top);
        this.yAxis(svg, y);
        const groups = [...new Set(items.map((item) => String(item.x)))];
        const band = PLOT_W / Math.max(groups.length, 1);
        const colors = colorsOf(items);
        const subCount = Math.max(colors.size, 1);
        const barWidth = (band * 0.8) / subCount;
        const slot = new Map(groups.map((g, i) => [g, i]));
        for (const item of items) {
            const gi = slot.get(String(item.x)) ?? 0;
            const sub = item.color !== undefined
                ? [...colors.keys()].indexOf(item.color)
                : 0;
            const px = MARGIN.left + gi * band + band * 0.1 + sub * barWidth;
            const py = y(Math.max(item.value, 0));
            const base = y(0);
            const rect = svgEl('rect', {
                x: px,
                y: Math.min(py, base),
                width: Math.max(barWidth - 1, 1),
                height: Math.abs(base - py),
                fill: item.color !== undefined
                    ? colors.get(item.color)!
                    : SERIES_COLORS[0],
                class: 'bar',
            });
            rect.dataset.rowIds = item.row_ids.join(',');
            if (item.row_ids.some((id) => selected.has(id))) {
                rect.classList.add('selected');
            }
            svg.appendChild(rect);
        }
        for (const group of groups) {
            const gi = slot.get(group)!;
            const label = svgEl('text', {
                x: MARGIN.left + gi * band + band / 2,
                y: MARGIN.top + PLOT_H + 14,
                'text-anchor': 'end',
                transform: `rotate(-35 ${MARGIN.left + gi * band + band / 2} ${MARGIN.top + PLOT_H + 14})`,
                class: 'tick-label',
            });
            label.textContent = group;
            svg.appendChild(label);
        }
        this.axisLabels(svg, chart);
    }

    private renderLines(
        svg: SVGSVGElement,
        chart: ChartSpec,
        items: SeriesItem[],
        selected: Set<number>,
    ): void {
        const xs = items.map((item) => Number(item.x));
        const x = linearScale(Math.min(...xs), Math.max(...xs), MARGIN.left, MARGIN.left + PLOT_W);
        const [lo, hi] = seriesExtent(items);
        const y = linearScale(lo, hi, MARGIN.top + PLOT_H, MARGIN.top);
        this.yAxis(svg, y);
        this.xAxisLinear(svg, x);
        const colors = colorsOf(items);
        const bySeries = new Map<string, SeriesItem[]>();
        for (const item of items) {
            const key = item.color ?? '';
            const list = bySeries.get(key) ?? [];
            list.push(item);
            bySeries.set(key, list);
        }
        for (const [series, points] of bySeries) {
            const sorted = [...points].sort((a, b) => Number(a.x) - Number(b.x));
            const path = sorted
                .map((p) => `${x(Number(p.x))},${y(p.value)}`)
                .join(' ');
            const stroke = series === '' ? SERIES_COLORS[0] : colors.get(series)!;
            svg.appendChild(svgEl('polyline', {
                points: path,
                fill: 'none',
                stroke,
                'stroke-width': 2,
                class: 'line',
            }));
            for (const p of sorted) {
                const dot = svgEl('circle', {
                    cx: x(Number(p.x)),
                    cy: y(p.value),
                    r: 3,
                    fill: stroke,
                    class: 'vertex',
                });
                dot.dataset.rowIds = p.row_ids.join(',');
                if (p.row_ids.some((id) => selected.has(id))) {
                    dot.classList.add('selected');
                }
                svg.appendChild(dot);
            }
        }
        this.axisLabels(svg, chart);
    }

    private renderPoints(
        svg: SVGSVGElement,
        chart: ChartSpec,
        items: PointItem[],
        selected: Set<number>,
    ): void {
        const xs = items.map((item) => item.x);
        const ys = items.map((item) => item.y);
        const x = linearScale(Math.min(...xs), Math.max(...xs), MARGIN.left, MARGIN.left + PLOT_W);
        const y = linearScale(Math.min(...ys), Math.max(...ys), MARGIN.top + PLOT_H, MARGIN.top);
        this.yAxis(svg, y);
        this.xAxisLinear(svg, x);
        const colors = colorsOf(items);
        for (const item of items) {
            const px = x(item.x);
            const py = y(item.y);
            const dot = svgEl('circle', {
                cx: px,
                cy: py,
                r: 4,
                fill: item.color !== undefined
                    ? colors.get(item.color)!
                    : SERIES_COLORS[0],
                'fill-opacity': 0.7,
                class: 'point',
            });
            dot.dataset.rowId = String(item.row_id);
            if (selected.has(item.row_id)) {
                dot.classList.add('selected');
            }
            svg.appendChild(dot);
            this.placed.push({ rowId: item.row_id, px, py });
        }
        this.axisLabels(svg, chart);
    }

    private renderLegend(data: ChartData): void {
        const colors = colorsOf(data.items);
        if (colors.size === 0) {
            return;
        }
        const legend = el('div', 'legend');
        for (const [value, color] of colors) {
            const entry = el('span', 'legend-entry');
            const swatch = el('span', 'legend-swatch');
            swatch.style.backgroundColor = color;
            entry.appendChild(swatch);
            entry.appendChild(document.createTextNode(value));
            legend.appendChild(entry);
        }
        this.root.appendChild(legend);
    }

    /** Drag selection; pixel math uses the svg's own coordinate system. */
    private attachBrush(svg: SVGSVGElement): void {
        let start: { x: number; y: number } | null = null;
        let box: SVGRectElement | null = null;

        const toLocal = (event: MouseEvent) => {
            const rect = svg.getBoundingClientRect();
            return { x: event.clientX - rect.left, y: event.clientY - rect.top };
        };

        svg.addEventListener('mousedown', (event) => {
            start = toLocal(event);
            box = svgEl('rect', { class: 'brush', x: start.x, y: start.y, width: 0, height: 0 });
            svg.appendChild(box);
            event.preventDefault();
        });
        svg.addEventListener('mousemove', (event) => {
            if (!start || !box) {
                return;
            }
            const now = toLocal(event);
            box.setAttribute('x', String(Math.min(start.x, now.x)));
            box.setAttribute('y', String(Math.min(start.y, now.y)));
            box.setAttribute('width', String(Math.abs(now.x - start.x)));
            box.setAttribute('height', String(Math.abs(now.y - start.y)));
        });
        svg.addEventListener('mouseup', (event) => {
            if (!start || !box) {
                return;
            }
            const end = toLocal(event);
            const x0 = Math.min(start.x, end.x);
            const x1 = Math.max(start.x, end.x);
            const y0 = Math.min(start.y, end.y);
            const y1 = Math.max(start.y, end.y);
            box.remove();
            start = null;
            box = null;
            const covered = this.placed
                .filter((p) => p.px >= x0 && p.px <= x1 && p.py >= y0 && p.py <= y1)
                .map((p) => p.rowId);
            // a plain click (no drag) clears the selection
            this.onBrush(covered);
        });
    }

    /** Scatterplot dot centers, exposed for scripted interaction tests. */
    pointPositions(): ReadonlyArray<{ rowId: number; px: number; py: number }> {
        return this.placed;
    }

    svgElement(): SVGSVGElement | null {
        return this.svg;
    }
}

export function describeEncoding(encoding: {
    attribute: string | null;
    aggregate: string | null;
}): string {
    if (encoding.attribute === null) {
        return encoding.aggregate ?? '';
    }
    return encoding.aggregate !== null
        ? `${encoding.aggregate}(${encoding.attribute})`
        : encoding.attribute;
}

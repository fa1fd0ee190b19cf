/** Tiny DOM construction helpers; no framework, no templates. */

export function el<K extends keyof HTMLElementTagNameMap>(
    tag: K,
    className?: string,
    text?: string,
): HTMLElementTagNameMap[K] {
    const node = document.createElement(tag);
    if (className) {
        node.className = className;
    }
    if (text !== undefined) {
        node.textContent = text;
    }
    return node;
}

const SVG_NS = 'http://www.w3.org/2000/svg';

export function svgEl<K extends keyof SVGElementTagNameMap>(
    tag: K,
    attrs: Record<string, string | number> = {},
): SVGElementTagNameMap[K] {
    const node = document.createElementNS(SVG_NS, tag);
    for (const [key, value] of Object.entries(attrs)) {
        node.setAttribute(key, String(value));
    }
    return node;
}

export function clear(node: Element): void {
    while (node.firstChild) {
        node.removeChild(node.firstChild);
    }
}

/** Compact tick labels: 1500000 -> "1.5M", 0.25 -> "0.25". */
export function formatNumber(value: number): string {
    const abs = Math.abs(value);
    if (abs >= 1e9) {
        return `${trimZeros((value / 1e9).toFixed(1))}B`;
    }
    if (abs >= 1e6) {
        return `${trimZeros((value / 1e6).toFixed(1))}M`;
    }
    if (abs >= 1e4) {
        return `${trimZeros((value / 1e3).toFixed(1))}K`;
    }
    if (Number.isInteger(value)) {
        return String(value);
    }
    return trimZeros(value.toFixed(2));
}

function trimZeros(text: string): string {
    return text.replace(/\.0+$/, '').replace(/(\.\d*?)0+$/, '$1');
}

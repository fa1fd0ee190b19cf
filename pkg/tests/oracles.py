"""Independent reference implementations used to check the engine.

Everything here is built on the stdlib statistics module or plain loops,
deliberately sharing no code with vizguide's own metric implementations.
"""

from __future__ import annotations

import statistics


def pairwise_complete(xs, ys):
    return [(x, y) for x, y in zip(xs, ys) if x is not None and y is not None]


def oracle_pearson(xs, ys):
    pairs = pairwise_complete(xs, ys)
    if len(pairs) < 2:
        return None
    a = [p[0] for p in pairs]
    b = [p[1] for p in pairs]
    if len(set(a)) == 1 or len(set(b)) == 1:
        return None
    return statistics.correlation(a, b)


def oracle_sigma(values):
    return statistics.pstdev(values)


def oracle_zscores(values):
    mean = statistics.fmean(values)
    sd = statistics.pstdev(values)
    return [(v - mean) / sd for v in values]


def oracle_group_means(rows, dimension, measure):
    """Mean of measure per distinct non-null dimension value."""
    groups = {}
    for row in rows:
        key = row[dimension]
        if key is None:
            continue
        groups.setdefault(key, []).append(row[measure])
    means = {}
    for key, cells in groups.items():
        usable = [v for v in cells if v is not None]
        if usable:
            means[key] = statistics.fmean(usable)
    return means


def oracle_normalized_group_sigma(rows, dimension, measure):
    column = [row[measure] for row in rows if row[measure] is not None]
    if len(column) < 2 or statistics.pstdev(column) == 0:
        return None
    mean = statistics.fmean(column)
    sd = statistics.pstdev(column)
    z_rows = [
        {dimension: row[dimension],
         measure: None if row[measure] is None else (row[measure] - mean) / sd}
        for row in rows
    ]
    means = oracle_group_means(z_rows, dimension, measure)
    if len(means) < 2:
        return None
    return statistics.pstdev(list(means.values()))


def oracle_quartiles(values):
    q1, q2, q3 = statistics.quantiles(values, n=4, method="inclusive")
    return q1, q2, q3


def oracle_bin_counts(values, k=10):
    low, high = min(values), max(values)
    if low == high:
        return [len(values)]
    width = (high - low) / k
    counts = [0] * k
    for v in values:
        idx = int((v - low) / width)
        if idx == k:
            idx = k - 1
        counts[idx] += 1
    return counts


def oracle_distribution_sigma(rows, attribute, kind):
    values = [row[attribute] for row in rows if row[attribute] is not None]
    if not values:
        return None
    if kind == "quantitative":
        counts = oracle_bin_counts(values)
    else:
        seen = {}
        for v in values:
            seen[v] = seen.get(v, 0) + 1
        counts = list(seen.values())
    if len(counts) < 2:
        return None
    return statistics.pstdev([float(c) for c in counts])


def oracle_rank_order(pairs):
    """Competition ranks for (key, value) pairs, None last, ties shared."""
    ranks = {}
    defined = [v for _, v in pairs if v is not None]
    for key, value in pairs:
        if value is None:
            ranks[key] = len(defined) + 1
        else:
            ranks[key] = 1 + sum(1 for v in defined if v > value)
    return ranks


def oracle_top_n(rows, dimension, score_of, appearance_order, n):
    """Top-n category values by a per-category score, ties by appearance."""
    groups = {}
    for row in rows:
        key = row[dimension]
        if key is None:
            continue
        groups.setdefault(key, []).append(row)
    scored = []
    for value, members in groups.items():
        score = score_of(members)
        if score is not None:
            scored.append((value, score))
    pos = {v: i for i, v in enumerate(appearance_order)}
    scored.sort(key=lambda vs: (-vs[1], pos.get(vs[0], len(pos))))
    return [v for v, _ in scored[:n]]

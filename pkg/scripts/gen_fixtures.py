"""Generate the bundled demo datasets (movies.csv, colleges.csv).

The CSVs shipped under src/vizguide/fixtures/ are produced by this script
and committed; tests freeze statistics computed from them, so rerun only
when you intend to refresh those frozen values.

The generator enforces a few dataset-level facts the test corpus relies on:
  * movies: mean Worldwide Gross by Major Genre ranks Adventure, Action,
    Musical as the top three, in that order;
  * movies: IMDB Rating vs Rotten Tomatoes Rating is the strongest
    absolute pairwise correlation among the quantitative attributes;
  * both files contain a sprinkling of null cells so pairwise-complete
    handling is exercised.
"""

from __future__ import annotations

import csv
import math
import random
from pathlib import Path

OUT_DIR = Path(__file__).resolve().parent.parent / "src" / "vizguide" / "fixtures"

MOVIE_GENRES = [
    # (name, weight, budget_mean_musd, gross_mean_musd)
    ("Drama", 0.21, 30, 98),
    ("Comedy", 0.20, 35, 120),
    ("Action", 0.13, 90, 240),
    ("Adventure", 0.10, 100, 300),
    ("Thriller", 0.10, 45, 120),
    ("Horror", 0.08, 22, 90),
    ("Romantic Comedy", 0.07, 32, 110),
    ("Musical", 0.04, 60, 185),
    ("Western", 0.04, 40, 70),
    ("Documentary", 0.03, 8, 25),
]

CONTENT_RATINGS = [("G", 0.06), ("PG", 0.20), ("PG-13", 0.42), ("R", 0.32)]

CREATIVE_TYPES = [
    ("Contemporary Fiction", 0.36),
    ("Science Fiction", 0.12),
    ("Fantasy", 0.12),
    ("Historical Fiction", 0.10),
    ("Kids Fiction", 0.10),
    ("Dramatization", 0.09),
    ("Super Hero", 0.07),
    ("Factual", 0.04),
]


def weighted_choice(rng: random.Random, table):
    r = rng.random() * sum(w for _, w in table)
    acc = 0.0
    for value, w in table:
        acc += w
        if r <= acc:
            return value
    return table[-1][0]


def gen_movies(seed: int, n: int = 700):
    rng = random.Random(seed)
    genre_weights = [(g, w) for g, w, _, _ in MOVIE_GENRES]
    budget_mean = {g: b for g, _, b, _ in MOVIE_GENRES}
    gross_mean = {g: x for g, _, _, x in MOVIE_GENRES}
    rows = []
    for i in range(n):
        genre = weighted_choice(rng, genre_weights)
        rating = weighted_choice(rng, CONTENT_RATINGS)
        ctype = weighted_choice(rng, CREATIVE_TYPES)
        year = 1980 + min(39, int(40 * rng.random() ** 0.75))
        budget = max(0.5, rng.gauss(budget_mean[genre], budget_mean[genre] * 0.40))
        # gross tracks the genre's box-office level and, within it, the budget
        rel_budget = budget / budget_mean[genre]
        gross = gross_mean[genre] * (0.55 + 0.45 * rel_budget)
        gross += rng.gauss(0, gross_mean[genre] * 0.35)
        gross = max(0.3, gross)
        imdb = min(9.5, max(1.5, rng.gauss(6.3, 1.0)))
        rotten = min(100, max(2, round(8 + 10.5 * imdb + rng.gauss(0, 7))))
        duration = min(225, max(58, round(rng.gauss(104 + 0.12 * budget, 16))))
        rows.append(
            {
                "Release Year": year,
                "Major Genre": genre,
                "Creative Type": ctype,
                "Content Rating": rating,
                "Production Budget": round(budget * 1e6),
                "Worldwide Gross": round(gross * 1e6),
                "Duration": duration,
                "IMDB Rating": round(imdb, 1),
                "Rotten Tomatoes Rating": rotten,
            }
        )
    # null out a few cells; keep Major Genre and the gross column fully dense
    for idx in rng.sample(range(n), 18):
        rows[idx]["Rotten Tomatoes Rating"] = ""
    for idx in rng.sample(range(n), 6):
        rows[idx]["Duration"] = "NA"
    for idx in rng.sample(range(n), 8):
        rows[idx]["Creative Type"] = ""
    return rows


def pearson(xs, ys):
    pairs = [(x, y) for x, y in zip(xs, ys) if x is not None and y is not None]
    n = len(pairs)
    mx = sum(p[0] for p in pairs) / n
    my = sum(p[1] for p in pairs) / n
    sxy = sum((x - mx) * (y - my) for x, y in pairs)
    sxx = sum((x - mx) ** 2 for x, _ in pairs)
    syy = sum((y - my) ** 2 for _, y in pairs)
    return sxy / math.sqrt(sxx * syy)


def movies_ok(rows) -> bool:
    by_genre: dict[str, list[float]] = {}
    for r in rows:
        by_genre.setdefault(r["Major Genre"], []).append(float(r["Worldwide Gross"]))
    means = sorted(by_genre.items(), key=lambda kv: -sum(kv[1]) / len(kv[1]))
    top3 = [g for g, _ in means[:3]]
    if top3 != ["Adventure", "Action", "Musical"]:
        return False

    def col(name):
        out = []
        for r in rows:
            v = r[name]
            out.append(float(v) if v not in ("", "NA") else None)
        return out

    quant = [
        "Production Budget",
        "Worldwide Gross",
        "Duration",
        "IMDB Rating",
        "Rotten Tomatoes Rating",
    ]
    cols = {name: col(name) for name in quant}
    best = None
    best_pair = None
    for i, a in enumerate(quant):
        for b in quant[i + 1 :]:
            r = abs(pearson(cols[a], cols[b]))
            if best is None or r > best:
                best, best_pair = r, (a, b)
    return best_pair == ("IMDB Rating", "Rotten Tomatoes Rating")


REGIONS = [
    ("South", 0.22),
    ("Midwest", 0.20),
    ("Mid-Atlantic", 0.15),
    ("West", 0.13),
    ("Southwest", 0.11),
    ("New England", 0.10),
    ("Pacific", 0.09),
]
LOCALES = [("City", 0.38), ("Suburb", 0.30), ("Town", 0.18), ("Rural", 0.14)]
CONTROLS = [("Public", 0.45), ("Private Nonprofit", 0.45), ("Private For-Profit", 0.10)]
COST_BASE = {"Public": 22000, "Private Nonprofit": 43000, "Private For-Profit": 30000}
EARNINGS_SHIFT = {"New England": 6000, "Pacific": 4000, "Mid-Atlantic": 3000, "South": -3000}


def gen_colleges(seed: int, n: int = 500):
    rng = random.Random(seed)
    rows = []
    for i in range(n):
        region = weighted_choice(rng, REGIONS)
        locale = weighted_choice(rng, LOCALES)
        control = weighted_choice(rng, CONTROLS)
        q = rng.gauss(0, 1)
        sat = min(1590, max(720, round(1050 + 130 * q + rng.gauss(0, 40))))
        admit = min(0.99, max(0.05, 0.72 - 0.14 * q + rng.gauss(0, 0.09)))
        cost = max(8000, round(COST_BASE[control] * (1 + 0.18 * q + rng.gauss(0, 0.12))))
        debt = min(60000, max(5000, round(7000 + 0.35 * cost + rng.gauss(0, 3000))))
        completion = min(0.99, max(0.05, 0.55 + 0.13 * q + rng.gauss(0, 0.10)))
        earnings = max(
            18000,
            round(42000 + 7000 * q + EARNINGS_SHIFT.get(region, 0) + rng.gauss(0, 5000)),
        )
        rows.append(
            {
                "Region": region,
                "Locale": locale,
                "Control": control,
                "Admission Rate": round(admit, 3),
                "SAT Average": sat,
                "Cost": cost,
                "Debt": debt,
                "Completion Rate": round(completion, 3),
                "Median Earnings": earnings,
            }
        )
    for idx in rng.sample(range(n), 24):
        rows[idx]["SAT Average"] = ""
    for idx in rng.sample(range(n), 10):
        rows[idx]["Debt"] = ""
    return rows


def write_csv(path: Path, rows):
    fieldnames = list(rows[0].keys())
    with path.open("w", newline="", encoding="utf-8") as fh:
        writer = csv.DictWriter(fh, fieldnames=fieldnames, lineterminator="\n")
        writer.writeheader()
        writer.writerows(rows)


def main():
    seed = 11
    while True:
        rows = gen_movies(seed)
        if movies_ok(rows):
            break
        seed += 1
    write_csv(OUT_DIR / "movies.csv", rows)
    print(f"movies.csv: {len(rows)} rows (seed {seed})")

    colleges = gen_colleges(seed=7)
    write_csv(OUT_DIR / "colleges.csv", colleges)
    print(f"colleges.csv: {len(colleges)} rows (seed 7)")


if __name__ == "__main__":
    main()

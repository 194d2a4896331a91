"""Deterministic synthetic benchmark for comparing raw and enriched modes.

Records carry sparse tags: a unique event name (whose WikiCs say nothing
about the category), sometimes a city, and only occasionally a concept
that belongs to the record's category.  The offline document collection,
on the other hand, describes every event together with several
category-bearing concepts, so enrichment through search results should
recover the signal the tags lack.

    python -m wikivote.synthetic OUTDIR [--seed N]
"""
from __future__ import annotations

import argparse
import os
import random

CATEGORIES = ("Autos", "Gaming", "Music", "Sports", "Travel")

THEMES = {
    "Autos": ["Sports cars", "Car brands", "Motor shows", "Rally drivers", "Electric vehicles"],
    "Gaming": ["Video games", "Game consoles", "Esports teams", "Game studios", "Role-playing games"],
    "Music": ["Rock albums", "Pop songs", "Music festivals", "Record labels", "Jazz musicians"],
    "Sports": ["Football clubs", "Olympic sports", "Tennis players", "Cycling races", "Rugby teams"],
    "Travel": ["Tourist attractions", "Beach resorts", "Hiking trails", "Airlines", "Heritage railways"],
}
REGIONS = ["Spain", "Japan", "Brazil", "Canada", "Kenya", "Norway", "India", "Mexico", "Egypt", "Chile"]
YEARS = [str(y) for y in range(1995, 2010)]
FILLER = [
    "video", "live", "official", "hd", "clip", "new", "best", "full", "part",
    "watch", "amazing", "top", "review", "trailer", "today", "update",
]
SYLLABLES = [
    "ka", "ro", "ven", "tal", "mi", "zor", "lu", "dren", "pa", "shi", "vo",
    "nek", "ar", "bel", "qui", "sto", "fen", "gra", "oli", "tus",
]

CONCEPTS_PER_CATEGORY = 15
N_CITIES = 20
N_TRAIN = 250
N_TEST = 125
DOCS_PER_RECORD = 6
N_DISTRACTORS = 150
DEFAULT_SEED = 20101025


class _Names:
    def __init__(self, rng: random.Random):
        self.rng = rng
        self.used = set(FILLER)

    def word(self) -> str:
        while True:
            w = "".join(self.rng.choice(SYLLABLES) for _ in range(self.rng.randint(2, 3)))
            if w not in self.used:
                self.used.add(w)
                return w

    def phrase(self, words: int = 2) -> str:
        return " ".join(self.word() for _ in range(words))


def _fill(rng, k):
    return [rng.choice(FILLER) for _ in range(k)]


def generate(outdir: str, seed: int = DEFAULT_SEED) -> dict[str, str]:
    """Write kb.tsv, train.tsv, test.tsv and corpus.tsv into ``outdir``."""
    rng = random.Random(seed)
    names = _Names(rng)
    kb_lines = []

    cat_concepts: dict[str, list[str]] = {}
    for cat in CATEGORIES:
        cat_concepts[cat] = []
        for _ in range(CONCEPTS_PER_CATEGORY):
            surface = names.phrase(2)
            heads = rng.sample(THEMES[cat], 3)
            wikics = [
                f"{heads[0]} of {rng.choice(REGIONS)}",
                f"{heads[1]} established in {rng.choice(YEARS)}",
                heads[2],
            ]
            kb_lines.append(f"{surface}\t{surface.title()}\t{'|'.join(wikics)}\n")
            cat_concepts[cat].append(surface)

    cities = []
    for _ in range(N_CITIES):
        surface = names.word()
        region = rng.choice(REGIONS)
        kb_lines.append(f"{surface}\t{surface.title()}\tCities in {region}|Populated places in {region}\n")
        cities.append(surface)

    records = []
    labels = [CATEGORIES[i % len(CATEGORIES)] for i in range(N_TRAIN + N_TEST)]
    rng.shuffle(labels)
    docs = []
    for idx, label in enumerate(labels):
        event = names.phrase(2)
        year, region = rng.choice(YEARS), rng.choice(REGIONS)
        kb_lines.append(
            f"{event}\t{event.title()}\tRecurring events established in {year}|{year} events in {region}\n"
        )
        city = rng.choice(cities) if rng.random() < 0.5 else None
        tags = _fill(rng, rng.randint(1, 2))
        if city:
            tags.append(city)
        if rng.random() < 0.3:
            tags.append(rng.choice(cat_concepts[label]))
        if rng.random() < 0.1:
            other = rng.choice([c for c in CATEGORIES if c != label])
            tags.append(rng.choice(cat_concepts[other]))
        rng.shuffle(tags)
        rid = f"syn{idx:04d}"
        title = " ".join([event.title(), *_fill(rng, 2)])
        records.append((rid, label, title, "|".join(tags)))

        for d in range(DOCS_PER_RECORD):
            topic = label if rng.random() < 0.75 else rng.choice(CATEGORIES)
            words = _fill(rng, 4) + rng.sample(cat_concepts[topic], 2)
            if city and rng.random() < 0.7:
                words.append(city)
            rng.shuffle(words)
            body = " ".join([event, *words, *_fill(rng, 3)])
            docs.append((f"{rid}-d{d}", f"{event.title()} {rng.choice(FILLER)}", body))

    for d in range(N_DISTRACTORS):
        topic = rng.choice(CATEGORIES)
        words = [rng.choice(cities), *rng.sample(cat_concepts[topic], 2), *_fill(rng, 6)]
        rng.shuffle(words)
        docs.append((f"zz{d:04d}", " ".join(_fill(rng, 3)), " ".join(words)))

    os.makedirs(outdir, exist_ok=True)
    paths = {name: os.path.join(outdir, f"{name}.tsv") for name in ("kb", "train", "test", "corpus")}
    with open(paths["kb"], "w", encoding="utf-8") as fh:
        fh.writelines(kb_lines)
    with open(paths["train"], "w", encoding="utf-8") as fh:
        fh.writelines("\t".join(r) + "\n" for r in records[:N_TRAIN])
    with open(paths["test"], "w", encoding="utf-8") as fh:
        fh.writelines("\t".join(r) + "\n" for r in records[N_TRAIN:])
    with open(paths["corpus"], "w", encoding="utf-8") as fh:
        fh.writelines("\t".join(d) + "\n" for d in docs)
    return paths


def main(argv=None):
    parser = argparse.ArgumentParser(description="write the synthetic RC/EC benchmark")
    parser.add_argument("outdir")
    parser.add_argument("--seed", type=int, default=DEFAULT_SEED)
    args = parser.parse_args(argv)
    for name, path in generate(args.outdir, args.seed).items():
        print(f"{name}\t{path}")


if __name__ == "__main__":
    main()

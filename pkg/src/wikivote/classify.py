"""Entropy-weighted WikiC voting classifier.

Every WikiC is expanded into enriched tokens (the full lowercased category
plus its content words).  Training accumulates, per token and category,
the token's share of each labelled record's bag.  A token's vote for a
category is that share profile normalized over categories and divided by
the token's entropy across categories, so category-specific tokens vote
loudly and ubiquitous ones quietly.  A record's score for a category is
the multiplicity-weighted sum of its tokens' votes.

All sums go through ``math.fsum`` so a trained model does not depend on
the order of the training corpus.
"""
from __future__ import annotations

import math
import os
import warnings
from collections import Counter
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

from .extract import Concept

STOPWORDS = frozenset(
    ["in", "of", "the", "by", "from", "to", "at", "on", "for", "and", "a", "an"]
)
DEFAULT_ALPHA = 0.01
MODEL_MAGIC = "wikivote-model"
MODEL_VERSION = "v1"


class EmptyCorpus(ValueError):
    pass


class UnknownCategory(ValueError):
    pass


class CategoryWithNoRecords(UserWarning):
    pass


class NoEvidence(ValueError):
    def __init__(self, record_id: str = ""):
        self.record_id = record_id
        super().__init__(f"record {record_id!r} shares no vocabulary with the model")


class NoGoldLabels(ValueError):
    pass


class ModelFormatError(ValueError):
    pass


def expand_ewikic(wikic: str) -> list[str]:
    """``"Capitals in Asia"`` -> ``["capitals in asia", "capitals", "asia"]``."""
    full = " ".join(wikic.lower().split())
    if not full:
        raise ValueError("empty WikiC")
    out = [full]
    for word in full.split(" "):
        if word not in STOPWORDS and word not in out:
            out.append(word)
    return out


class EWikiCBag(Counter):
    """Multiset of enriched WikiC tokens for one record."""

    @property
    def total(self) -> int:
        return sum(self.values())

    def scaled(self, factor: int) -> "EWikiCBag":
        return EWikiCBag({t: c * factor for t, c in self.items()})


def bag_of_record(concepts: Iterable[Concept]) -> EWikiCBag:
    bag = EWikiCBag()
    for concept in concepts:
        for wikic in sorted(concept.sense.wikics):
            bag.update(expand_ewikic(wikic))
    return bag


def entropy(row: Sequence[float]) -> float:
    return -math.fsum(p * math.log2(p) for p in row if p > 0)


@dataclass(frozen=True)
class TokenStats:
    proximity: tuple[float, ...]
    normalized: tuple[float, ...]
    entropy: float
    votes: tuple[float, ...]


class VotingModel:
    def __init__(self, categories: Sequence[str], stats: Mapping[str, TokenStats], alpha: float):
        self.categories = tuple(categories)
        self.stats = dict(stats)
        self.alpha = alpha

    @property
    def n(self) -> int:
        return len(self.categories)

    def proximity(self, token: str, i: int) -> float:
        return self.stats[token].proximity[i]

    def normalized(self, token: str, i: int) -> float:
        return self.stats[token].normalized[i]

    def entropy(self, token: str) -> float:
        return self.stats[token].entropy

    def votes(self, token: str) -> tuple[float, ...]:
        return self.stats[token].votes

    def __contains__(self, token: str) -> bool:
        return token in self.stats

    def __eq__(self, other):
        if not isinstance(other, VotingModel):
            return NotImplemented
        return (
            self.categories == other.categories
            and self.alpha == other.alpha
            and self.stats == other.stats
        )

    def __repr__(self):
        return f"VotingModel(categories={self.categories!r}, tokens={len(self.stats)}, alpha={self.alpha})"


def finalize_token(proximity: Sequence[float], alpha: float) -> TokenStats:
    n = len(proximity)
    total = math.fsum(proximity)
    smoothed_total = total + n * alpha
    normalized = tuple((p + alpha) / smoothed_total for p in proximity)
    ent = entropy(normalized)
    if total > 0:
        share = [p / total for p in proximity]
    else:
        share = list(normalized)
    votes = tuple(s / ent for s in share)
    return TokenStats(tuple(proximity), normalized, ent, votes)


def train(
    examples: Iterable[tuple[str, Mapping[str, int]]],
    categories: Sequence[str],
    alpha: float = DEFAULT_ALPHA,
) -> VotingModel:
    """Fit a voting model from ``(label, bag)`` pairs.

    Each record spreads a unit of mass over its tokens in proportion to
    their multiplicity; a token's proximity to a category is the mass it
    collected from records of that category.
    """
    categories = tuple(categories)
    if len(categories) < 2:
        raise ValueError("need at least two categories")
    if len(set(categories)) != len(categories):
        raise ValueError("duplicate category names")
    if not alpha > 0:
        raise ValueError("alpha must be positive")
    index = {c: i for i, c in enumerate(categories)}
    n = len(categories)

    parts: dict[str, list[list[float]]] = {}
    seen_labels = set()
    count = 0
    for label, bag in examples:
        count += 1
        if label not in index:
            raise UnknownCategory(f"label {label!r} is not one of the model categories")
        seen_labels.add(label)
        total = sum(bag.values())
        if total == 0:
            continue
        i = index[label]
        for token, mult in bag.items():
            if mult <= 0:
                continue
            parts.setdefault(token, [[] for _ in range(n)])[i].append(mult / total)
    if count == 0:
        raise EmptyCorpus("no training records")
    for c in categories:
        if c not in seen_labels:
            warnings.warn(f"category {c!r} has no training records", CategoryWithNoRecords, stacklevel=2)

    stats = {}
    for token in sorted(parts):
        proximity = tuple(math.fsum(p) for p in parts[token])
        stats[token] = finalize_token(proximity, alpha)
    return VotingModel(categories, stats, alpha)


@dataclass(frozen=True)
class Prediction:
    record_id: str
    scores: tuple[float, ...]
    predicted: str | None
    gold: str | None = None


def score(bag: Mapping[str, int], model: VotingModel) -> tuple[float, ...]:
    terms: list[list[float]] = [[] for _ in range(model.n)]
    for token, mult in bag.items():
        st = model.stats.get(token)
        if st is None:
            continue
        for i, v in enumerate(st.votes):
            terms[i].append(mult * v)
    return tuple(math.fsum(t) for t in terms)


def argmax(scores: Sequence[float]) -> int:
    best = 0
    for i, s in enumerate(scores):
        if s > scores[best]:
            best = i
    return best


def predict(
    concepts: Iterable[Concept] | Mapping[str, int],
    model: VotingModel,
    record_id: str = "",
    gold: str | None = None,
) -> Prediction:
    """Predict a category; raises :class:`NoEvidence` if every score is zero."""
    bag = concepts if isinstance(concepts, Mapping) else bag_of_record(concepts)
    scores = score(bag, model)
    if all(s == 0 for s in scores):
        raise NoEvidence(record_id)
    return Prediction(record_id, scores, model.categories[argmax(scores)], gold)


def score_record(
    bag: Mapping[str, int], model: VotingModel, record_id: str = "", gold: str | None = None
) -> Prediction:
    """Like :func:`predict` but abstains (``predicted=None``) instead of raising."""
    scores = score(bag, model)
    predicted = None if all(s == 0 for s in scores) else model.categories[argmax(scores)]
    return Prediction(record_id, scores, predicted, gold)


def average_precision(ranked_ids: Sequence[str], positives: set[str]) -> float:
    if not positives:
        return 0.0
    hits = 0
    total = 0.0
    for rank, rid in enumerate(ranked_ids, start=1):
        if rid in positives:
            hits += 1
            total += hits / rank
    return total / len(positives)


@dataclass(frozen=True)
class MapReport:
    categories: tuple[str, ...]
    ap: tuple[float | None, ...]  # None where the category has no gold member
    map: float

    def format(self) -> str:
        lines = []
        for c, ap in zip(self.categories, self.ap):
            lines.append(f"{c}\t{'n/a' if ap is None else f'{ap:.6f}'}\n")
        lines.append(f"MAP\t{self.map:.6f}\n")
        return "".join(lines)


def evaluate_map(predictions: Sequence[Prediction], categories: Sequence[str]) -> MapReport:
    """Per-category average precision over records ranked by that category's score.

    Ties in score go to the smaller record id.  MAP averages over the
    categories with at least one gold record.
    """
    categories = tuple(categories)
    if not predictions or any(p.gold is None for p in predictions):
        raise NoGoldLabels("every prediction needs a gold label")
    if any(len(p.scores) != len(categories) for p in predictions):
        raise ValueError("score vectors must have one entry per category")
    unknown = {p.gold for p in predictions} - set(categories)
    if unknown:
        raise UnknownCategory(f"gold labels not among categories: {sorted(unknown)}")
    aps: list[float | None] = []
    for i, cat in enumerate(categories):
        positives = {p.record_id for p in predictions if p.gold == cat}
        if not positives:
            aps.append(None)
            continue
        ranked = sorted(predictions, key=lambda p: (-p.scores[i], p.record_id))
        aps.append(average_precision([p.record_id for p in ranked], positives))
    present = [a for a in aps if a is not None]
    return MapReport(categories, tuple(aps), math.fsum(present) / len(present))


# -- serialization -------------------------------------------------------------


def format_model(model: VotingModel) -> str:
    lines = [f"{MODEL_MAGIC} {MODEL_VERSION}\tn={model.n}\talpha={model.alpha!r}\n"]
    lines.append("categories\t" + "\t".join(model.categories) + "\n")
    for token in sorted(model.stats):
        st = model.stats[token]
        for i in range(model.n):
            lines.append(
                f"{token}\t{i}\t{st.proximity[i]!r}\t{st.normalized[i]!r}\t{st.entropy!r}\t{st.votes[i]!r}\n"
            )
    return "".join(lines)


def parse_model(lines: Iterable[str]) -> VotingModel:
    it = iter(lines)
    header = next(it, "").rstrip("\r\n").split("\t")
    if len(header) != 3 or header[0] != f"{MODEL_MAGIC} {MODEL_VERSION}":
        raise ModelFormatError("not a wikivote-model v1 file")
    try:
        n = int(header[1].removeprefix("n="))
        alpha = float(header[2].removeprefix("alpha="))
    except ValueError:
        raise ModelFormatError("bad model header") from None
    cat_line = next(it, "").rstrip("\r\n").split("\t")
    if cat_line[0] != "categories" or len(cat_line) != n + 1:
        raise ModelFormatError("category line does not match n")
    categories = cat_line[1:]
    rows: dict[str, dict[int, tuple[float, float, float, float]]] = {}
    for line_no, raw in enumerate(it, start=3):
        line = raw.rstrip("\r\n")
        if not line:
            continue
        f = line.split("\t")
        if len(f) != 6:
            raise ModelFormatError(f"line {line_no}: expected 6 fields")
        try:
            i = int(f[1])
            vals = tuple(float(x) for x in f[2:])
        except ValueError:
            raise ModelFormatError(f"line {line_no}: bad number") from None
        if not 0 <= i < n:
            raise ModelFormatError(f"line {line_no}: category index out of range")
        rows.setdefault(f[0], {})[i] = vals
    stats = {}
    for token, by_cat in rows.items():
        if len(by_cat) != n:
            raise ModelFormatError(f"token {token!r} lacks rows for some categories")
        cols = [by_cat[i] for i in range(n)]
        stats[token] = TokenStats(
            proximity=tuple(c[0] for c in cols),
            normalized=tuple(c[1] for c in cols),
            entropy=cols[0][2],
            votes=tuple(c[3] for c in cols),
        )
    return VotingModel(categories, stats, alpha)


def save_model(model: VotingModel, path: str | os.PathLike) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(format_model(model))


def load_model(path: str | os.PathLike) -> VotingModel:
    with open(path, encoding="utf-8") as fh:
        return parse_model(fh)

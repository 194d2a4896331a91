"""Content-duplicated open resource (CDOR) collection.

A record's best person, location and other proper noun form a query.  The
query goes to a search backend, and a back-to-front scan over the returned
list picks how deep the accepted resources go.  Concepts found in accepted
titles and snippets enrich the record.
"""
from __future__ import annotations

import logging
import os
from collections import defaultdict
from dataclasses import dataclass
from typing import Iterable, Protocol, Sequence

from .extract import (
    DEFAULT_RULES,
    ClassifierRules,
    Concept,
    ConceptClass,
    match_text,
    phrase_pattern,
    resolve_surfaces,
    tokenize,
)
from .kb import KnowledgeBase, normalize_surface

log = logging.getLogger(__name__)

QUERY_SIZE = 3
DEFAULT_TOP_K = 20
DEFAULT_CDORS = 5
SNIPPET_RADIUS = 10


class NoClassifiedConcepts(ValueError):
    pass


class EmptyResults(ValueError):
    pass


@dataclass(frozen=True)
class Query:
    terms: tuple[str, ...]
    source_classes: tuple[ConceptClass, ...]

    def __post_init__(self):
        if not 1 <= len(self.terms) <= QUERY_SIZE:
            raise ValueError(f"query must have 1..{QUERY_SIZE} terms, got {len(self.terms)}")
        if len(set(self.terms)) != len(self.terms):
            raise ValueError("query terms must be distinct")
        if len(self.source_classes) != len(self.terms):
            raise ValueError("source_classes must parallel terms")


@dataclass(frozen=True)
class SearchResult:
    rank: int
    title: str
    snippet: str
    url: str = ""


@dataclass(frozen=True)
class CdorSet:
    record_id: str
    results: tuple[SearchResult, ...]
    cutoff_rank: int


class SearchBackend(Protocol):
    def search(self, terms: Sequence[str], k: int) -> list[SearchResult]: ...


def construct_query(concepts: Sequence[Concept]) -> Query:
    """Build the query from concepts ordered as ``extract_concepts`` emits them.

    Takes the top person, location and other proper noun; missing slots are
    filled with further other proper nouns, then persons, then locations.
    """
    by_class: dict[ConceptClass, list[Concept]] = defaultdict(list)
    for c in concepts:
        by_class[c.concept_class].append(c)
    persons = by_class[ConceptClass.PERSON]
    locations = by_class[ConceptClass.LOCATION]
    others = by_class[ConceptClass.OTHER]
    if not (persons or locations or others):
        raise NoClassifiedConcepts("record has no person, location or other proper noun concepts")

    picked: list[Concept] = [group[0] for group in (persons, locations, others) if group]
    for pool in (others[1:], persons[1:], locations[1:]):
        for c in pool:
            if len(picked) >= QUERY_SIZE:
                break
            if all(c.surface != p.surface for p in picked):
                picked.append(c)
    return Query(
        tuple(c.surface for c in picked),
        tuple(c.concept_class for c in picked),
    )


def result_matches(result: SearchResult, terms: Iterable[str]) -> bool:
    text = f"{result.title} {result.snippet}"
    return all(phrase_pattern(t).search(text) for t in terms)


def select_cdors(
    results: Sequence[SearchResult],
    query: Query,
    record_id: str = "",
    default_cdors: int = DEFAULT_CDORS,
) -> CdorSet:
    """Accept ranks 1..c where c is the deepest result containing every query term.

    When nothing qualifies, or the qualifying rank is shallower than
    ``default_cdors``, the top ``default_cdors`` results are accepted.
    """
    if not results:
        raise EmptyResults(f"no search results for record {record_id!r}")
    results = tuple(results)
    cutoff = 0
    for res in reversed(results):
        if result_matches(res, query.terms):
            cutoff = res.rank
            break
    if cutoff < default_cdors:
        cutoff = min(default_cdors, len(results))
    return CdorSet(record_id, results[:cutoff], cutoff)


def harvest_enrichment(
    cdors: CdorSet,
    kb: KnowledgeBase,
    rules: ClassifierRules = DEFAULT_RULES,
) -> list[Concept]:
    surfaces: list[str] = []
    for res in cdors.results:
        surfaces.extend(match_text(res.title, kb))
        surfaces.extend(match_text(res.snippet, kb))
    return resolve_surfaces(surfaces, kb, rules)


# -- offline backend -------------------------------------------------------


# separates title from body so phrases never straddle the two
_FIELD_BREAK = "\x00"


@dataclass(frozen=True)
class _Doc:
    doc_id: str
    title: str
    raw_body: tuple[str, ...]
    tokens: tuple[str, ...]  # lowercased title tokens followed by body tokens
    body_offset: int


class CorpusIndex:
    """Inverted index over a small document collection.

    Documents are scored by (distinct query terms present, total term
    frequency) with ties going to the smaller doc id.  Multi-word terms
    must occur as contiguous token sequences.
    """

    def __init__(self, docs: Iterable[tuple[str, str, str]]):
        self._docs: list[_Doc] = []
        self._postings: dict[str, set[int]] = defaultdict(set)
        seen = set()
        for doc_id, title, body in docs:
            if doc_id in seen:
                raise ValueError(f"duplicate doc id {doc_id!r}")
            seen.add(doc_id)
            title_toks = [t.lower() for t in tokenize(title)]
            raw_body, body_toks = [], []
            for raw in body.split():
                toks = tokenize(raw)
                if toks:
                    raw_body.append(raw)
                    body_toks.append(toks[0].lower())
            idx = len(self._docs)
            self._docs.append(
                _Doc(
                    doc_id,
                    title,
                    tuple(raw_body),
                    tuple(title_toks + [_FIELD_BREAK] + body_toks),
                    len(title_toks) + 1,
                )
            )
            for tok in set(title_toks + body_toks):
                self._postings[tok].add(idx)

    def __len__(self):
        return len(self._docs)

    @staticmethod
    def _occurrences(tokens: Sequence[str], term: Sequence[str]) -> list[int]:
        m = len(term)
        return [i for i in range(len(tokens) - m + 1) if list(tokens[i:i + m]) == term]

    def search(self, terms: Sequence[str], k: int) -> list[SearchResult]:
        if k < 1:
            raise ValueError("k must be >= 1")
        term_toks = []
        for t in dict.fromkeys(normalize_surface(t) for t in terms):
            if t:
                term_toks.append([w.lower() for w in tokenize(t)] or t.split(" "))
        candidates: set[int] = set()
        for tt in term_toks:
            candidates |= self._postings.get(tt[0], set())
        scored = []
        for idx in candidates:
            doc = self._docs[idx]
            hits = [self._occurrences(doc.tokens, tt) for tt in term_toks]
            distinct = sum(1 for h in hits if h)
            if not distinct:
                continue
            total = sum(len(h) for h in hits)
            scored.append((-distinct, -total, doc.doc_id, idx, hits))
        scored.sort()
        out = []
        for rank, (_, _, _, idx, hits) in enumerate(scored[:k], start=1):
            doc = self._docs[idx]
            out.append(SearchResult(rank, doc.title, self._snippet(doc, hits, term_toks), doc.doc_id))
        return out

    @staticmethod
    def _snippet(doc: _Doc, hits: list[list[int]], term_toks: list[list[str]]) -> str:
        body_hits = [
            (p - doc.body_offset, len(tt))
            for h, tt in zip(hits, term_toks)
            for p in h
            if p >= doc.body_offset
        ]
        if not body_hits:
            return " ".join(doc.raw_body[: 2 * SNIPPET_RADIUS + 1])
        first, width = min(body_hits)
        lo = max(0, first - SNIPPET_RADIUS)
        hi = min(len(doc.raw_body), first + width + SNIPPET_RADIUS)
        return " ".join(doc.raw_body[lo:hi])


class OfflineBackend:
    def __init__(self, index: CorpusIndex):
        self.index = index

    def search(self, terms: Sequence[str], k: int) -> list[SearchResult]:
        return self.index.search(terms, k)


class LiveSearchBackend:
    """Placeholder for a web search engine adapter.

    Subclass and implement :meth:`search`; implementations must return at
    most ``k`` results ranked 1..m and tolerate concurrent calls.
    """

    def search(self, terms: Sequence[str], k: int) -> list[SearchResult]:
        raise NotImplementedError("no live search backend is configured")


def offline_search(index: CorpusIndex, terms: Sequence[str], k: int) -> list[SearchResult]:
    return index.search(terms, k)


def parse_corpus_lines(lines: Iterable[str]) -> CorpusIndex:
    docs = []
    for line_no, raw in enumerate(lines, start=1):
        line = raw.rstrip("\r\n")
        if not line.strip():
            continue
        fields = line.split("\t")
        if len(fields) != 3 or not fields[0].strip():
            raise ValueError(f"malformed corpus line {line_no}: expected doc_id<TAB>title<TAB>body")
        docs.append((fields[0].strip(), fields[1], fields[2]))
    return CorpusIndex(docs)


def load_corpus(path: str | os.PathLike) -> CorpusIndex:
    with open(path, encoding="utf-8") as fh:
        return parse_corpus_lines(fh)


# -- CDOR cache --------------------------------------------------------------


def _clean(field: str) -> str:
    return " ".join(field.replace("\t", " ").split())


def format_cdor_cache(sets: Iterable[CdorSet]) -> str:
    lines = []
    for cs in sets:
        for r in cs.results:
            lines.append(f"{cs.record_id}\t{r.rank}\t{_clean(r.title)}\t{_clean(r.snippet)}\t{_clean(r.url)}\n")
    return "".join(lines)


class CdorCache:
    """Recorded CDOR sets keyed by record id, replayed without a backend."""

    def __init__(self, sets: Iterable[CdorSet] = ()):
        self._sets = {cs.record_id: cs for cs in sets}

    def get(self, record_id: str) -> CdorSet | None:
        return self._sets.get(record_id)

    def __len__(self):
        return len(self._sets)

    def __iter__(self):
        return iter(self._sets.values())


def parse_cdor_cache(lines: Iterable[str]) -> CdorCache:
    rows: dict[str, list[SearchResult]] = {}
    for line_no, raw in enumerate(lines, start=1):
        line = raw.rstrip("\r\n")
        if not line.strip():
            continue
        fields = line.split("\t")
        if len(fields) != 5:
            raise ValueError(f"malformed CDOR cache line {line_no}: expected 5 fields")
        rid, rank, title, snippet, url = fields
        try:
            rank_no = int(rank)
        except ValueError:
            raise ValueError(f"malformed CDOR cache line {line_no}: bad rank {rank!r}") from None
        rows.setdefault(rid, []).append(SearchResult(rank_no, title, snippet, url))
    sets = []
    for rid, results in rows.items():
        results.sort(key=lambda r: r.rank)
        if [r.rank for r in results] != list(range(1, len(results) + 1)):
            raise ValueError(f"CDOR cache ranks for record {rid!r} are not 1..m")
        sets.append(CdorSet(rid, tuple(results), len(results)))
    return CdorCache(sets)


def load_cdor_cache(path: str | os.PathLike) -> CdorCache:
    with open(path, encoding="utf-8") as fh:
        return parse_cdor_cache(fh)

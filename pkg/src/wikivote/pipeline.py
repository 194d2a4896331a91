"""Glue between extraction, CDOR enrichment and the voting classifier."""
from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Sequence, Union

from .cdor import (
    DEFAULT_CDORS,
    DEFAULT_TOP_K,
    CdorCache,
    CdorSet,
    EmptyResults,
    NoClassifiedConcepts,
    SearchBackend,
    construct_query,
    harvest_enrichment,
    select_cdors,
)
from .classify import (
    DEFAULT_ALPHA,
    EWikiCBag,
    Prediction,
    VotingModel,
    bag_of_record,
    score_record,
    train,
)
from .extract import DEFAULT_RULES, ClassifierRules, Concept, Record, extract_concepts
from .kb import KnowledgeBase

log = logging.getLogger(__name__)

CdorSource = Union[SearchBackend, CdorCache]

MODES = ("rc", "ec")


@dataclass
class Pipeline:
    kb: KnowledgeBase
    rules: ClassifierRules = DEFAULT_RULES
    mode: str = "rc"
    source: CdorSource | None = None
    top_k: int = DEFAULT_TOP_K
    default_cdors: int = DEFAULT_CDORS
    alpha: float = DEFAULT_ALPHA

    def __post_init__(self):
        if self.mode not in MODES:
            raise ValueError(f"mode must be one of {MODES}")
        if not self.top_k >= self.default_cdors >= 1:
            raise ValueError("need top_k >= default_cdors >= 1")
        if not self.alpha > 0:
            raise ValueError("alpha must be positive")

    def raw_concepts(self, record: Record) -> list[Concept]:
        return extract_concepts(record, self.kb, self.rules)

    def collect(self, record: Record, concepts: Sequence[Concept] | None = None) -> CdorSet:
        """CDOR set for one record.

        Raises NoClassifiedConcepts when no query can be built and
        EmptyResults when the source has nothing for the record.
        """
        if self.source is None:
            raise ValueError("no CDOR source configured")
        if concepts is None:
            concepts = self.raw_concepts(record)
        query = construct_query(concepts)
        if isinstance(self.source, CdorCache):
            cached = self.source.get(record.id)
            if cached is None:
                raise EmptyResults(f"no cached CDORs for record {record.id!r}")
            return select_cdors(cached.results, query, record.id, self.default_cdors)
        results = self.source.search(list(query.terms), self.top_k)
        return select_cdors(results, query, record.id, self.default_cdors)

    def concepts(self, record: Record) -> list[Concept]:
        """Raw concepts, plus CDOR enrichment in ``ec`` mode."""
        raw = self.raw_concepts(record)
        if self.mode == "rc" or self.source is None:
            return raw
        try:
            cdors = self.collect(record, raw)
        except (NoClassifiedConcepts, EmptyResults) as exc:
            log.debug("no enrichment for %s: %s", record.id, exc)
            return raw
        seen = {c.surface for c in raw}
        extra = [c for c in harvest_enrichment(cdors, self.kb, self.rules) if c.surface not in seen]
        return raw + extra

    def bag(self, record: Record) -> EWikiCBag:
        return bag_of_record(self.concepts(record))

    def train(self, records: Sequence[Record], categories: Sequence[str]) -> VotingModel:
        unlabeled = [r.id for r in records if r.label is None]
        if unlabeled:
            raise ValueError(f"training records without labels: {unlabeled[:5]}")
        return train(((r.label, self.bag(r)) for r in records), categories, self.alpha)

    def predict(self, records: Sequence[Record], model: VotingModel) -> list[Prediction]:
        return [score_record(self.bag(r), model, r.id, r.label) for r in records]


def categories_of(records: Sequence[Record]) -> list[str]:
    """Sorted distinct labels of a corpus."""
    return sorted({r.label for r in records if r.label is not None})

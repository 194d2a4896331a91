"""Discriminative concept identification for short text records.

Title and tags are tokenized and mapped onto KB concepts with a greedy
longest-match scan.  Ambiguous surfaces are resolved by WikiC overlap with
the record's unambiguous concepts, every concept gets a coarse class from
representative terms found in its WikiCs, and concepts are ranked inside
each class by word count and WikiC count.
"""
from __future__ import annotations

import os
import re
import unicodedata
from dataclasses import dataclass, field
from enum import Enum
from functools import lru_cache
from typing import Iterable, NamedTuple, Sequence

from .kb import KnowledgeBase, Sense


class ConceptClass(str, Enum):
    PERSON = "person"
    LOCATION = "location"
    OTHER = "other"
    UNCLASSIFIED = "unclassified"


CLASS_ORDER = (
    ConceptClass.PERSON,
    ConceptClass.LOCATION,
    ConceptClass.OTHER,
    ConceptClass.UNCLASSIFIED,
)


@dataclass(frozen=True)
class Record:
    id: str
    title: str = ""
    tags: tuple[str, ...] = ()
    label: str | None = None

    def __post_init__(self):
        if not self.id:
            raise ValueError("record id must be non-empty")
        object.__setattr__(self, "tags", tuple(self.tags))
        if any(not t for t in self.tags):
            raise ValueError(f"record {self.id!r} has an empty tag")


@dataclass(frozen=True)
class Concept:
    surface: str
    sense: Sense
    concept_class: ConceptClass = ConceptClass.UNCLASSIFIED

    @property
    def word_count(self) -> int:
        return len(self.surface.split(" "))

    @property
    def wikic_count(self) -> int:
        return len(self.sense.wikics)


def _term_regex(term: str) -> str:
    words = [re.escape(w) for w in term.split(" ")]
    return r"(?<!\w)" + r"\s+".join(words) + r"(?!\w)"


def _alternation(terms: Sequence[str]) -> re.Pattern | None:
    if not terms:
        return None
    # longest first so a phrase is not shadowed by one of its words
    ordered = sorted(set(terms), key=lambda t: (-len(t), t))
    return re.compile("|".join(_term_regex(t) for t in ordered), re.IGNORECASE)


@lru_cache(maxsize=4096)
def phrase_pattern(term: str) -> re.Pattern:
    """Case-insensitive word-boundary pattern for a (possibly multi-word) term."""
    return re.compile(_term_regex(" ".join(term.lower().split())), re.IGNORECASE)


# Representative WikiC terms per class.  "incidents" and "novels" are two
# separate terms.
DEFAULT_PERSON_TERMS = ("births", "characters")
DEFAULT_LOCATION_TERMS = (
    "cities", "countries", "geography of", "states of", "regions of",
    "provinces of", "museums in", "landmarks in", "capitals in", "islands of",
    "boroughs of", "stadiums", "airports", "locations", "geography stubs",
    "places",
)
DEFAULT_OTHER_TERMS = (
    "companies", "vehicles", "devices", "established in", "games",
    "establishments", "venues", "inc.", "songs", "films", "services",
    "television series", "websites", "cartoons", "books", "incidents",
    "novels", "albums", "agents", "teams", "brands", "cameras", "shows",
    "magazines", "awards", "graphics", "inventions", "drugs", "sports",
    "introductions", "genres", "occupations", "foods", "articles",
)


@dataclass(frozen=True)
class ClassifierRules:
    person_terms: tuple[str, ...] = DEFAULT_PERSON_TERMS
    location_terms: tuple[str, ...] = DEFAULT_LOCATION_TERMS
    other_terms: tuple[str, ...] = DEFAULT_OTHER_TERMS
    _patterns: dict = field(default=None, init=False, repr=False, compare=False, hash=False)

    def __post_init__(self):
        for name in ("person_terms", "location_terms", "other_terms"):
            terms = tuple(" ".join(t.lower().split()) for t in getattr(self, name))
            object.__setattr__(self, name, tuple(t for t in terms if t))
        object.__setattr__(
            self,
            "_patterns",
            {
                ConceptClass.PERSON: _alternation(self.person_terms),
                ConceptClass.LOCATION: _alternation(self.location_terms),
                ConceptClass.OTHER: _alternation(self.other_terms),
            },
        )

    def pattern(self, cls: ConceptClass) -> re.Pattern | None:
        return self._patterns[cls]


DEFAULT_RULES = ClassifierRules()


class RulesError(ValueError):
    pass


_RULE_KEYS = {
    "person": "person_terms",
    "location": "location_terms",
    "other": "other_terms",
}


def load_rules(path: str | os.PathLike | None) -> ClassifierRules:
    """Read a rules override file; ``None`` gives the built-in defaults.

    The file holds three lines ``person: a, b``, ``location: ...`` and
    ``other: ...``.
    """
    if path is None:
        return DEFAULT_RULES
    found: dict[str, list[str]] = {}
    with open(path, encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, start=1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            key, sep, rest = line.partition(":")
            key = key.strip().lower()
            if not sep or key not in _RULE_KEYS:
                raise RulesError(f"{path}:{line_no}: expected 'person:', 'location:' or 'other:'")
            if key in found:
                raise RulesError(f"{path}:{line_no}: duplicate '{key}:' line")
            found[key] = [t.strip() for t in rest.split(",") if t.strip()]
    missing = sorted(set(_RULE_KEYS) - set(found))
    if missing:
        raise RulesError(f"{path}: missing rule lines for {', '.join(missing)}")
    return ClassifierRules(**{_RULE_KEYS[k]: tuple(v) for k, v in found.items()})


def _is_punct(ch: str) -> bool:
    return unicodedata.category(ch).startswith("P")


def _strip_punct(token: str) -> str:
    start, end = 0, len(token)
    while start < end and _is_punct(token[start]):
        start += 1
    while end > start and _is_punct(token[end - 1]):
        end -= 1
    return token[start:end]


def tokenize(text: str) -> list[str]:
    """Whitespace split with surrounding punctuation removed ("MD-11" survives)."""
    out = []
    for raw in text.split():
        tok = _strip_punct(raw)
        if tok:
            out.append(tok)
    return out


class Match(NamedTuple):
    surface: str
    start: int
    end: int


def longest_match(tokens: Sequence[str], kb: KnowledgeBase) -> list[Match]:
    """Greedy left-to-right longest-match of token windows against KB keys.

    Spans never overlap.  Tokens not covered by any key are skipped.
    """
    words = [t.lower() for t in tokens]
    n = len(words)
    limit = kb.max_concept_words
    concepts = kb.concepts
    out: list[Match] = []
    i = 0
    while i < n:
        best = None
        window = ""
        for j in range(i, min(n, i + limit)):
            window = words[j] if j == i else f"{window} {words[j]}"
            if window in concepts:
                best = j + 1
            if not kb.is_prefix(window):
                break
        if best is None:
            i += 1
        else:
            out.append(Match(" ".join(words[i:best]), i, best))
            i = best
    return out


def disambiguate(surface: str, senses: Sequence[Sense], context: Iterable[Concept]) -> Sense:
    """Pick the sense sharing the most WikiCs with the context concepts.

    Ties go to the sense with more WikiCs, then to the smaller title.
    """
    if not senses:
        raise ValueError(f"no senses to choose from for {surface!r}")
    pool: set[str] = set()
    for c in context:
        pool |= c.sense.wikics
    return min(
        senses,
        key=lambda s: (-len(s.wikics & pool), -len(s.wikics), s.canonical_title),
    )


def classify_sense(sense: Sense, rules: ClassifierRules = DEFAULT_RULES) -> ConceptClass:
    wikics = sorted(sense.wikics)
    for cls in (ConceptClass.PERSON, ConceptClass.LOCATION, ConceptClass.OTHER):
        pat = rules.pattern(cls)
        if pat is not None and any(pat.search(w) for w in wikics):
            return cls
    return ConceptClass.UNCLASSIFIED


def classify_concept(concept: Concept, rules: ClassifierRules = DEFAULT_RULES) -> ConceptClass:
    return classify_sense(concept.sense, rules)


def rank_key(concept: Concept):
    return (-concept.word_count, -concept.wikic_count, concept.surface)


def rank_within_class(concepts: Iterable[Concept]) -> list[Concept]:
    return sorted(concepts, key=rank_key)


def match_text(text: str, kb: KnowledgeBase) -> list[str]:
    """Matched surfaces of one text field, in order of appearance."""
    return [m.surface for m in longest_match(tokenize(text), kb)]


def resolve_surfaces(
    surfaces: Iterable[str],
    kb: KnowledgeBase,
    rules: ClassifierRules = DEFAULT_RULES,
) -> list[Concept]:
    """Dedupe surfaces, resolve senses and classify, keeping first-occurrence order.

    Unambiguous surfaces are resolved first and form the context against
    which ambiguous ones are disambiguated.
    """
    unique = list(dict.fromkeys(surfaces))
    senses = {s: kb.concepts[s] for s in unique}
    resolved: dict[str, Sense] = {}
    context = []
    for s in unique:
        if len(senses[s]) == 1:
            resolved[s] = senses[s][0]
            context.append(Concept(s, resolved[s]))
    for s in unique:
        if s not in resolved:
            resolved[s] = disambiguate(s, senses[s], context)
    return [Concept(s, resolved[s], classify_sense(resolved[s], rules)) for s in unique]


def order_by_class(concepts: Iterable[Concept]) -> list[Concept]:
    """Class blocks (person, location, other, unclassified), ranked inside each."""
    blocks: dict[ConceptClass, list[Concept]] = {c: [] for c in CLASS_ORDER}
    for c in concepts:
        blocks[c.concept_class].append(c)
    return [c for cls in CLASS_ORDER for c in rank_within_class(blocks[cls])]


def extract_concepts(
    record: Record,
    kb: KnowledgeBase,
    rules: ClassifierRules = DEFAULT_RULES,
) -> list[Concept]:
    # each field is matched on its own; no concept spans title and a tag
    surfaces: list[str] = []
    for text in (record.title, *record.tags):
        surfaces.extend(match_text(text, kb))
    return order_by_class(resolve_surfaces(surfaces, kb, rules))


class MalformedRecord(ValueError):
    def __init__(self, line_no: int, reason: str):
        self.line_no = line_no
        super().__init__(f"malformed record line {line_no}: {reason}")


def parse_records(lines: Iterable[str]) -> list[Record]:
    """Parse ``id<TAB>label-or-dash<TAB>title<TAB>tag1|tag2`` lines."""
    records = []
    seen = set()
    for line_no, raw in enumerate(lines, start=1):
        line = raw.rstrip("\r\n")
        if not line.strip() or line.startswith("#"):
            continue
        fields = line.split("\t")
        if len(fields) != 4:
            raise MalformedRecord(line_no, f"expected 4 tab-separated fields, got {len(fields)}")
        rid, label, title, tags = fields
        rid = rid.strip()
        if not rid:
            raise MalformedRecord(line_no, "empty id")
        if rid in seen:
            raise MalformedRecord(line_no, f"duplicate id {rid!r}")
        seen.add(rid)
        label = label.strip()
        records.append(
            Record(
                id=rid,
                title=title,
                tags=tuple(t.strip() for t in tags.split("|") if t.strip()),
                label=None if label in ("", "-") else label,
            )
        )
    return records


def load_records(path: str | os.PathLike) -> list[Record]:
    with open(path, encoding="utf-8") as fh:
        return parse_records(fh)


def format_record(record: Record) -> str:
    return f"{record.id}\t{record.label or '-'}\t{record.title}\t{'|'.join(record.tags)}\n"

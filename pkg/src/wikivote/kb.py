"""In-memory Wikipedia concept dictionary.

The flat-file format is one sense per line::

    surface<TAB>canonical_title<TAB>WikiC one|WikiC two|...

Lines starting with ``#`` and blank lines are ignored.  Several lines may
share a surface form; each distinct canonical title becomes one sense, and
repeated (surface, title) pairs are merged by unioning their WikiCs.
"""
from __future__ import annotations

import os
from dataclasses import dataclass
from types import MappingProxyType
from typing import Iterable, Mapping


class KbError(ValueError):
    pass


class MalformedLine(KbError):
    def __init__(self, line_no: int, reason: str = ""):
        self.line_no = line_no
        msg = f"malformed KB line {line_no}"
        if reason:
            msg += f": {reason}"
        super().__init__(msg)


class EmptyKb(KbError):
    def __init__(self, msg: str = "knowledge base contains no concepts"):
        super().__init__(msg)


def normalize_surface(text: str) -> str:
    """Lowercase and collapse runs of whitespace to single spaces."""
    return " ".join(text.lower().split())


@dataclass(frozen=True)
class Sense:
    canonical_title: str
    wikics: frozenset[str] = frozenset()

    def __post_init__(self):
        if not self.canonical_title:
            raise ValueError("canonical_title must be non-empty")
        if not isinstance(self.wikics, frozenset):
            object.__setattr__(self, "wikics", frozenset(self.wikics))


class KnowledgeBase:
    """Immutable surface form -> senses dictionary.

    Build one with :func:`load_kb` or :meth:`from_entries`.  Lookups
    normalize their argument, so ``kb.lookup("EXPO  2010")`` and
    ``kb.lookup("expo 2010")`` agree.
    """

    __slots__ = ("_concepts", "_prefixes", "max_concept_words")

    def __init__(self, concepts: Mapping[str, Iterable[Sense]]):
        table: dict[str, tuple[Sense, ...]] = {}
        prefixes: set[str] = set()
        longest = 0
        for key, senses in concepts.items():
            if not key or key != normalize_surface(key):
                raise KbError(f"surface key is not normalized: {key!r}")
            senses = tuple(senses)
            if not senses:
                raise KbError(f"concept {key!r} has no senses")
            table[key] = senses
            words = key.split(" ")
            longest = max(longest, len(words))
            for i in range(1, len(words)):
                prefixes.add(" ".join(words[:i]))
        if not table:
            raise EmptyKb()
        self._concepts = MappingProxyType(table)
        # proper word-prefixes of keys, lets the matcher stop extending early
        self._prefixes = frozenset(prefixes)
        self.max_concept_words = longest

    @classmethod
    def from_entries(cls, entries: Iterable[tuple[str, str, Iterable[str]]]) -> "KnowledgeBase":
        """Build from ``(surface, canonical_title, wikics)`` triples, merging duplicates."""
        merged: dict[str, dict[str, list[str]]] = {}
        for surface, title, wikics in entries:
            key = normalize_surface(surface)
            if not key:
                raise KbError("empty surface form")
            slot = merged.setdefault(key, {}).setdefault(title, [])
            for w in wikics:
                if w not in slot:
                    slot.append(w)
        return cls(
            {
                key: [Sense(title, frozenset(ws)) for title, ws in by_title.items()]
                for key, by_title in merged.items()
            }
        )

    @property
    def concepts(self) -> Mapping[str, tuple[Sense, ...]]:
        return self._concepts

    def lookup(self, surface: str) -> list[Sense]:
        return list(self._concepts.get(normalize_surface(surface), ()))

    def is_prefix(self, normalized: str) -> bool:
        """True if ``normalized`` is a proper word-prefix of some concept key."""
        return normalized in self._prefixes

    def __contains__(self, surface: str) -> bool:
        return normalize_surface(surface) in self._concepts

    def __len__(self) -> int:
        return len(self._concepts)

    def __iter__(self):
        return iter(self._concepts)

    def __eq__(self, other):
        if not isinstance(other, KnowledgeBase):
            return NotImplemented
        return {k: set(v) for k, v in self._concepts.items()} == {
            k: set(v) for k, v in other._concepts.items()
        }

    def __repr__(self):
        return f"KnowledgeBase({len(self)} concepts, max_concept_words={self.max_concept_words})"


def lookup(kb: KnowledgeBase, surface: str) -> list[Sense]:
    return kb.lookup(surface)


def parse_kb_lines(lines: Iterable[str]) -> KnowledgeBase:
    entries = []
    for line_no, raw in enumerate(lines, start=1):
        line = raw.rstrip("\r\n")
        if not line.strip() or line.lstrip().startswith("#"):
            continue
        fields = line.split("\t")
        if len(fields) != 3:
            raise MalformedLine(line_no, f"expected 3 tab-separated fields, got {len(fields)}")
        surface, title, cats = fields
        if not normalize_surface(surface):
            raise MalformedLine(line_no, "empty surface form")
        title = title.strip()
        if not title:
            raise MalformedLine(line_no, "empty canonical title")
        wikics = [c.strip() for c in cats.split("|") if c.strip()]
        entries.append((surface, title, wikics))
    if not entries:
        raise EmptyKb()
    return KnowledgeBase.from_entries(entries)


def load_kb(path: str | os.PathLike) -> KnowledgeBase:
    with open(path, encoding="utf-8") as fh:
        return parse_kb_lines(fh)


def serialize_kb(kb: KnowledgeBase) -> str:
    """Canonical text form: keys sorted, senses sorted by title, WikiCs sorted."""
    out = []
    for key in sorted(kb.concepts):
        for sense in sorted(kb.concepts[key], key=lambda s: s.canonical_title):
            out.append(f"{key}\t{sense.canonical_title}\t{'|'.join(sorted(sense.wikics))}\n")
    return "".join(out)

"""NE triples, generalized terms, and document/query expansion."""

from __future__ import annotations

import enum
from collections import Counter
from dataclasses import dataclass, field, replace
from itertools import groupby
from typing import Iterable

from .annotate import (
    EntityAnnotation,
    InterrogativeRules,
    QueryAnalysis,
    RelationDictionary,
    analyze_query,
)
from .kb import KnowledgeBase
from .text import name_key

WILDCARD = "*"


@dataclass(frozen=True, order=True)
class NETriple:
    """``(name/class/id)`` pattern; ``None`` in a slot is the wildcard."""

    name: str | None = None
    class_id: str | None = None
    entity_id: str | None = None

    def __post_init__(self):
        if self.name is None and self.class_id is None and self.entity_id is None:
            raise ValueError("an NE triple needs at least one non-wildcard slot")

    @property
    def key(self) -> str:
        return "ne:{}|{}|{}".format(
            self.name if self.name is not None else WILDCARD,
            self.class_id if self.class_id is not None else WILDCARD,
            self.entity_id if self.entity_id is not None else WILDCARD,
        )

    @classmethod
    def from_key(cls, key: str) -> "NETriple":
        if not key.startswith("ne:"):
            raise ValueError(f"not a triple key: {key!r}")
        parts = key[3:].split("|")
        if len(parts) != 3:
            raise ValueError(f"malformed triple key: {key!r}")
        return cls(*(None if p == WILDCARD else p for p in parts))

    def __str__(self) -> str:
        return self.key[3:].replace("|", "/")


@dataclass(frozen=True, order=True)
class GeneralizedTerm:
    kind: str
    keyword: str | None = None
    triple: NETriple | None = None

    def __post_init__(self):
        if self.kind == "keyword":
            ok = self.keyword is not None and self.triple is None
        elif self.kind == "triple":
            ok = self.triple is not None and self.keyword is None
        else:
            ok = False
        if not ok:
            raise ValueError(f"inconsistent generalized term: {self!r}")

    @classmethod
    def kw(cls, token: str) -> "GeneralizedTerm":
        return cls("keyword", keyword=token.casefold())

    @classmethod
    def ne(cls, name: str | None = None, class_id: str | None = None,
           entity_id: str | None = None) -> "GeneralizedTerm":
        return cls("triple", triple=NETriple(name, class_id, entity_id))

    @classmethod
    def of(cls, triple: NETriple) -> "GeneralizedTerm":
        return cls("triple", triple=triple)

    @classmethod
    def from_key(cls, key: str) -> "GeneralizedTerm":
        if key.startswith("kw:"):
            return cls("keyword", keyword=key[3:])
        return cls("triple", triple=NETriple.from_key(key))

    @property
    def key(self) -> str:
        return f"kw:{self.keyword}" if self.kind == "keyword" else self.triple.key  # type: ignore[union-attr]

    def __str__(self) -> str:
        return self.key


def document_triples(a: EntityAnnotation, kb: KnowledgeBase,
                     max_super_depth: int | None = None) -> frozenset[NETriple]:
    """Every implied triple of one document entity annotation.

    Instantiates the nine templates ``(n/*/*) (*/c/*) (n/c/*) (alias/*/*)
    (*/super/*) (n/super/*) (alias/c/*) (alias/super/*) (*/*/id)`` with whatever
    of name, class and identifier the annotation carries.
    """
    n, c, eid = a.name, a.class_id, a.entity_id
    aliases: set[str] = set()
    if eid is not None:
        aliases = {name_key(x) for x in kb.names_of(eid)}
        aliases.discard(n)  # type: ignore[arg-type]
    supers = kb.super_classes(c, max_super_depth) if c is not None else frozenset()

    out: set[NETriple] = set()
    if n is not None:
        out.add(NETriple(n, None, None))
        if c is not None:
            out.add(NETriple(n, c, None))
        out.update(NETriple(n, s, None) for s in supers)
    if c is not None:
        out.add(NETriple(None, c, None))
    out.update(NETriple(None, s, None) for s in supers)
    for al in aliases:
        out.add(NETriple(al, None, None))
        if c is not None:
            out.add(NETriple(al, c, None))
        out.update(NETriple(al, s, None) for s in supers)
    if eid is not None:
        out.add(NETriple(None, None, eid))
    return frozenset(out)


def query_triple(a: EntityAnnotation) -> NETriple:
    """The most specific available triple: (*/*/id), then (n/c/*), (n/*/*), (*/c/*)."""
    if a.entity_id is not None:
        return NETriple(None, None, a.entity_id)
    if a.name is not None and a.class_id is not None:
        return NETriple(a.name, a.class_id, None)
    if a.name is not None:
        return NETriple(a.name, None, None)
    if a.class_id is not None:
        return NETriple(None, a.class_id, None)
    raise ValueError("annotation carries no features")


def _by_span(entities: Iterable[EntityAnnotation]) -> list[list[EntityAnnotation]]:
    return [list(g) for _, g in groupby(entities, key=lambda a: a.span)]


def query_terms(analysis: QueryAnalysis) -> Counter[GeneralizedTerm]:
    """Term multiset of an analyzed query, without related-entity expansion."""
    terms: Counter[GeneralizedTerm] = Counter()
    if analysis.interrogative_class is not None:
        terms[GeneralizedTerm.ne(class_id=analysis.interrogative_class)] += 1
    for group in _by_span(analysis.entities):
        if len(group) == 1 and not group[0].ambiguous:
            terms[GeneralizedTerm.of(query_triple(group[0]))] += 1
        else:
            # Ambiguous mention: no identifier, one (n/c/*) per distinct candidate.
            for t in sorted({query_triple(replace(a, entity_id=None)) for a in group}):
                terms[GeneralizedTerm.of(t)] += 1
    for tok in analysis.keywords:
        terms[GeneralizedTerm.kw(tok.text)] += 1
    return terms


class ExpandStatus(str, enum.Enum):
    EXPANDED = "EXPANDED"
    NO_RELATION_PHRASE = "NO_RELATION_PHRASE"
    MULTIPLE_RELATIONS = "MULTIPLE_RELATIONS"
    NO_RELATION_MAPPING = "NO_RELATION_MAPPING"
    NO_ENTITY = "NO_ENTITY"
    NO_FACTS = "NO_FACTS"


@dataclass
class ExpandedQuery:
    original_text: str
    terms: Counter[GeneralizedTerm]
    added_names: list[str]
    status: ExpandStatus
    analysis: QueryAnalysis
    relation_id: str | None = None
    base_terms: Counter[GeneralizedTerm] = field(default_factory=Counter)

    @property
    def expanded_text(self) -> str:
        if not self.added_names:
            return self.original_text
        return self.original_text + " ; " + " ; ".join(self.added_names)


def expand_query(
    q_text: str,
    kb: KnowledgeBase,
    rel_dict: RelationDictionary,
    rules: InterrogativeRules | None,
    stoplist: frozenset[str],
) -> ExpandedQuery:
    """Add the names of entities related to the query's entities via its single relation.

    Failure reasons are reported through ``status``; the query's own terms are
    always kept. Each added name is annotated as a separate segment so that it
    cannot merge with neighbouring query words into a different KB name.
    """
    analysis = analyze_query(q_text, kb, rel_dict, rules, stoplist)
    base = query_terms(analysis)

    def result(status: ExpandStatus, rel: str | None = None,
               names: list[str] | None = None, terms=None) -> ExpandedQuery:
        return ExpandedQuery(q_text, terms if terms is not None else Counter(base),
                             names or [], status, analysis, rel, Counter(base))

    mentions = analysis.relations
    if not mentions:
        return result(ExpandStatus.NO_RELATION_PHRASE)
    if len(mentions) > 1:
        return result(ExpandStatus.MULTIPLE_RELATIONS)
    rel = mentions[0].relation_id
    if rel is None or rel not in kb.relation_types:
        return result(ExpandStatus.NO_RELATION_MAPPING)

    anchors: list[str] = []
    for group in _by_span(analysis.entities):
        if len(group) == 1 and not group[0].ambiguous and group[0].entity_id not in anchors:
            anchors.append(group[0].entity_id)  # type: ignore[arg-type]
    if not anchors:
        return result(ExpandStatus.NO_ENTITY, rel)

    names: list[str] = []
    for eid in anchors:
        for other in sorted(kb.related_entities(eid, rel)):
            name = kb.entities[other].canonical_name
            if name not in names:
                names.append(name)
    if not names:
        return result(ExpandStatus.NO_FACTS, rel)

    terms = Counter(base)
    for name in names:
        seg = analyze_query(name, kb, None, None, stoplist)
        terms.update(query_terms(seg))
    return result(ExpandStatus.EXPANDED, rel, names, terms)

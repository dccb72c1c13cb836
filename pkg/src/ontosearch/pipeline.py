"""Shared document/query processing for the three retrieval modes."""

from __future__ import annotations

import enum
from collections import Counter
from dataclasses import dataclass

from .annotate import (
    InterrogativeRules,
    RelationDictionary,
    analyze_document,
    analyze_query,
    load_stoplist,
)
from .expand import ExpandedQuery, GeneralizedTerm, document_triples, expand_query, query_terms
from .kb import KnowledgeBase


class Mode(str, enum.Enum):
    KEYWORD = "keyword"
    NE_KW = "ne_kw"
    SEMANTIC = "semantic"

    @property
    def uses_entities(self) -> bool:
        return self is not Mode.KEYWORD


@dataclass
class Analyzer:
    """Turns raw text into generalized-term multisets for one mode."""

    mode: Mode = Mode.KEYWORD
    kb: KnowledgeBase | None = None
    stoplist: frozenset[str] | None = None
    relations: RelationDictionary | None = None
    rules: InterrogativeRules | None = None
    keywords_inside_entities: bool = False
    max_super_depth: int | None = None

    def __post_init__(self):
        self.mode = Mode(self.mode)
        if self.stoplist is None:
            self.stoplist = load_stoplist()
        if self.mode.uses_entities and self.kb is None:
            raise ValueError(f"mode {self.mode.value} requires a knowledge base")
        if self.mode is Mode.SEMANTIC and self.relations is None:
            raise ValueError("semantic mode requires a relation-phrase dictionary")

    def document_terms(self, text: str) -> tuple[Counter[str], int]:
        """Term-key multiset of a document and the number of entity annotations found."""
        kb = self.kb if self.mode.uses_entities else None
        doc = analyze_document(text, kb, self.stoplist, self.keywords_inside_entities)
        terms: Counter[str] = Counter(f"kw:{t.norm}" for t in doc.keywords)
        for mention in doc.mentions:
            implied: set[str] = set()
            for a in mention:
                implied.update(t.key for t in document_triples(a, kb, self.max_super_depth))
            terms.update(implied)
        return terms, len(doc.entities)

    def query(self, text: str) -> tuple[Counter[GeneralizedTerm], ExpandedQuery | None]:
        if self.mode is Mode.SEMANTIC:
            eq = expand_query(text, self.kb, self.relations, self.rules, self.stoplist)
            return eq.terms, eq
        if self.mode is Mode.NE_KW:
            analysis = analyze_query(text, self.kb, None, self.rules, self.stoplist)
        else:
            analysis = analyze_query(text, None, None, None, self.stoplist)
        return query_terms(analysis), None

    def query_terms(self, text: str) -> Counter[GeneralizedTerm]:
        return self.query(text)[0]

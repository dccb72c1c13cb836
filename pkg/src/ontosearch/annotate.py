"""Tokenization, stop words, gazetteer entity recognition, relation phrases
and interrogative-word mapping."""

from __future__ import annotations

import os
from dataclasses import dataclass, field
from importlib import resources
from typing import Iterable, Sequence

from .kb import KnowledgeBase
from .text import Token, name_key, tokenize

__all__ = [
    "Token", "tokenize", "EntityAnnotation", "RelationMention", "RelationDictionary",
    "InterrogativeRules", "QueryAnalysis", "DocumentAnalysis", "load_stoplist",
    "load_relation_dict", "load_interrogative_rules", "remove_stopwords",
    "recognize_entities", "recognize_relation_phrases", "map_relation_phrase",
    "map_interrogative", "analyze_query", "analyze_document",
]

UNMAPPED = "-"


def _data_lines(path: str | os.PathLike | None, default: str) -> list[tuple[int, str]]:
    if path is None:
        text = resources.files("ontosearch.data").joinpath(default).read_text(encoding="utf-8")
    else:
        with open(path, encoding="utf-8-sig") as fh:
            text = fh.read()
    out = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        if line.strip() and not line.startswith("#"):
            out.append((lineno, line))
    return out


def load_stoplist(path: str | os.PathLike | None = None) -> frozenset[str]:
    """One word per line; ``None`` loads the bundled 33-word English list."""
    return frozenset(line.strip().casefold() for _, line in _data_lines(path, "stopwords.txt"))


@dataclass(frozen=True)
class EntityAnnotation:
    span: tuple[int, int]
    surface: str
    name: str | None
    class_id: str | None = None
    entity_id: str | None = None
    ambiguous: bool = False

    def __post_init__(self):
        if self.entity_id is not None and self.class_id is None:
            raise ValueError("an identified entity must carry its class")
        if self.name is None and self.class_id is None:
            raise ValueError("annotation needs at least a name or a class")


@dataclass(frozen=True)
class RelationMention:
    span: tuple[int, int]
    phrase: str
    relation_id: str | None
    token_range: tuple[int, int] = (0, 0)


@dataclass
class RelationDictionary:
    """Manually built phrase -> relation mapping, matched on case-folded tokens."""

    entries: dict[tuple[str, ...], tuple[str, str | None]] = field(default_factory=dict)

    @classmethod
    def from_pairs(cls, pairs: Iterable[tuple[str, str | None]]) -> "RelationDictionary":
        d = cls()
        for phrase, rel in pairs:
            key = tuple(t.norm for t in tokenize(phrase))
            if not key:
                raise ValueError(f"relation phrase without words: {phrase!r}")
            d.entries[key] = (phrase.strip(), None if rel in (None, "", UNMAPPED) else rel)
        return d

    @property
    def max_len(self) -> int:
        return max((len(k) for k in self.entries), default=0)

    def lookup(self, key: tuple[str, ...]) -> tuple[str, str | None] | None:
        return self.entries.get(key)


def load_relation_dict(path: str | os.PathLike | None = None) -> RelationDictionary:
    pairs = []
    for lineno, line in _data_lines(path, "relations.tsv"):
        cols = line.split("\t")
        if len(cols) != 2:
            raise ValueError(f"relation dictionary line {lineno}: expected phrase<TAB>relation_id")
        pairs.append((cols[0], cols[1].strip()))
    return RelationDictionary.from_pairs(pairs)


@dataclass(frozen=True)
class InterrogativeRule:
    word: str
    triggers: tuple[tuple[str, ...], ...]
    class_id: str


@dataclass
class InterrogativeRules:
    rules: list[InterrogativeRule] = field(default_factory=list)

    @property
    def words(self) -> frozenset[str]:
        return frozenset(r.word for r in self.rules)


def load_interrogative_rules(path: str | os.PathLike | None = None) -> InterrogativeRules:
    rules = []
    for lineno, line in _data_lines(path, "interrogatives.tsv"):
        cols = line.split("\t")
        if len(cols) != 3 or not cols[0].strip() or not cols[2].strip():
            raise ValueError(
                f"interrogative rules line {lineno}: expected word<TAB>triggers<TAB>class_id")
        triggers = tuple(
            tuple(t.norm for t in tokenize(trig)) for trig in cols[1].split(",") if trig.strip())
        rules.append(InterrogativeRule(cols[0].strip().casefold(), triggers, cols[2].strip()))
    return InterrogativeRules(rules)


def remove_stopwords(tokens: Sequence[Token], stoplist: Iterable[str]) -> list[Token]:
    stop = stoplist if isinstance(stoplist, (set, frozenset)) else frozenset(stoplist)
    return [t for t in tokens if t.norm not in stop]


def _match_entities(text: str, tokens: Sequence[Token], kb: KnowledgeBase
                    ) -> list[tuple[int, int, list[EntityAnnotation]]]:
    norms = [t.norm for t in tokens]
    out = []
    i, n, longest = 0, len(tokens), kb.max_name_tokens
    while i < n:
        for length in range(min(longest, n - i), 0, -1):
            ids = kb.entities_by_tokens(tuple(norms[i:i + length]))
            if ids:
                start, end = tokens[i].start, tokens[i + length - 1].end
                surface = text[start:end]
                ambiguous = len(ids) > 1
                anns = [
                    EntityAnnotation((start, end), surface, name_key(surface),
                                     kb.entities[eid].class_id, eid, ambiguous)
                    for eid in sorted(ids)
                ]
                out.append((i, i + length, anns))
                i += length
                break
        else:
            i += 1
    return out


def recognize_entities(text: str, kb: KnowledgeBase) -> list[EntityAnnotation]:
    """Left-to-right, longest-match gazetteer lookup of every KB name in ``text``.

    Ambiguous names yield one annotation per candidate entity, all sharing a span.
    """
    return [a for _, _, anns in _match_entities(text, tokenize(text), kb) for a in anns]


def recognize_relation_phrases(
    tokens: Sequence[Token],
    rel_dict: RelationDictionary,
    masked: Iterable[int] = (),
) -> list[RelationMention]:
    """Longest-match dictionary phrases over ``tokens``; masked token indices never match."""
    blocked = frozenset(masked)
    norms = [t.norm for t in tokens]
    out = []
    i, n, longest = 0, len(tokens), rel_dict.max_len
    while i < n:
        if i in blocked:
            i += 1
            continue
        for length in range(min(longest, n - i), 0, -1):
            if any(j in blocked for j in range(i, i + length)):
                continue
            hit = rel_dict.lookup(tuple(norms[i:i + length]))
            if hit is not None:
                phrase, rel = hit
                out.append(RelationMention(
                    (tokens[i].start, tokens[i + length - 1].end), phrase, rel, (i, i + length)))
                i += length
                break
        else:
            i += 1
    return out


def map_relation_phrase(phrase: str, rel_dict: RelationDictionary) -> str | None:
    hit = rel_dict.lookup(tuple(t.norm for t in tokenize(phrase)))
    return None if hit is None else hit[1]


def _contains(norms: Sequence[str], seq: tuple[str, ...]) -> bool:
    k = len(seq)
    return any(tuple(norms[i:i + k]) == seq for i in range(len(norms) - k + 1))


def map_interrogative(tokens: Sequence[Token], rules: InterrogativeRules) -> str | None:
    """Class implied by a leading interrogative word, or ``None``.

    Rules for the word are tried in file order; the first whose trigger phrases all
    occur in the query wins, otherwise the word's default (trigger-less) rule applies.
    """
    if not tokens:
        return None
    word = tokens[0].norm
    norms = [t.norm for t in tokens]
    default = None
    for rule in rules.rules:
        if rule.word != word:
            continue
        if not rule.triggers:
            if default is None:
                default = rule.class_id
        elif all(_contains(norms, trig) for trig in rule.triggers):
            return rule.class_id
    return default


@dataclass
class QueryAnalysis:
    text: str
    tokens: list[Token]
    entities: list[EntityAnnotation]
    relations: list[RelationMention]
    interrogative_class: str | None
    keywords: list[Token]
    roles: list[str]


@dataclass
class DocumentAnalysis:
    tokens: list[Token]
    entities: list[EntityAnnotation]
    keywords: list[Token]
    # One list of candidate annotations per recognized mention.
    mentions: list[list[EntityAnnotation]] = field(default_factory=list)


def analyze_document(
    text: str,
    kb: KnowledgeBase | None,
    stoplist: frozenset[str],
    keywords_inside_entities: bool = False,
) -> DocumentAnalysis:
    tokens = tokenize(text)
    if kb is None:
        return DocumentAnalysis(tokens, [], remove_stopwords(tokens, stoplist))
    matches = _match_entities(text, tokens, kb)
    inside = {j for lo, hi, _ in matches for j in range(lo, hi)}
    residual = tokens if keywords_inside_entities else [
        t for j, t in enumerate(tokens) if j not in inside]
    mentions = [anns for _, _, anns in matches]
    return DocumentAnalysis(
        tokens,
        [a for anns in mentions for a in anns],
        remove_stopwords(residual, stoplist),
        mentions,
    )


def analyze_query(
    text: str,
    kb: KnowledgeBase | None,
    rel_dict: RelationDictionary | None,
    rules: InterrogativeRules | None,
    stoplist: frozenset[str],
) -> QueryAnalysis:
    """Account for every query token as entity, interrogative, relation, stop word or keyword."""
    tokens = tokenize(text)
    roles = [""] * len(tokens)
    entities: list[EntityAnnotation] = []
    if kb is not None:
        for lo, hi, anns in _match_entities(text, tokens, kb):
            entities.extend(anns)
            for j in range(lo, hi):
                roles[j] = "entity"

    iclass = None
    if rules is not None and tokens and not roles[0]:
        iclass = map_interrogative(tokens, rules)
        if iclass is not None:
            roles[0] = "interrogative"

    entity_idx = [j for j, r in enumerate(roles) if r == "entity"]
    relations = (recognize_relation_phrases(tokens, rel_dict, entity_idx)
                 if rel_dict is not None else [])
    in_phrase = {j for m in relations for j in range(*m.token_range)}

    keywords = []
    for j, tok in enumerate(tokens):
        if roles[j]:
            continue
        if tok.norm in stoplist:
            roles[j] = "stopword"
        else:
            roles[j] = "relation" if j in in_phrase else "keyword"
            keywords.append(tok)
    return QueryAnalysis(text, tokens, entities, relations, iclass, keywords, roles)

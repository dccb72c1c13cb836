"""Knowledge base: class hierarchy, entity descriptions and relation facts.

The on-disk format is a single UTF-8, tab-separated file with four sections::

    #CLASSES
    class_id <TAB> label <TAB> parent_id[,parent_id...]
    #ENTITIES
    entity_id <TAB> class_id <TAB> canonical_name <TAB> alias[|alias...]
    #RELATIONS
    relation_id <TAB> label
    #FACTS
    subject_id <TAB> relation_id <TAB> object_id

Headers must appear in that order. Blank lines are ignored, and so are
comment lines: ``#`` followed by whitespace or another ``#`` (or anything
before the first header). Identifiers may themselves start with ``#``, as in
``#Company_123``.
"""

from __future__ import annotations

import os
from collections import defaultdict
from dataclasses import dataclass, field
from types import MappingProxyType
from typing import Iterable, Mapping

from .text import normalize_name, tokenize

SECTIONS = ("#CLASSES", "#ENTITIES", "#RELATIONS", "#FACTS")

# Characters that would make triple keys ambiguous.
_FORBIDDEN_ID_CHARS = frozenset("|\t\n\r ")


class KBError(ValueError):
    """Base class for knowledge base problems; ``line`` is 1-based when known."""

    def __init__(self, message: str, line: int | None = None):
        self.message = message
        self.line = line
        super().__init__(f"line {line}: {message}" if line is not None else message)


class KBParseError(KBError):
    pass


class DuplicateIdError(KBError):
    pass


class DanglingReferenceError(KBError):
    pass


class CycleError(KBError):
    pass


class UnknownIdError(KeyError):
    pass


@dataclass(frozen=True)
class ClassDef:
    class_id: str
    label: str
    parents: frozenset[str] = frozenset()


@dataclass(frozen=True)
class Entity:
    entity_id: str
    class_id: str
    canonical_name: str
    aliases: frozenset[str] = frozenset()


@dataclass(frozen=True)
class RelationType:
    relation_id: str
    label: str


@dataclass(frozen=True)
class Fact:
    subject: str
    relation: str
    object: str


@dataclass
class _Row:
    record: object
    line: int | None = None


@dataclass
class _Records:
    classes: list[_Row] = field(default_factory=list)
    entities: list[_Row] = field(default_factory=list)
    relations: list[_Row] = field(default_factory=list)
    facts: list[_Row] = field(default_factory=list)


def _bad_id(value: str) -> bool:
    return not value or value == "*" or any(ch in _FORBIDDEN_ID_CHARS for ch in value)


def _validate(records: _Records) -> list[KBError]:
    errors: list[KBError] = []
    class_ids: set[str] = set()
    entity_ids: set[str] = set()
    relation_ids: set[str] = set()

    for kind, rows, seen, key in (
        ("class", records.classes, class_ids, "class_id"),
        ("entity", records.entities, entity_ids, "entity_id"),
        ("relation", records.relations, relation_ids, "relation_id"),
    ):
        for row in rows:
            ident = getattr(row.record, key)
            if _bad_id(ident):
                errors.append(KBParseError(f"invalid {kind} id {ident!r}", row.line))
            elif ident in seen:
                errors.append(DuplicateIdError(f"duplicate {kind} id {ident!r}", row.line))
            seen.add(ident)

    for row in records.classes:
        cls: ClassDef = row.record  # type: ignore[assignment]
        for parent in sorted(cls.parents):
            if parent not in class_ids:
                errors.append(DanglingReferenceError(
                    f"class {cls.class_id!r} has undeclared parent {parent!r}", row.line))

    for row in records.entities:
        ent: Entity = row.record  # type: ignore[assignment]
        if ent.class_id not in class_ids:
            errors.append(DanglingReferenceError(
                f"entity {ent.entity_id!r} has undeclared class {ent.class_id!r}", row.line))
        if ent.canonical_name in ent.aliases:
            errors.append(KBParseError(
                f"entity {ent.entity_id!r} lists its canonical name as an alias", row.line))
        for name in (ent.canonical_name, *sorted(ent.aliases)):
            if not tokenize(name):
                errors.append(KBParseError(
                    f"entity {ent.entity_id!r} has a name without word characters: {name!r}",
                    row.line))

    for row in records.facts:
        fact: Fact = row.record  # type: ignore[assignment]
        for role, ident, pool in (
            ("subject", fact.subject, entity_ids),
            ("relation", fact.relation, relation_ids),
            ("object", fact.object, entity_ids),
        ):
            if ident not in pool:
                errors.append(DanglingReferenceError(
                    f"fact {role} {ident!r} is not declared", row.line))

    errors.extend(_find_cycles(records.classes, class_ids))
    return errors


def _find_cycles(rows: list[_Row], class_ids: set[str]) -> list[KBError]:
    parents = {row.record.class_id: row.record.parents for row in rows}  # type: ignore[attr-defined]
    lines = {row.record.class_id: row.line for row in rows}  # type: ignore[attr-defined]
    WHITE, GREY, BLACK = 0, 1, 2
    color = dict.fromkeys(parents, WHITE)
    errors: list[KBError] = []

    for root in sorted(parents):
        if color[root] != WHITE:
            continue
        path: list[str] = [root]
        stack = [iter(sorted(p for p in parents[root] if p in class_ids))]
        color[root] = GREY
        while stack:
            nxt = next(stack[-1], None)
            if nxt is None:
                stack.pop()
                color[path.pop()] = BLACK
                continue
            if color[nxt] == GREY:
                cycle = path[path.index(nxt):] + [nxt]
                errors.append(CycleError(
                    "cycle in class hierarchy: " + " -> ".join(cycle), lines[nxt]))
            elif color[nxt] == WHITE:
                color[nxt] = GREY
                path.append(nxt)
                stack.append(iter(sorted(p for p in parents[nxt] if p in class_ids)))
    return errors


class KnowledgeBase:
    """Immutable, validated store of classes, entities, relation types and facts."""

    def __init__(
        self,
        classes: Iterable[ClassDef] = (),
        entities: Iterable[Entity] = (),
        relations: Iterable[RelationType] = (),
        facts: Iterable[Fact] = (),
        *,
        _records: _Records | None = None,
    ):
        if _records is None:
            _records = _Records(
                [_Row(c) for c in classes],
                [_Row(e) for e in entities],
                [_Row(r) for r in relations],
                [_Row(f) for f in facts],
            )
            errors = _validate(_records)
            if errors:
                raise errors[0]

        self._classes = MappingProxyType({r.record.class_id: r.record for r in _records.classes})
        self._entities = MappingProxyType({r.record.entity_id: r.record for r in _records.entities})
        self._relations = MappingProxyType(
            {r.record.relation_id: r.record for r in _records.relations})
        self._facts = frozenset(r.record for r in _records.facts)

        by_name: dict[str, set[str]] = defaultdict(set)
        by_tokens: dict[tuple[str, ...], set[str]] = defaultdict(set)
        for ent in self._entities.values():
            for name in (ent.canonical_name, *ent.aliases):
                by_name[normalize_name(name)].add(ent.entity_id)
                by_tokens[tuple(t.norm for t in tokenize(name))].add(ent.entity_id)
        self._by_name = {k: frozenset(v) for k, v in by_name.items()}
        self._by_tokens = {k: frozenset(v) for k, v in by_tokens.items()}
        self._max_name_tokens = max((len(k) for k in self._by_tokens), default=0)

        related: dict[tuple[str, str], set[str]] = defaultdict(set)
        for f in self._facts:
            if f.subject != f.object:
                related[f.subject, f.relation].add(f.object)
                related[f.object, f.relation].add(f.subject)
        self._related = {k: frozenset(v) for k, v in related.items()}

        self._closure: dict[str, frozenset[str]] = {}

    # -- record access -------------------------------------------------------

    @property
    def classes(self) -> Mapping[str, ClassDef]:
        return self._classes

    @property
    def entities(self) -> Mapping[str, Entity]:
        return self._entities

    @property
    def relation_types(self) -> Mapping[str, RelationType]:
        return self._relations

    @property
    def facts(self) -> frozenset[Fact]:
        return self._facts

    def counts(self) -> dict[str, int]:
        return {
            "classes": len(self._classes),
            "entities": len(self._entities),
            "aliases": sum(len(e.aliases) for e in self._entities.values()),
            "relation_types": len(self._relations),
            "facts": len(self._facts),
        }

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, KnowledgeBase):
            return NotImplemented
        return (
            set(self._classes.values()) == set(other._classes.values())
            and set(self._entities.values()) == set(other._entities.values())
            and set(self._relations.values()) == set(other._relations.values())
            and self._facts == other._facts
        )

    __hash__ = None  # type: ignore[assignment]

    def __repr__(self) -> str:
        c = self.counts()
        return (f"KnowledgeBase(classes={c['classes']}, entities={c['entities']}, "
                f"relation_types={c['relation_types']}, facts={c['facts']})")

    # -- queries -------------------------------------------------------------

    def super_classes(self, class_id: str, max_depth: int | None = None) -> frozenset[str]:
        """All strict ancestors of ``class_id``.

        ``max_depth`` limits how many parent hops are followed; ``None`` means
        the full transitive closure.
        """
        if class_id not in self._classes:
            raise UnknownIdError(class_id)
        if max_depth is None and class_id in self._closure:
            return self._closure[class_id]

        found: set[str] = set()
        frontier = set(self._classes[class_id].parents)
        depth = 0
        while frontier and (max_depth is None or depth < max_depth):
            found |= frontier
            frontier = {p for c in frontier for p in self._classes[c].parents} - found
            depth += 1
        result = frozenset(found)
        if max_depth is None:
            self._closure[class_id] = result
        return result

    def names_of(self, entity_id: str) -> frozenset[str]:
        try:
            ent = self._entities[entity_id]
        except KeyError:
            raise UnknownIdError(entity_id) from None
        return frozenset({ent.canonical_name, *ent.aliases})

    def entities_by_name(self, name: str) -> frozenset[str]:
        return self._by_name.get(normalize_name(name), frozenset())

    def alias_names(self, name: str) -> frozenset[str]:
        """Every name of every entity called ``name`` (union over ambiguous matches)."""
        out: set[str] = set()
        for eid in self.entities_by_name(name):
            out |= self.names_of(eid)
        return frozenset(out)

    def related_entities(self, entity_id: str, relation_id: str) -> frozenset[str]:
        """Entities linked to ``entity_id`` by ``relation_id`` in either argument position."""
        if entity_id not in self._entities:
            raise UnknownIdError(entity_id)
        if relation_id not in self._relations:
            raise UnknownIdError(relation_id)
        return self._related.get((entity_id, relation_id), frozenset())

    # -- gazetteer support ---------------------------------------------------

    def entities_by_tokens(self, tokens: tuple[str, ...]) -> frozenset[str]:
        return self._by_tokens.get(tokens, frozenset())

    @property
    def max_name_tokens(self) -> int:
        return self._max_name_tokens


def _is_comment(line: str) -> bool:
    # "# text" or "##..." is a comment; "#Company_123<TAB>..." is a row whose id starts with '#'.
    return len(line) == 1 or line[1] in "# \t"


def _parse(lines: Iterable[str]) -> tuple[_Records, list[KBError]]:
    records = _Records()
    errors: list[KBError] = []
    section = -1
    lineno = 0

    for lineno, raw in enumerate(lines, start=1):
        line = raw.rstrip("\r\n")
        if not line.strip():
            continue
        if line.startswith("#"):
            header = line.strip()
            if header in SECTIONS:
                idx = SECTIONS.index(header)
                if idx != section + 1:
                    errors.append(KBParseError(f"section header {header} out of order", lineno))
                section = idx
                continue
            if section < 0 or _is_comment(line):
                continue
        if section < 0:
            errors.append(KBParseError("data line before #CLASSES header", lineno))
            continue

        cols = line.split("\t")
        if section == 0:
            if len(cols) not in (2, 3):
                errors.append(KBParseError(
                    f"class row needs 2-3 tab-separated fields, got {len(cols)}", lineno))
                continue
            parents = frozenset(p.strip() for p in cols[2].split(",") if p.strip()) \
                if len(cols) == 3 else frozenset()
            records.classes.append(_Row(ClassDef(cols[0].strip(), cols[1].strip(), parents), lineno))
        elif section == 1:
            if len(cols) not in (3, 4):
                errors.append(KBParseError(
                    f"entity row needs 3-4 tab-separated fields, got {len(cols)}", lineno))
                continue
            aliases = frozenset(a.strip() for a in cols[3].split("|") if a.strip()) \
                if len(cols) == 4 else frozenset()
            records.entities.append(_Row(
                Entity(cols[0].strip(), cols[1].strip(), cols[2].strip(), aliases), lineno))
        elif section == 2:
            if len(cols) != 2:
                errors.append(KBParseError(
                    f"relation row needs 2 tab-separated fields, got {len(cols)}", lineno))
                continue
            records.relations.append(_Row(RelationType(cols[0].strip(), cols[1].strip()), lineno))
        else:
            if len(cols) != 3:
                errors.append(KBParseError(
                    f"fact row needs 3 tab-separated fields, got {len(cols)}", lineno))
                continue
            records.facts.append(_Row(Fact(*(c.strip() for c in cols)), lineno))

    if section != len(SECTIONS) - 1:
        missing = ", ".join(SECTIONS[section + 1:])
        errors.append(KBParseError(f"missing section header(s): {missing}", lineno or 1))
    return records, errors


def check_kb(path: str | os.PathLike) -> tuple[KnowledgeBase | None, list[KBError]]:
    """Parse and validate a KB file, collecting every problem instead of stopping at the first."""
    with open(path, encoding="utf-8-sig") as fh:
        records, errors = _parse(fh)
    errors.extend(_validate(records))
    errors.sort(key=lambda e: (e.line is None, e.line or 0))
    if errors:
        return None, errors
    return KnowledgeBase(_records=records), []


def load_kb(path: str | os.PathLike) -> KnowledgeBase:
    """Load a KB file, raising the first :class:`KBError` found."""
    kb, errors = check_kb(path)
    if errors:
        raise errors[0]
    assert kb is not None
    return kb

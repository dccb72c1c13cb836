"""Inverted index over generalized terms with tf-idf cosine ranking.

Persistence is a plain-text file so builds can be diffed::

    #DOCS
    <ord> <TAB> <doc_id> <TAB> <norm>
    #TERMS
    <term key> <TAB> <df> <TAB> <ord>:<tf> <ord>:<tf> ...

Terms are sorted by key; term ordinals follow that order.
"""

from __future__ import annotations

import logging
import math
import os
from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Iterator, Mapping

import numpy as np

from . import kernels
from .expand import GeneralizedTerm

log = logging.getLogger(__name__)

INDEX_FILE = "index.tsv"
META_FILE = "meta.txt"


class DuplicateDocumentError(ValueError):
    pass


class EmptyQueryError(ValueError):
    pass


def weight(tf: int, df: int, n_docs: int) -> float:
    """``(1 + ln tf) * ln(1 + N / df)``."""
    if tf < 1:
        raise ValueError(f"term frequency must be >= 1, got {tf}")
    if not 1 <= df <= n_docs:
        raise ValueError(f"document frequency {df} outside [1, {n_docs}]")
    return (1.0 + math.log(tf)) * math.log(1.0 + n_docs / df)


@dataclass(frozen=True)
class ScoredDoc:
    doc_id: str
    score: float


@dataclass
class BuildReport:
    documents: int = 0
    terms: int = 0
    annotations: int = 0
    skipped: list[tuple[str, str]] = field(default_factory=list)
    warnings: list[str] = field(default_factory=list)

    def lines(self) -> list[str]:
        out = [
            f"documents\t{self.documents}",
            f"terms\t{self.terms}",
            f"annotations\t{self.annotations}",
            f"skipped\t{len(self.skipped)}",
        ]
        out += [f"skipped-doc\t{doc}\t{why}" for doc, why in self.skipped]
        out += [f"warning\t{w}" for w in self.warnings]
        return out


def read_corpus(path: str | os.PathLike, report: BuildReport | None = None
                ) -> Iterator[tuple[str, str]]:
    """Yield ``(doc_id, text)`` from a directory of files or a ``docid<TAB>text`` file.

    Unreadable documents are skipped and noted in ``report``.
    """
    report = report if report is not None else BuildReport()
    p = Path(path)
    if p.is_dir():
        files = sorted(f for f in p.iterdir() if f.is_file() and not f.name.startswith("."))
        if not files:
            report.warnings.append(f"corpus directory {p} is empty")
        for f in files:
            try:
                text = f.read_text(encoding="utf-8")
            except (OSError, UnicodeDecodeError) as exc:
                log.warning("skipping %s: %s", f.name, exc)
                report.skipped.append((f.name, type(exc).__name__))
                continue
            yield f.name, text
        return

    with open(p, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.rstrip("\r\n")
            if not line.strip():
                continue
            doc_id, sep, text = line.partition("\t")
            if not sep or not doc_id.strip():
                log.warning("skipping malformed corpus line %d", lineno)
                report.skipped.append((f"line {lineno}", "malformed record"))
                continue
            yield doc_id.strip(), text


class Index:
    """Immutable inverted index in CSR layout (terms x documents)."""

    def __init__(self, doc_ids: list[str], term_keys: list[str], df: np.ndarray,
                 indptr: np.ndarray, post_docs: np.ndarray, post_tf: np.ndarray,
                 norms: np.ndarray | None = None, meta: Mapping[str, str] | None = None):
        self.doc_ids = list(doc_ids)
        self.term_keys = list(term_keys)
        self.df = np.ascontiguousarray(df, dtype=np.int64)
        self.indptr = np.ascontiguousarray(indptr, dtype=np.int64)
        self.post_docs = np.ascontiguousarray(post_docs, dtype=np.int32)
        self.post_tf = np.ascontiguousarray(post_tf, dtype=np.int32)
        self.meta = dict(meta or {})
        self._term_ord = {k: i for i, k in enumerate(self.term_keys)}

        self.post_w = np.zeros(len(self.post_docs), dtype=np.float64)
        kernels.term_weights(self.indptr, self.post_tf, self.df, self.n_docs, self.post_w)
        if norms is None:
            norms = np.zeros(self.n_docs, dtype=np.float64)
            kernels.doc_norms(self.indptr, self.post_docs, self.post_w, norms)
        self.norms = np.ascontiguousarray(norms, dtype=np.float64)
        self.lengths = np.bincount(self.post_docs, weights=self.post_tf,
                                   minlength=self.n_docs).astype(np.int64)

    @property
    def n_docs(self) -> int:
        return len(self.doc_ids)

    @property
    def n_terms(self) -> int:
        return len(self.term_keys)

    def doc_freq(self, key: str) -> int:
        t = self._term_ord.get(key)
        return 0 if t is None else int(self.df[t])

    def postings(self, key: str) -> list[tuple[int, int]]:
        t = self._term_ord.get(key)
        if t is None:
            return []
        lo, hi = self.indptr[t], self.indptr[t + 1]
        return list(zip(self.post_docs[lo:hi].tolist(), self.post_tf[lo:hi].tolist()))

    def doc_terms(self, doc_ord: int) -> Counter[str]:
        out: Counter[str] = Counter()
        mask = self.post_docs == doc_ord
        term_of = np.repeat(np.arange(self.n_terms), np.diff(self.indptr))
        for t, tf in zip(term_of[mask].tolist(), self.post_tf[mask].tolist()):
            out[self.term_keys[t]] = tf
        return out

    def search(self, terms: Mapping | Iterable, k: int = 10) -> list[ScoredDoc]:
        """Top-``k`` documents by cosine similarity to the query term multiset.

        Query terms missing from the index carry no weight; documents sharing no
        term with the query are omitted.
        """
        if k < 1:
            raise ValueError("k must be >= 1")
        counts = _as_key_counts(terms)
        if not counts:
            raise EmptyQueryError("nothing to search: empty term multiset")

        known = sorted((self._term_ord[key], tf) for key, tf in counts.items()
                       if key in self._term_ord)
        if not known:
            return []
        q_ords = np.array([t for t, _ in known], dtype=np.int64)
        q_w = np.array([weight(tf, int(self.df[t]), self.n_docs) for t, tf in known],
                       dtype=np.float64)
        q_norm = math.sqrt(math.fsum(w * w for w in q_w.tolist()))

        acc = np.zeros(self.n_docs, dtype=np.float64)
        kernels.accumulate(self.indptr, self.post_docs, self.post_w, q_ords, q_w, acc)
        hits = np.flatnonzero(acc > 0.0)
        scores = acc[hits] / (q_norm * self.norms[hits])
        ranked = sorted(
            (ScoredDoc(self.doc_ids[d], min(1.0, s)) for d, s in zip(hits.tolist(), scores.tolist())),
            key=lambda r: (-r.score, r.doc_id),
        )
        return ranked[:k]

    # -- persistence ---------------------------------------------------------

    def dumps(self) -> str:
        lines = ["#DOCS"]
        lines += [f"{i}\t{d}\t{float(n)!r}" for i, (d, n) in
                  enumerate(zip(self.doc_ids, self.norms.tolist()))]
        lines.append("#TERMS")
        docs, tfs = self.post_docs.tolist(), self.post_tf.tolist()
        for t, key in enumerate(self.term_keys):
            lo, hi = int(self.indptr[t]), int(self.indptr[t + 1])
            postings = " ".join(f"{docs[p]}:{tfs[p]}" for p in range(lo, hi))
            lines.append(f"{key}\t{int(self.df[t])}\t{postings}")
        return "\n".join(lines) + "\n"

    def save(self, directory: str | os.PathLike) -> None:
        d = Path(directory)
        d.mkdir(parents=True, exist_ok=True)
        (d / INDEX_FILE).write_text(self.dumps(), encoding="utf-8")
        meta = "".join(f"{k}={v}\n" for k, v in sorted(self.meta.items()))
        (d / META_FILE).write_text(meta, encoding="utf-8")

    @classmethod
    def loads(cls, text: str, meta: Mapping[str, str] | None = None) -> "Index":
        section = None
        doc_ids: list[str] = []
        norms: list[float] = []
        keys: list[str] = []
        dfs: list[int] = []
        indptr = [0]
        post_docs: list[int] = []
        post_tf: list[int] = []
        for lineno, line in enumerate(text.splitlines(), start=1):
            if line in ("#DOCS", "#TERMS"):
                section = line
                continue
            if not line:
                continue
            cols = line.split("\t")
            if section == "#DOCS" and len(cols) == 3:
                if int(cols[0]) != len(doc_ids):
                    raise ValueError(f"index line {lineno}: document ordinals must be dense")
                doc_ids.append(cols[1])
                norms.append(float(cols[2]))
            elif section == "#TERMS" and len(cols) == 3:
                keys.append(cols[0])
                dfs.append(int(cols[1]))
                for item in cols[2].split():
                    d, tf = item.split(":")
                    post_docs.append(int(d))
                    post_tf.append(int(tf))
                indptr.append(len(post_docs))
                if indptr[-1] - indptr[-2] != dfs[-1]:
                    raise ValueError(f"index line {lineno}: df does not match postings")
            else:
                raise ValueError(f"index line {lineno}: unexpected content")
        return cls(doc_ids, keys, np.array(dfs, dtype=np.int64), np.array(indptr, dtype=np.int64),
                   np.array(post_docs, dtype=np.int32), np.array(post_tf, dtype=np.int32),
                   np.array(norms, dtype=np.float64), meta)

    @classmethod
    def load(cls, directory: str | os.PathLike) -> "Index":
        d = Path(directory)
        meta: dict[str, str] = {}
        if (d / META_FILE).exists():
            for line in (d / META_FILE).read_text(encoding="utf-8").splitlines():
                if "=" in line:
                    k, v = line.split("=", 1)
                    meta[k.strip()] = v.strip()
        return cls.loads((d / INDEX_FILE).read_text(encoding="utf-8"), meta)


def _as_key_counts(terms: Mapping | Iterable) -> Counter[str]:
    items = terms.items() if isinstance(terms, Mapping) else ((t, 1) for t in terms)
    out: Counter[str] = Counter()
    for term, n in items:
        if n <= 0:
            continue
        out[term.key if isinstance(term, GeneralizedTerm) else str(term)] += int(n)
    return out


def index_from_term_counts(docs: Iterable[tuple[str, Mapping[str, int]]],
                           meta: Mapping[str, str] | None = None) -> Index:
    """Assemble an index from per-document term-key counts, in input order."""
    doc_ids: list[str] = []
    seen: set[str] = set()
    postings: dict[str, list[tuple[int, int]]] = {}
    for doc_id, counts in docs:
        if doc_id in seen:
            raise DuplicateDocumentError(f"duplicate document id {doc_id!r}")
        seen.add(doc_id)
        ord_ = len(doc_ids)
        doc_ids.append(doc_id)
        for key, tf in counts.items():
            if tf > 0:
                postings.setdefault(key, []).append((ord_, int(tf)))

    keys = sorted(postings)
    indptr = [0]
    post_docs: list[int] = []
    post_tf: list[int] = []
    for key in keys:
        for d, tf in postings[key]:
            post_docs.append(d)
            post_tf.append(tf)
        indptr.append(len(post_docs))
    df = np.diff(np.array(indptr, dtype=np.int64))
    return Index(doc_ids, keys, df, np.array(indptr, dtype=np.int64),
                 np.array(post_docs, dtype=np.int32), np.array(post_tf, dtype=np.int32),
                 meta=meta)


def build_index(corpus: str | os.PathLike | Iterable[tuple[str, str]], analyzer
                ) -> tuple[Index, BuildReport]:
    """Index a corpus with ``analyzer`` (a :class:`~ontosearch.pipeline.Analyzer`)."""
    report = BuildReport()
    docs = read_corpus(corpus, report) if isinstance(corpus, (str, os.PathLike)) else corpus

    def counted():
        for doc_id, text in docs:
            terms, n_ann = analyzer.document_terms(text)
            report.annotations += n_ann
            if not terms:
                report.warnings.append(f"document {doc_id} has no indexable terms")
            yield doc_id, terms

    meta = {
        "mode": analyzer.mode.value,
        "keywords_inside_entities": str(analyzer.keywords_inside_entities).lower(),
        "max_super_depth": "" if analyzer.max_super_depth is None else str(analyzer.max_super_depth),
    }
    index = index_from_term_counts(counted(), meta)
    report.documents = index.n_docs
    report.terms = index.n_terms
    if index.n_docs == 0:
        report.warnings.append("corpus is empty")
    return index, report

"""Precision/recall evaluation with 11-point interpolation and F-measure curves."""

from __future__ import annotations

import logging
import os
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

log = logging.getLogger(__name__)

LEVELS: tuple[float, ...] = tuple(i / 10 for i in range(11))
DEFAULT_DEPTH = 1000


class EvalError(ValueError):
    pass


@dataclass(frozen=True)
class EvalCurve:
    values: tuple[float, ...]

    def __post_init__(self):
        if len(self.values) != len(LEVELS):
            raise ValueError(f"a curve has {len(LEVELS)} values, got {len(self.values)}")

    def __iter__(self):
        return iter(zip(LEVELS, self.values))

    def __getitem__(self, i: int) -> float:
        return self.values[i]

    def at(self, level: float) -> float:
        return self.values[round(level * 10)]

    @property
    def mean(self) -> float:
        return sum(self.values) / len(self.values)


@dataclass
class Qrels:
    relevant: dict[str, frozenset[str]]

    @property
    def query_ids(self) -> list[str]:
        return sorted(self.relevant)


@dataclass
class Run:
    tag: str
    results: dict[str, list[tuple[str, float]]] = field(default_factory=dict)

    def ranked(self, query_id: str, depth: int | None = DEFAULT_DEPTH) -> list[str]:
        docs = [d for d, _ in self.results.get(query_id, [])]
        return docs if depth is None else docs[:depth]


def load_qrels(path: str | os.PathLike, drop_empty: bool = False) -> Qrels:
    """Read ``query_id 0 doc_id relevance`` lines (tabs or spaces).

    Queries without any relevant document are an error, or are dropped with a
    warning when ``drop_empty`` is set.
    """
    judged: dict[str, set[str]] = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            cols = line.split()
            if not cols:
                continue
            if len(cols) != 4:
                raise EvalError(f"qrels line {lineno}: expected 4 fields, got {len(cols)}")
            qid, _, doc, rel = cols
            try:
                relevant = int(rel) > 0
            except ValueError:
                raise EvalError(f"qrels line {lineno}: bad relevance {rel!r}") from None
            bucket = judged.setdefault(qid, set())
            if relevant:
                bucket.add(doc)
    empty = sorted(q for q, docs in judged.items() if not docs)
    if empty:
        if not drop_empty:
            raise EvalError(f"queries without relevant documents: {', '.join(empty)}")
        log.warning("dropping %d queries without relevant documents", len(empty))
    return Qrels({q: frozenset(d) for q, d in judged.items() if d})


def load_run(path: str | os.PathLike) -> Run:
    """Read ``query_id Q0 doc_id rank score tag`` lines into a run ordered by rank."""
    rows: dict[str, list[tuple[int, str, float]]] = {}
    tag = None
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            cols = line.split()
            if not cols:
                continue
            if len(cols) != 6:
                raise EvalError(f"run line {lineno}: expected 6 fields, got {len(cols)}")
            qid, _, doc, rank, score, row_tag = cols
            tag = tag or row_tag
            rows.setdefault(qid, []).append((int(rank), doc, float(score)))
    run = Run(tag or os.path.basename(os.fspath(path)))
    for qid, items in rows.items():
        items.sort(key=lambda r: (-r[2], r[0]))
        docs = [d for _, d, _ in items]
        if len(set(docs)) != len(docs):
            raise EvalError(f"run {run.tag}: duplicate document for query {qid}")
        run.results[qid] = [(d, s) for _, d, s in items]
    return run


def format_run_lines(query_id: str, results: Iterable[tuple[str, float]], tag: str) -> list[str]:
    return [f"{query_id}\tQ0\t{doc}\t{rank}\t{score!r}\t{tag}"
            for rank, (doc, score) in enumerate(results, start=1)]


def pr_points(ranked: Sequence[str], relevant: set[str] | frozenset[str]
              ) -> list[tuple[float, float]]:
    """One ``(recall, precision)`` point per rank position."""
    if not relevant:
        raise EvalError("relevant set is empty")
    hits = 0
    out = []
    for i, doc in enumerate(ranked, start=1):
        if doc in relevant:
            hits += 1
        out.append((hits / len(relevant), hits / i))
    return out


def interpolate_11pt(points: Sequence[tuple[float, float]]) -> EvalCurve:
    """Interpolated precision at recall 0.0, 0.1, ..., 1.0.

    The value at level r is the highest precision at any point with recall >= r.
    """
    ordered = sorted(points)
    best = [0.0] * (len(ordered) + 1)
    for i in range(len(ordered) - 1, -1, -1):
        best[i] = max(best[i + 1], ordered[i][1])
    values = []
    j = 0
    for level in LEVELS:
        while j < len(ordered) and ordered[j][0] < level:
            j += 1
        values.append(best[j])
    return EvalCurve(tuple(values))


def f_measure(p: float, r: float) -> float:
    return 0.0 if p + r == 0 else 2 * p * r / (p + r)


def average_curves(per_query: Sequence[EvalCurve]) -> EvalCurve:
    if not per_query:
        raise EvalError("cannot average an empty list of curves")
    n = len(per_query)
    return EvalCurve(tuple(sum(c.values[i] for c in per_query) / n for i in range(len(LEVELS))))


def f_curve(precision: EvalCurve) -> EvalCurve:
    return EvalCurve(tuple(f_measure(p, r) for r, p in precision))


@dataclass
class RunEvaluation:
    tag: str
    precision: EvalCurve
    f: EvalCurve
    per_query: dict[str, EvalCurve]


def evaluate_run(run: Run, qrels: Qrels, depth: int | None = DEFAULT_DEPTH) -> RunEvaluation:
    """Average interpolated precision and F curves over all judged queries.

    F is taken per query and level before averaging. Judged queries the run
    does not mention count as retrieving nothing.
    """
    unknown = sorted(set(run.results) - set(qrels.relevant))
    if unknown:
        raise EvalError(f"run {run.tag} references unknown query id(s): {', '.join(unknown)}")
    per_query = {}
    f_curves = []
    for qid in qrels.query_ids:
        curve = interpolate_11pt(pr_points(run.ranked(qid, depth), qrels.relevant[qid]))
        per_query[qid] = curve
        f_curves.append(f_curve(curve))
    return RunEvaluation(run.tag, average_curves(list(per_query.values())),
                         average_curves(f_curves), per_query)


@dataclass
class Comparison:
    evaluations: list[RunEvaluation]

    def table(self) -> str:
        header = ["Measure", "Model"] + [f"{round(lv * 100)}" for lv in LEVELS] + ["Mean"]
        rows = []
        for label, attr in (("P(%)", "precision"), ("F(%)", "f")):
            for ev in self.evaluations:
                curve: EvalCurve = getattr(ev, attr)
                rows.append([label, ev.tag] + [f"{100 * v:.1f}" for v in curve.values]
                            + [f"{100 * curve.mean:.1f}"])
        widths = [max(len(r[i]) for r in [header] + rows) for i in range(len(header))]
        fmt = lambda r: "  ".join(  # noqa: E731
            c.ljust(w) if i < 2 else c.rjust(w) for i, (c, w) in enumerate(zip(r, widths)))
        return "\n".join([fmt(header)] + [fmt(r) for r in rows]) + "\n"

    def records(self) -> str:
        lines = ["run,level,metric,value"]
        for ev in self.evaluations:
            for metric, curve in (("P", ev.precision), ("F", ev.f)):
                lines += [f"{ev.tag},{lv:.1f},{metric},{v:.6f}" for lv, v in curve]
        return "\n".join(lines) + "\n"


def compare_runs(runs: Sequence[Run], qrels: Qrels, depth: int | None = DEFAULT_DEPTH
                 ) -> Comparison:
    if not runs:
        raise EvalError("no runs to compare")
    return Comparison([evaluate_run(r, qrels, depth) for r in runs])


def relabel(mapping: Mapping[str, str], run: Run, qrels: Qrels) -> tuple[Run, Qrels]:
    """Rename document ids consistently in a run and its judgments."""
    new_run = Run(run.tag, {q: [(mapping.get(d, d), s) for d, s in res]
                            for q, res in run.results.items()})
    new_qrels = Qrels({q: frozenset(mapping.get(d, d) for d in docs)
                       for q, docs in qrels.relevant.items()})
    return new_run, new_qrels

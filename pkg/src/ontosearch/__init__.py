"""Semantic text search over keywords and named-entity triples, with
ontology-based query expansion and 11-point precision/recall evaluation."""

from .annotate import (
    EntityAnnotation,
    RelationMention,
    analyze_query,
    load_interrogative_rules,
    load_relation_dict,
    load_stoplist,
    map_interrogative,
    map_relation_phrase,
    recognize_entities,
    recognize_relation_phrases,
    remove_stopwords,
    tokenize,
)
from .evalkit import (
    EvalCurve,
    Qrels,
    Run,
    average_curves,
    compare_runs,
    evaluate_run,
    f_measure,
    interpolate_11pt,
    pr_points,
)
from .expand import (
    ExpandedQuery,
    ExpandStatus,
    GeneralizedTerm,
    NETriple,
    document_triples,
    expand_query,
    query_triple,
)
from .index import Index, ScoredDoc, build_index, weight
from .kb import KnowledgeBase, load_kb
from .kernels import BACKEND
from .pipeline import Analyzer, Mode

__version__ = "0.1.0"

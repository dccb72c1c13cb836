"""Command-line interface: ``ontosearch <subcommand> ...``."""

from __future__ import annotations

import argparse
import logging
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

from .annotate import load_interrogative_rules, load_relation_dict, load_stoplist
from .evalkit import DEFAULT_DEPTH, EvalError, compare_runs, format_run_lines, load_qrels, load_run
from .index import DuplicateDocumentError, EmptyQueryError, Index, build_index
from .kb import check_kb, load_kb, KBError
from .pipeline import Analyzer, Mode

log = logging.getLogger("ontosearch")

_CONFIG_KEYS = {
    "kb", "relations", "interrogatives", "stoplist", "mode", "index_dir", "depth", "k",
    "keywords_inside_entities", "super_depth",
}


class CLIError(Exception):
    pass


@dataclass
class RunConfig:
    kb: str | None = None
    relations: str | None = None
    interrogatives: str | None = None
    stoplist: str | None = None
    mode: Mode = Mode.SEMANTIC
    index_dir: str | None = None
    depth: int = DEFAULT_DEPTH
    k: int | None = None
    keywords_inside_entities: bool = False
    super_depth: int | None = None

    def validate(self) -> None:
        if self.mode.uses_entities and not self.kb:
            raise CLIError(f"mode {self.mode.value} requires --kb")

    def analyzer(self) -> Analyzer:
        self.validate()
        uses_kb = self.mode.uses_entities
        return Analyzer(
            mode=self.mode,
            kb=load_kb(self.kb) if uses_kb else None,
            stoplist=load_stoplist(self.stoplist),
            relations=load_relation_dict(self.relations) if self.mode is Mode.SEMANTIC else None,
            rules=load_interrogative_rules(self.interrogatives) if uses_kb else None,
            keywords_inside_entities=self.keywords_inside_entities,
            max_super_depth=self.super_depth,
        )


def _read_config_file(path: str) -> dict[str, str]:
    out = {}
    for lineno, line in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise CLIError(f"config line {lineno}: expected key=value")
        key, value = (s.strip() for s in line.split("=", 1))
        key = key.replace("-", "_")
        if key not in _CONFIG_KEYS:
            raise CLIError(f"config line {lineno}: unknown key {key!r}")
        out[key] = value
    return out


def _bool(value: str | bool) -> bool:
    if isinstance(value, bool):
        return value
    return value.strip().lower() in ("1", "true", "yes", "on")


def config_from_args(args: argparse.Namespace) -> RunConfig:
    merged: dict[str, object] = _read_config_file(args.config) if args.config else {}
    for key in _CONFIG_KEYS:
        value = getattr(args, key, None)
        if value is not None:
            merged[key] = value
    cfg = RunConfig()
    for key in ("kb", "relations", "interrogatives", "stoplist", "index_dir"):
        if key in merged:
            setattr(cfg, key, str(merged[key]))
    if "mode" in merged:
        try:
            cfg.mode = Mode(str(merged["mode"]))
        except ValueError:
            raise CLIError(f"unknown mode {merged['mode']!r}") from None
    for key in ("depth", "k", "super_depth"):
        if key in merged and merged[key] != "":
            setattr(cfg, key, int(merged[key]))  # type: ignore[arg-type]
    if "keywords_inside_entities" in merged:
        cfg.keywords_inside_entities = _bool(merged["keywords_inside_entities"])  # type: ignore[arg-type]
    return cfg


def _open_index(cfg: RunConfig) -> Index:
    if not cfg.index_dir:
        raise CLIError("--index-dir is required")
    index = Index.load(cfg.index_dir)
    built = index.meta.get("mode")
    if built and (Mode(built) is Mode.KEYWORD) != (cfg.mode is Mode.KEYWORD):
        raise CLIError(f"index was built in mode {built}; cannot query it in mode {cfg.mode.value}")
    return index


def cmd_kb_validate(args, cfg: RunConfig, out) -> int:
    path = args.kb_file or cfg.kb
    if not path:
        raise CLIError("kb-validate needs a KB path")
    kb, errors = check_kb(path)
    if errors:
        for err in errors:
            print(f"{path}:{err.line if err.line is not None else '?'}: "
                  f"{type(err).__name__}: {err.message}", file=out)
        print(f"INVALID ({len(errors)} error(s))", file=out)
        return 1
    for key, value in kb.counts().items():
        print(f"{key}\t{value}", file=out)
    print("OK", file=out)
    return 0


def cmd_index(args, cfg: RunConfig, out) -> int:
    if not cfg.index_dir:
        raise CLIError("--index-dir is required")
    analyzer = cfg.analyzer()
    index, report = build_index(args.corpus, analyzer)
    index.save(cfg.index_dir)
    for w in report.warnings:
        log.warning(w)
    print("\n".join(report.lines()), file=out)
    return 0


def cmd_expand(args, cfg: RunConfig, out) -> int:
    if cfg.mode is not Mode.SEMANTIC:
        raise CLIError("expand needs --mode semantic")
    terms, eq = cfg.analyzer().query(args.query)
    assert eq is not None
    a = eq.analysis
    print(f"query\t{eq.original_text}", file=out)
    for ent in a.entities:
        print(f"entity\t{ent.surface}\t{ent.class_id or '*'}\t{ent.entity_id or '*'}"
              + ("\tambiguous" if ent.ambiguous else ""), file=out)
    for m in a.relations:
        print(f"relation-phrase\t{m.phrase}\t{m.relation_id or '-'}", file=out)
    print(f"interrogative\t{a.interrogative_class or '-'}", file=out)
    print(f"relation\t{eq.relation_id or '-'}", file=out)
    for name in eq.added_names:
        print(f"added\t{name}", file=out)
    print(f"status\t{eq.status.value}", file=out)
    for term, n in sorted(terms.items(), key=lambda kv: kv[0].key):
        print(f"term\t{term.key}\t{n}", file=out)
    return 0


def cmd_search(args, cfg: RunConfig, out) -> int:
    index = _open_index(cfg)
    terms = cfg.analyzer().query_terms(args.query)
    try:
        results = index.search(terms, cfg.k or 10)
    except EmptyQueryError as exc:
        raise CLIError(f"empty query after processing: {args.query!r}") from exc
    for rank, r in enumerate(results, start=1):
        print(f"{rank}\t{r.doc_id}\t{r.score:.6f}", file=out)
    return 0


def cmd_batch(args, cfg: RunConfig, out) -> int:
    index = _open_index(cfg)
    analyzer = cfg.analyzer()
    k = cfg.k or DEFAULT_DEPTH
    lines: list[str] = []
    for lineno, line in enumerate(Path(args.queries).read_text(encoding="utf-8").splitlines(), 1):
        if not line.strip() or line.startswith("#"):
            continue
        qid, sep, text = line.partition("\t")
        if not sep or not qid.strip() or not text.strip():
            log.warning("queries line %d: expected query_id<TAB>text, skipped", lineno)
            continue
        try:
            results = index.search(analyzer.query_terms(text), k)
        except EmptyQueryError:
            log.warning("query %s is empty after processing, skipped", qid)
            continue
        lines += format_run_lines(qid.strip(), ((r.doc_id, r.score) for r in results),
                                  cfg.mode.value)
    payload = "".join(line + "\n" for line in lines)
    if args.output:
        Path(args.output).write_text(payload, encoding="utf-8")
    else:
        out.write(payload)
    return 0


def cmd_eval(args, cfg: RunConfig, out) -> int:
    qrels = load_qrels(args.qrels, drop_empty=args.drop_empty)
    runs = [load_run(p) for p in args.runs]
    comparison = compare_runs(runs, qrels, cfg.depth)
    out.write(comparison.table())
    if args.records:
        Path(args.records).write_text(comparison.records(), encoding="utf-8")
    return 0


def build_parser() -> argparse.ArgumentParser:
    shared = argparse.ArgumentParser(add_help=False)
    g = shared.add_argument_group("shared options")
    g.add_argument("--config", help="key=value configuration file; flags override it")
    g.add_argument("--kb", help="knowledge base file")
    g.add_argument("--relations", help="relation-phrase dictionary (default: bundled)")
    g.add_argument("--interrogatives", help="interrogative rule table (default: bundled)")
    g.add_argument("--stoplist", help="stop-word list (default: bundled 33-word list)")
    g.add_argument("--mode", choices=[m.value for m in Mode])
    g.add_argument("--index-dir", dest="index_dir")
    g.add_argument("--depth", type=int, help=f"evaluation depth (default {DEFAULT_DEPTH})")
    g.add_argument("--k", type=int, help="number of results per query")
    g.add_argument("--keywords-inside-entities", dest="keywords_inside_entities",
                   action="store_const", const=True,
                   help="also index the words of recognized entity names as keywords")
    g.add_argument("--super-depth", dest="super_depth", type=int,
                   help="limit superclass expansion to this many levels")

    parser = argparse.ArgumentParser(prog="ontosearch", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("kb-validate", parents=[shared], help="check a knowledge base file")
    p.add_argument("kb_file", nargs="?")
    p.set_defaults(func=cmd_kb_validate)

    p = sub.add_parser("index", parents=[shared], help="index a corpus")
    p.add_argument("corpus", help="directory of text files or docid<TAB>text file")
    p.set_defaults(func=cmd_index)

    p = sub.add_parser("expand", parents=[shared], help="show how a query is expanded")
    p.add_argument("query")
    p.set_defaults(func=cmd_expand)

    p = sub.add_parser("search", parents=[shared], help="rank documents for one query")
    p.add_argument("query")
    p.set_defaults(func=cmd_search)

    p = sub.add_parser("batch", parents=[shared], help="produce a run file for a query set")
    p.add_argument("queries", help="file of query_id<TAB>text lines")
    p.add_argument("-o", "--output", help="run file to write (default: stdout)")
    p.set_defaults(func=cmd_batch)

    p = sub.add_parser("eval", parents=[shared], help="evaluate and compare run files")
    p.add_argument("runs", nargs="+")
    p.add_argument("--qrels", required=True)
    p.add_argument("--records", help="write run,level,metric,value records here")
    p.add_argument("--drop-empty", action="store_true",
                   help="ignore judged queries with no relevant document")
    p.set_defaults(func=cmd_eval)
    return parser


def main(argv: Sequence[str] | None = None, out=None) -> int:
    logging.basicConfig(level=logging.WARNING, format="%(levelname)s: %(message)s")
    out = out or sys.stdout
    args = build_parser().parse_args(argv)
    try:
        cfg = config_from_args(args)
        return args.func(args, cfg, out)
    except (CLIError, KBError, EvalError, DuplicateDocumentError, OSError, ValueError) as exc:
        print(f"ontosearch {args.command}: error: {exc}", file=sys.stderr)
        return 1

import io
import shutil

import pytest

from ontosearch.cli import main


@pytest.fixture
def e2e(fixtures_dir, tmp_path):
    dst = tmp_path / "e2e"
    shutil.copytree(fixtures_dir / "e2e", dst)
    return dst


def run(*argv):
    out = io.StringIO()
    code = main([str(a) for a in argv], out=out)
    return code, out.getvalue()


def test_kb_validate_ok(fixtures_dir):
    code, text = run("kb-validate", fixtures_dir / "sample_kb.tsv")
    assert code == 0 and text.splitlines()[-1] == "OK"
    assert "facts\t3" in text


def test_kb_validate_cycle(tmp_path):
    p = tmp_path / "kb.tsv"
    p.write_text("#CLASSES\nA\tA\tB\nB\tB\tA\n#ENTITIES\n#RELATIONS\n#FACTS\n", encoding="utf-8")
    code, text = run("kb-validate", p)
    assert code == 1 and "CycleError" in text and text.rstrip().endswith("error(s))")


def test_kb_validate_reports_line(tmp_path):
    p = tmp_path / "kb.tsv"
    p.write_text("#CLASSES\nC\tC\t\n#ENTITIES\ne\tC\tE\t\n#RELATIONS\nr\tr\n#FACTS\ne\tr\tghost\n",
                 encoding="utf-8")
    code, text = run("kb-validate", p)
    assert code == 1 and f"{p}:8: DanglingReferenceError" in text


def test_index_and_search(e2e, tmp_path):
    idx = tmp_path / "idx"
    code, text = run("index", e2e / "corpus", "--mode", "semantic", "--kb", e2e / "kb.tsv",
                     "--relations", e2e / "relations.tsv", "--index-dir", idx)
    assert code == 0 and "documents\t12" in text
    assert (idx / "index.tsv").exists() and (idx / "meta.txt").exists()
    code, text = run("search", "Where is South Bend?", "--mode", "semantic", "--kb", e2e / "kb.tsv",
                     "--relations", e2e / "relations.tsv", "--index-dir", idx, "--k", "3")
    rows = [line.split("\t") for line in text.splitlines()]
    assert code == 0 and len(rows) <= 3 and rows[0][0] == "1"
    assert {r[1] for r in rows} >= {"d09", "d10"}


def test_mode_mismatch_rejected(e2e, tmp_path):
    idx = tmp_path / "idx"
    assert run("index", e2e / "corpus", "--mode", "keyword", "--index-dir", idx)[0] == 0
    code, _ = run("search", "South Bend", "--mode", "ne_kw", "--kb", e2e / "kb.tsv",
                  "--index-dir", idx)
    assert code == 1


def test_entity_mode_needs_kb(e2e, tmp_path):
    code, _ = run("index", e2e / "corpus", "--mode", "ne_kw", "--index-dir", tmp_path / "i")
    assert code == 1


def test_expand_output(e2e):
    code, text = run("expand", "Where was George Washington born?", "--kb", e2e / "kb.tsv",
                     "--relations", e2e / "relations.tsv")
    lines = text.splitlines()
    assert code == 0
    assert "interrogative\tLocation" in lines and "relation\tbornIn" in lines
    assert "added\tWestmoreland Country" in lines and "status\tEXPANDED" in lines


def test_batch_and_eval(e2e, tmp_path):
    runs = []
    for mode in ("keyword", "semantic"):
        idx = tmp_path / mode
        common = ["--mode", mode, "--kb", e2e / "kb.tsv", "--relations", e2e / "relations.tsv",
                  "--index-dir", idx]
        assert run("index", e2e / "corpus", *common)[0] == 0
        out = tmp_path / f"{mode}.run"
        assert run("batch", e2e / "queries.tsv", *common, "-o", out)[0] == 0
        first = out.read_text().splitlines()[0].split("\t")
        assert len(first) == 6 and first[1] == "Q0" and first[5] == mode
        runs.append(out)
    records = tmp_path / "records.csv"
    code, table = run("eval", *runs, "--qrels", e2e / "qrels.txt", "--records", records)
    assert code == 0
    assert [line.split()[:2] for line in table.splitlines()[1:]] == [
        ["P(%)", "keyword"], ["P(%)", "semantic"], ["F(%)", "keyword"], ["F(%)", "semantic"]]
    assert records.read_text().startswith("run,level,metric,value\n")


def test_batch_to_stdout_skips_bad_lines(e2e, tmp_path):
    idx = tmp_path / "idx"
    run("index", e2e / "corpus", "--mode", "keyword", "--index-dir", idx)
    q = tmp_path / "q.tsv"
    q.write_text("no tab here\nqa\tthe of\nqb\ttsunami\n", encoding="utf-8")
    code, text = run("batch", q, "--mode", "keyword", "--index-dir", idx)
    assert code == 0
    assert {line.split("\t")[0] for line in text.splitlines()} == {"qb"}


def test_eval_unknown_query(e2e, tmp_path):
    r = tmp_path / "r.run"
    r.write_text("zz\tQ0\td01\t1\t1.0\tt\n", encoding="utf-8")
    assert run("eval", r, "--qrels", e2e / "qrels.txt")[0] == 1


def test_config_file_and_override(e2e, tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text(f"# settings\nkb = {e2e / 'kb.tsv'}\nrelations = {e2e / 'relations.tsv'}\n"
                   f"mode = ne_kw\nindex-dir = {tmp_path / 'idx'}\n", encoding="utf-8")
    assert run("index", e2e / "corpus", "--config", cfg)[0] == 0
    assert "mode=ne_kw" in (tmp_path / "idx" / "meta.txt").read_text()
    # flag wins over the file
    code, text = run("expand", "Where is South Bend?", "--config", cfg, "--mode", "semantic")
    assert code == 0 and "added\tIndiana" in text


def test_config_unknown_key(tmp_path):
    cfg = tmp_path / "bad.cfg"
    cfg.write_text("colour = blue\n", encoding="utf-8")
    assert run("kb-validate", "--config", cfg)[0] == 1

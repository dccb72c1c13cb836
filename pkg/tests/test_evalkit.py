import itertools

import pytest
from hypothesis import given
from hypothesis import strategies as st

from ontosearch.evalkit import (
    LEVELS,
    EvalCurve,
    EvalError,
    Qrels,
    Run,
    average_curves,
    compare_runs,
    evaluate_run,
    f_curve,
    f_measure,
    format_run_lines,
    interpolate_11pt,
    load_qrels,
    load_run,
    pr_points,
    relabel,
)


def brute_interp(points, level):
    return max((p for r, p in points if r >= level), default=0.0)


def test_pr_points_example():
    pts = pr_points(["d1", "d2", "d3"], {"d1", "d3"})
    assert pts[0] == (0.5, 1.0) and pts[1] == (0.5, 0.5)
    assert pts[2] == pytest.approx((1.0, 2 / 3))


def test_interpolation_example():
    curve = interpolate_11pt(pr_points(["d1", "d2", "d3"], {"d1", "d3"}))
    assert curve.values[:6] == (1.0,) * 6
    assert curve.values[6:] == pytest.approx((2 / 3,) * 5)


def test_interpolation_empty():
    assert interpolate_11pt([]).values == (0.0,) * 11


def test_pr_points_needs_relevant():
    with pytest.raises(EvalError):
        pr_points(["a"], set())


@given(st.lists(st.booleans(), max_size=15), st.integers(0, 4))
def test_interpolation_matches_brute_force(labels, missing):
    ranked = [f"d{i}" for i in range(len(labels))]
    relevant = {d for d, rel in zip(ranked, labels) if rel} | {f"m{i}" for i in range(missing)}
    if not relevant:
        return
    pts = pr_points(ranked, relevant)
    curve = interpolate_11pt(pts)
    for level, value in curve:
        assert value == brute_interp(pts, level)
    assert all(a >= b for a, b in zip(curve.values, curve.values[1:]))


@pytest.mark.parametrize("p,r,expected", [(0.5, 0.5, 0.5), (0.7, 0.0, 0.0), (1.0, 0.5, 2 / 3),
                                          (0.0, 0.0, 0.0)])
def test_f_measure(p, r, expected):
    assert f_measure(p, r) == pytest.approx(expected, abs=1e-12)


def test_curve_shape():
    with pytest.raises(ValueError):
        EvalCurve((1.0,) * 10)
    c = EvalCurve(tuple(LEVELS))
    assert c.at(0.3) == 0.3 and c[10] == 1.0
    assert c.mean == pytest.approx(0.5)


def test_average_curves():
    a = EvalCurve((0.4,) * 11)
    assert average_curves([a]) == a
    assert average_curves([a, EvalCurve((0.6,) * 11)]).values == pytest.approx((0.5,) * 11)
    with pytest.raises(EvalError):
        average_curves([])


def test_mean_f_differs_from_f_of_mean():
    # per-query F before averaging: P = 1.0 and 0.2 at recall 1.0
    qrels = Qrels({"a": frozenset({"x"}), "b": frozenset({"x"})})
    run = Run("t", {"a": [("x", 1.0)], "b": [(f"n{i}", 1.0) for i in range(4)] + [("x", 0.5)]})
    ev = evaluate_run(run, qrels)
    assert ev.precision.at(1.0) == pytest.approx(0.6)
    assert ev.f.at(1.0) == pytest.approx((1.0 + f_measure(0.2, 1.0)) / 2)
    assert ev.f.at(1.0) != pytest.approx(f_measure(0.6, 1.0))


def test_perfect_run():
    qrels = Qrels({"q": frozenset({"a", "b", "c"})})
    ev = evaluate_run(Run("t", {"q": [("a", 3.0), ("b", 2.0), ("c", 1.0)]}), qrels)
    assert ev.precision.values == (1.0,) * 11
    for r, f in ev.f:
        assert f == pytest.approx(2 * r / (1 + r))


def test_nothing_relevant_retrieved():
    qrels = Qrels({"q": frozenset({"a"})})
    ev = evaluate_run(Run("t", {"q": [("x", 1.0), ("y", 0.5)]}), qrels)
    assert ev.precision.values == (0.0,) * 11 and ev.f.values == (0.0,) * 11


def test_missing_query_counts_as_empty():
    qrels = Qrels({"q1": frozenset({"a"}), "q2": frozenset({"b"})})
    ev = evaluate_run(Run("t", {"q1": [("a", 1.0)]}), qrels)
    assert ev.precision.at(0.0) == 0.5


def test_unknown_query_rejected():
    with pytest.raises(EvalError):
        evaluate_run(Run("t", {"zz": [("a", 1.0)]}), Qrels({"q": frozenset({"a"})}))


def test_hand_computed_three_queries():
    qrels = Qrels({"q1": frozenset({"a", "c"}), "q2": frozenset({"b"}), "q3": frozenset({"z"})})
    run = Run("t", {
        "q1": [("a", 0.9), ("b", 0.8), ("c", 0.7)],   # 1.0 up to 0.5, then 2/3
        "q2": [("a", 0.9), ("b", 0.8)],               # 0.5 everywhere
        "q3": [("a", 0.9)],                           # 0 everywhere
    })
    ev = evaluate_run(run, qrels)
    assert ev.precision.at(0.0) == pytest.approx(1.5 / 3)
    assert ev.precision.at(0.5) == pytest.approx(1.5 / 3)
    assert ev.precision.at(0.6) == pytest.approx((2 / 3 + 0.5) / 3)
    assert ev.f.at(0.0) == 0.0
    assert ev.f.at(1.0) == pytest.approx((0.8 + 2 / 3) / 3)


def test_depth_cutoff():
    qrels = Qrels({"q": frozenset({"b"})})
    run = Run("t", {"q": [("a", 2.0), ("b", 1.0)]})
    assert evaluate_run(run, qrels, depth=1).precision.values == (0.0,) * 11
    assert evaluate_run(run, qrels, depth=2).precision.at(1.0) == 0.5


def test_relabel_invariance():
    qrels = Qrels({"q": frozenset({"a", "c"})})
    run = Run("t", {"q": [("a", 3.0), ("b", 2.0), ("c", 1.0)]})
    r2, q2 = relabel({"a": "X", "b": "Y", "c": "Z"}, run, qrels)
    assert evaluate_run(r2, q2).precision == evaluate_run(run, qrels).precision


def test_moving_relevant_doc_up_never_hurts():
    qrels = Qrels({"q": frozenset({"r1", "r2"})})
    docs = ["n1", "r1", "n2", "r2", "n3"]
    for i in range(1, len(docs)):
        if docs[i].startswith("r") and docs[i - 1].startswith("n"):
            better = docs[:i - 1] + [docs[i], docs[i - 1]] + docs[i + 1:]
            base = evaluate_run(Run("t", {"q": [(d, 0.0) for d in docs]}), qrels).precision
            up = evaluate_run(Run("t", {"q": [(d, 0.0) for d in better]}), qrels).precision
            assert all(u >= b for u, b in zip(up.values, base.values))


def test_run_round_trip(tmp_path):
    lines = format_run_lines("q1", [("d2", 0.5), ("d1", 0.25)], "semantic")
    assert lines[0] == "q1\tQ0\td2\t1\t0.5\tsemantic"
    p = tmp_path / "run.txt"
    p.write_text("\n".join(lines) + "\n", encoding="utf-8")
    run = load_run(p)
    assert run.tag == "semantic" and run.results["q1"] == [("d2", 0.5), ("d1", 0.25)]


def test_run_duplicate_document(tmp_path):
    p = tmp_path / "run.txt"
    p.write_text("q Q0 a 1 1.0 t\nq Q0 a 2 0.5 t\n", encoding="utf-8")
    with pytest.raises(EvalError):
        load_run(p)


def test_run_malformed(tmp_path):
    p = tmp_path / "run.txt"
    p.write_text("q Q0 a 1\n", encoding="utf-8")
    with pytest.raises(EvalError):
        load_run(p)


def test_qrels_loading(tmp_path):
    p = tmp_path / "qrels"
    p.write_text("q1 0 a 1\nq1 0 b 0\nq2 0 c 0\n", encoding="utf-8")
    with pytest.raises(EvalError):
        load_qrels(p)
    assert load_qrels(p, drop_empty=True).relevant == {"q1": frozenset({"a"})}
    p.write_text("q1 0 a\n", encoding="utf-8")
    with pytest.raises(EvalError):
        load_qrels(p)


def test_comparison_outputs():
    qrels = Qrels({"q": frozenset({"a"})})
    cmp = compare_runs([Run("one", {"q": [("a", 1.0)]}), Run("two", {"q": [("b", 1.0), ("a", 0.5)]})],
                       qrels)
    table = cmp.table().splitlines()
    assert table[0].split()[:3] == ["Measure", "Model", "0"] and table[0].split()[-1] == "Mean"
    assert len(table) == 5
    records = cmp.records().splitlines()
    assert records[0] == "run,level,metric,value"
    assert "one,1.0,P,1.000000" in records and "two,1.0,P,0.500000" in records
    assert len(records) == 1 + 2 * 2 * 11
    with pytest.raises(EvalError):
        compare_runs([], qrels)


def test_f_curve_zero_at_recall_zero():
    assert f_curve(EvalCurve((0.9,) * 11)).values[0] == 0.0


def test_exhaustive_small_permutations():
    docs = ["a", "b", "c"]
    for perm in itertools.permutations(docs):
        for mask in itertools.product([0, 1], repeat=3):
            rel = {d for d, m in zip(docs, mask) if m}
            if not rel:
                continue
            pts = pr_points(list(perm), rel)
            assert interpolate_11pt(pts).values == tuple(brute_interp(pts, lv) for lv in LEVELS)

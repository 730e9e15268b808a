import random

import pytest
from hypothesis import given, settings, strategies as st

from relp.corpus import Stance
from relp.evaluation import ClassScores, MetricsReport, evaluate, report_table

from oracles import confusion_oracle

F, A = Stance.FOR, Stance.AGAINST


def users(labels):
    return {f"u{k}": s for k, s in enumerate(labels)}


def test_hand_example():
    r = evaluate(users([F, A, A, A]), users([F, F, A, A]))
    assert r.per_class[F] == ClassScores(1.0, 0.5, pytest.approx(2 / 3, abs=1e-12))
    assert r.per_class[A].precision == pytest.approx(2 / 3, abs=1e-12)
    assert r.per_class[A].recall == 1.0
    assert r.per_class[A].f1 == pytest.approx(0.8, abs=1e-12)
    assert r.macro.f1 == pytest.approx((2 / 3 + 0.8) / 2, abs=1e-12)
    assert r.confusion.pairs[F, A] == 1 and r.confusion.total == 4


def test_identity():
    gold = users([F, A, A, F, A])
    r = evaluate(gold, gold)
    assert r.macro == ClassScores(1.0, 1.0, 1.0)


def test_empty_prediction():
    r = evaluate({}, users([F, A]))
    assert r.macro == ClassScores(0.0, 0.0, 0.0)
    assert r.confusion.unpredicted == {F: 1, A: 1}


def test_extra_predictions_ignored():
    r = evaluate({"u0": F, "zz": A}, {"u0": F})
    assert r.per_class[F].precision == 1.0
    assert r.per_class[A] == ClassScores(0.0, 0.0, 0.0)


def test_empty_gold_rejected():
    with pytest.raises(ValueError):
        evaluate({}, {})


def test_macro_f1_is_mean_of_class_f1():
    r = evaluate(users([F, F, F, A]), users([F, A, A, A]))
    from_pr = 2 * r.macro.precision * r.macro.recall / (r.macro.precision + r.macro.recall)
    assert r.macro.f1 == pytest.approx((r.per_class[F].f1 + r.per_class[A].f1) / 2)
    assert r.macro.f1 != pytest.approx(from_pr)


@settings(max_examples=200, deadline=None)
@given(seed=st.integers(0, 10**6))
def test_matches_confusion_oracle_and_permutation(seed):
    rng = random.Random(seed)
    gold = {f"u{k}": rng.choice([F, A]) for k in range(rng.randint(1, 30))}
    pred = {u: rng.choice([F, A]) for u in gold if rng.random() < 0.9}
    r = evaluate(pred, gold)
    o = confusion_oracle(pred, gold)
    for c in (F, A):
        assert (r.per_class[c].precision, r.per_class[c].recall, r.per_class[c].f1) == pytest.approx(
            tuple(float(x) for x in o[c]), abs=1e-12)
    assert r.confusion.total == len(gold)
    items = list(gold.items())
    rng.shuffle(items)
    assert evaluate(dict(reversed(list(pred.items()))), dict(items)) == r
    for v in (r.macro.precision, r.macro.recall, r.macro.f1):
        assert 0 <= v <= 1


def report(p, r, f):
    s = ClassScores(p, r, f)
    return MetricsReport({F: s, A: s}, s, None)


def test_table_formatting():
    t = report_table({"ReLP": report(0.9673, 0.9336, 0.9501)})
    assert "96.73" in t.text and "93.36" in t.text and "95.01" in t.text
    assert t.csv.splitlines()[0] == "method,group,class,precision,recall,f1"
    assert "ReLP,all,macro,96.73,93.36,95.01" in t.csv.splitlines()


def test_table_requires_methods():
    with pytest.raises(ValueError):
        report_table({})


def test_table_rows_keep_order_and_groups():
    t = report_table({
        "ReLP": {"moderate": report(0.9673, 0.9336, 0.9501), "visible": report(0.9418, 0.9759, 0.9585)},
        "B1": {"moderate": report(0.8109, 0.8079, 0.8094), "visible": report(0.7575, 0.8823, 0.8151)},
    })
    rows = t.text.splitlines()[3:]
    assert [r.split()[0] for r in rows] == ["ReLP", "B1"]
    assert rows[0].split("|")[2].split() == ["94.18", "97.59", "95.85"]
    assert len(t.csv.splitlines()) == 1 + 2 * 2 * 3

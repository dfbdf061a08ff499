"""Smoke tests for the sqlconf python bindings."""

import math

import pytest

import sqlconf


def test_embed_and_cosine():
    v = sqlconf.embed("What is the total quantity of Apple_1 ordered?")
    assert len(v) == 256
    assert math.isclose(sum(x * x for x in v), 1.0, abs_tol=1e-12)
    assert v == sqlconf.embed("What is the total quantity of Apple_1 ordered?")
    assert math.isclose(sqlconf.cosine(v, v), 1.0, abs_tol=1e-12)
    assert sqlconf.cosine([0.0] * 4, [1.0, 0.0, 0.0, 0.0]) == 0.0
    with pytest.raises(ValueError):
        sqlconf.cosine([1.0], [1.0, 2.0])


def test_auroc():
    assert sqlconf.compute_auroc([0.9, 0.8, 0.2], [True, True, False]) == 1.0
    assert sqlconf.compute_auroc([0.5, 0.5], [True, False]) == 0.5
    with pytest.raises(ValueError):
        sqlconf.compute_auroc([0.1, 0.2], [True, True])


def test_index_and_confidence():
    index = sqlconf.QuestionIndex.build(
        [
            ("a", "What is the total quantity of Apple_1 ordered?"),
            ("b", "What is the total quantity of Olive_3 ordered?"),
            ("c", "Which sites stock Mango_2?"),
        ]
    )
    assert len(index) == 3
    hits = index.top_k("What is the total quantity of Apple_1 ordered?", k=2)
    assert hits[0][0] == "a"
    assert math.isclose(hits[0][1], 1.0, abs_tol=1e-9)

    verbatim = sqlconf.embedding_confidence(
        index, "What is the total quantity of Apple_1 ordered?", k=1
    )
    off_topic = sqlconf.embedding_confidence(index, "what is the weather", k=1)
    assert verbatim > off_topic


def test_bank_pipeline_end_to_end(tmp_path):
    bank_path = str(tmp_path / "bank.jsonl")
    db_path = str(tmp_path / "fixture.db")
    count = sqlconf.generate_bank(
        bank_path, db_path, total=24, simple=16, complex=8, seed=5
    )
    assert count == 24
    assert len(sqlconf.load_bank_questions(bank_path)) == 24

    rows = sqlconf.execute_sql(
        db_path, "SELECT SUM(quantity) FROM orders WHERE product_ID = 'Apple_1'"
    )
    assert rows == [(40,)]
    assert sqlconf.results_match(
        db_path, "SELECT 1 UNION SELECT 2", "SELECT 2 UNION SELECT 1"
    )

    report = sqlconf.run_simulated_evaluation(bank_path, db_path, seed=5, workers=2)
    assert report["metadata"]["record_count"] > 0
    assert "embedding" in report["strategies"]
    sweep = report["strategies"]["embedding"]["sweep"]
    assert sweep[0]["return_rate"] == 1.0

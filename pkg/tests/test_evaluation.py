import json

from system_evaluation.evaluation import (
    DEFAULT_TRIALS,
    evaluate_classifier,
    evaluate_degenerate_stratum,
    evaluate_nullity,
    evaluate_realness,
    evaluate_round_trip,
    evaluate_skew,
    grid,
    main,
)


def test_grid_covers_acceptance_sizes():
    triples = grid()
    assert len(triples) == 3 * (6 + 5 + 4)
    assert all(N >= d for d, N, _ in triples)


def test_realness_sweep():
    report = evaluate_realness(DEFAULT_TRIALS["realness"], seed=0)
    assert report["trials"] == 1000
    assert report["passed"] == 1000
    assert report["worst_residual"] <= 1e-9


def test_round_trip_sweep():
    report = evaluate_round_trip(DEFAULT_TRIALS["round_trip"], seed=0)
    assert report["trials"] == 500
    assert report["failed"] == 0
    assert report["errors"] == {}
    assert report["worst_residual"] <= 1e-7


def test_classifier_sweep():
    report = evaluate_classifier(DEFAULT_TRIALS["classifier"], seed=0)
    assert report["real"]["passed"] == 200
    assert report["complex"]["failed"] == 0
    assert report["complex"]["passed"] + report["complex"]["skipped"] == 200


def test_nullity_sweep():
    assert evaluate_nullity(DEFAULT_TRIALS["nullity"], seed=30)["passed"] == 200


def test_skew_sweep():
    report = evaluate_skew(DEFAULT_TRIALS["skew"], seed=0)
    assert report["trials"] == 1000
    assert report["passed"] == 1000
    assert report["worst_residual"] <= 1e-9


def test_degenerate_stratum_sweep():
    report = evaluate_degenerate_stratum(DEFAULT_TRIALS["degenerate"], seed=0)
    assert report["passed"] == 100
    assert report["worst_residual"] <= 1e-9


def test_main_writes_report(tmp_path):
    out = tmp_path / "evaluation.json"
    assert main(["--trials", "5", "--out", str(out)]) == 0
    report = json.loads(out.read_text(encoding="utf-8"))
    assert set(report) == {"realness", "round_trip", "classifier", "nullity", "skew", "degenerate"}
    assert all(part["trials"] == 5 for name, part in report.items() if name != "classifier")

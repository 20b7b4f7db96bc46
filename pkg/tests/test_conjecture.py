import numpy as np
import pytest
from pydantic import ValidationError

import conjecture.scan_service as scan_service
import conjecture.tangent as tangent
from common.exceptions import InvalidHRep, StepTooLarge, StepTooSmall
from conjecture import (
    CSV_COLUMNS,
    NEAR_REAL_POINT,
    ParameterLayout,
    RankReport,
    ScanConfig,
    ScanService,
    TrialOutcome,
    aggregate,
    ambient_dim,
    expected_chart_dim_complex,
    expected_image_rank_real,
    gram_map_rank,
    gram_map_rank_report,
    imaginary_fraction,
    linearized_constraints,
    run_trial,
    tangent_basis,
)
from hrep import canonicalize_hrep, sample


def test_closed_form_counts():
    assert expected_chart_dim_complex(1, 2, 1) == 4
    assert expected_image_rank_real(1, 2, 1) == 4
    assert expected_chart_dim_complex(1, 3, 1) == 5
    assert expected_image_rank_real(1, 3, 1) == 6
    assert expected_chart_dim_complex(2, 3, 1) == 11
    assert expected_image_rank_real(2, 3, 1) == 11
    assert ambient_dim(2, 1) == 9


def test_parameter_layout_is_isometric():
    h = canonicalize_hrep(sample(2, 3, 2, seed=4))
    layout = ParameterLayout(2, 3, 2)
    assert layout.size == 2 * 2 * 3 + 3 * 2 * 3
    theta = layout.pack_hrep(h)
    W, R = layout.unpack(theta)
    for a, b in zip(W + R, h.W + h.R):
        np.testing.assert_allclose(a, b, atol=1e-14)
    norm = np.sqrt(sum(np.sum(w ** 2) for w in h.W) + sum(np.sum(r ** 2) for r in h.R))
    assert np.linalg.norm(theta) == pytest.approx(norm)


def test_e1_tangent_space(e1_hrep):
    basis = tangent_basis(e1_hrep)
    assert basis.shape == (6, 4)
    np.testing.assert_allclose(basis.T @ basis, np.eye(4), atol=1e-10)
    np.testing.assert_allclose(linearized_constraints(e1_hrep) @ basis, 0.0, atol=1e-9)
    assert gram_map_rank(e1_hrep, basis) == 4


def test_tangent_basis_needs_canonical_point(e1_hrep):
    loose = e1_hrep.with_blocks(e1_hrep.W, e1_hrep.R, canonical=False)
    with pytest.raises(InvalidHRep):
        tangent_basis(loose)
    with pytest.raises(ValueError):
        linearized_constraints(e1_hrep, "imaginary")


@pytest.mark.parametrize("d, N, P", [(1, 2, 1), (2, 3, 1), (1, 3, 2)])
def test_real_stratum_matches_count(d, N, P):
    h = canonicalize_hrep(sample(d, N, P, seed=2, scale=0.0))
    basis = tangent_basis(h, "real")
    assert basis.shape[1] == expected_image_rank_real(d, N, P)
    report = gram_map_rank_report(h, basis)
    assert report.stable
    assert report.rank_full_step == expected_image_rank_real(d, N, P)


def test_complex_stratum_rank_is_stable_and_bounded():
    h = canonicalize_hrep(sample(2, 4, 1, seed=3))
    basis = tangent_basis(h)
    assert basis.shape[1] == expected_chart_dim_complex(2, 4, 1)
    report = gram_map_rank_report(h, basis)
    assert report.stable
    assert report.rank_full_step <= basis.shape[1]
    assert report.rank_full_step <= ambient_dim(4, 1)


def test_rank_instability_is_reported(e1_hrep, monkeypatch):
    basis = tangent_basis(e1_hrep)
    monkeypatch.setattr(tangent, "gram_map_rank_report", lambda *args: RankReport(5, 4, 1.0, 1e-5))
    with pytest.raises(StepTooLarge) as info:
        gram_map_rank(e1_hrep, basis)
    assert (info.value.rank_full, info.value.rank_half) == (5, 4)

    monkeypatch.setattr(tangent, "gram_map_rank_report", lambda *args: RankReport(3, 4, 1.0, 1e-5))
    with pytest.raises(StepTooSmall):
        gram_map_rank(e1_hrep, basis)


def test_aggregate_picks_smallest_modal_tuple():
    outcomes = [TrialOutcome(ranks=(4, 4, 4, 4)), TrialOutcome(ranks=(4, 3, 4, 4)),
                TrialOutcome(failure="StepTooLarge"), TrialOutcome(failure="DegenerateSpectrum"),
                TrialOutcome(failure="StepTooLarge")]
    row = aggregate(1, 2, 1, 5, outcomes)
    assert (row.chart_dim_C, row.image_rank_C, row.chart_dim_R, row.image_rank_R) == (4, 3, 4, 4)
    assert row.margin == 1
    assert row.agreement == 1
    assert row.flags == "DegenerateSpectrum=1;StepTooLarge=2"


def test_aggregate_without_completed_trials():
    row = aggregate(1, 2, 1, 2, [TrialOutcome(failure="SamplingFailed")] * 2)
    assert row.image_rank_C == -1 and row.agreement == 0
    assert row.flags == "SamplingFailed=2;no_trial_completed=1"


def test_aggregate_flags_violated_bounds():
    row = aggregate(1, 2, 1, 1, [TrialOutcome(ranks=(3, 4, 4, 4))])
    assert row.flags == "image_exceeds_chart=1"


def test_scan_config_validation():
    with pytest.raises(ValidationError):
        ScanConfig(grid=[])
    with pytest.raises(ValidationError):
        ScanConfig(grid=[(3, 2, 1)])
    with pytest.raises(ValidationError):
        ScanConfig(grid=[(1, 2, 1)], trials=0)
    cfg = ScanConfig.from_lists([1, 2], [1], [1, 2, 3])
    assert cfg.grid == [(1, 1, 1), (1, 2, 1), (1, 3, 1), (2, 2, 1), (2, 3, 1)]
    assert ScanConfig(grid=[(1, 2, 1), (1, 2, 1)]).grid == [(1, 2, 1)]


def test_run_trial_is_deterministic():
    task = (1, 3, 1, 7, 1.0, 1e-5, 1e-6, tangent.DEFAULT_TOLERANCES)
    assert run_trial(task) == run_trial(task)


def test_run_trial_on_clearly_complex_point():
    seed = next(s for s in range(50) if imaginary_fraction(canonicalize_hrep(sample(1, 3, 1, seed=s))) > 0.2)
    outcome = run_trial((1, 3, 1, seed, 1.0, 1e-5, 1e-6, tangent.DEFAULT_TOLERANCES))
    assert outcome.ranks == (5, 5, 6, 6)
    assert outcome.flags == ()


def test_run_trial_flags_near_real_point(monkeypatch):
    monkeypatch.setattr(scan_service, "imaginary_fraction", lambda h: 1e-4)
    outcome = run_trial((1, 2, 1, 0, 1.0, 1e-5, 1e-6, tangent.DEFAULT_TOLERANCES))
    assert outcome.ranks is not None
    assert outcome.flags == (NEAR_REAL_POINT,)


def test_imaginary_fraction(e1_hrep):
    assert imaginary_fraction(e1_hrep) == pytest.approx(2.0 / np.sqrt(6.0))
    assert imaginary_fraction(sample(2, 3, 1, seed=0, scale=0.0)) == 0.0


def test_aggregate_counts_trial_flags():
    outcomes = [TrialOutcome(ranks=(5, 4, 6, 6), flags=(NEAR_REAL_POINT,)),
                TrialOutcome(ranks=(5, 5, 6, 6)), TrialOutcome(ranks=(5, 5, 6, 6))]
    row = aggregate(1, 3, 1, 3, outcomes)
    assert row.image_rank_C == 5
    assert row.flags == "near_real_point=1"


def test_parallel_scan_is_byte_identical(tmp_path):
    grid = [(1, 2, 1), (1, 3, 1), (2, 3, 1)]
    serial, parallel = tmp_path / "serial.csv", tmp_path / "parallel.csv"
    ScanService(ScanConfig(grid=grid, trials=3, seed=11)).write_csv(str(serial))
    ScanService(ScanConfig(grid=grid, trials=3, seed=11, workers=2)).write_csv(str(parallel))
    assert serial.read_bytes() == parallel.read_bytes()


def test_margin_pattern_for_single_row_factors(tmp_path):
    service = ScanService(ScanConfig(grid=[(1, 4, 1), (1, 2, 1), (1, 3, 1)], trials=2, seed=0))
    rows = service.run()
    assert [(row.d, row.P, row.N) for row in rows] == [(1, 1, 2), (1, 1, 3), (1, 1, 4)]
    assert [row.margin for row in rows] == [0, 1, 2]
    for row in rows:
        assert row.flags == ""
        assert row.agreement == 2
        assert row.chart_dim_C == expected_chart_dim_complex(row.d, row.N, row.P)
        assert row.image_rank_R == expected_image_rank_real(row.d, row.N, row.P)
        assert row.image_rank_C <= row.chart_dim_C

    table = service.margin_table()
    assert list(table["expected_image_rank_R"]) == [4, 6, 8]

    first, second = tmp_path / "a.csv", tmp_path / "b.csv"
    service.write_csv(str(first))
    ScanService(ScanConfig(grid=[(1, 2, 1), (1, 3, 1), (1, 4, 1)], trials=2, seed=0)).write_csv(str(second))
    assert first.read_bytes() == second.read_bytes()
    assert first.read_text(encoding="utf-8").splitlines()[0] == ",".join(CSV_COLUMNS)


def test_margin_is_monotone_in_n():
    rows = ScanService(ScanConfig.from_lists([1], [2], [2, 3, 4, 5], trials=1, seed=1)).run()
    margins = [row.margin for row in rows]
    assert margins == sorted(margins)

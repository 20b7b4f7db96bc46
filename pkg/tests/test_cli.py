import json

import numpy as np
import pandas as pd
import pytest

from app import EXIT_COMPLEX_ONLY, _scan_config, build_parser, main
from artifacts.schemas import HRepModel, from_model, read_json, to_model, write_json
from common.config import DEFAULT_TOLERANCES, Config
from conjecture import CSV_COLUMNS
from hrep import canonicalize_hrep, hrep_distance, sample, to_factor
from polymat import PolyMatrix


def _write_matrix(path, matrix):
    path.write_text(json.dumps(matrix), encoding="utf-8")
    return str(path)


def test_generate_is_byte_identical(tmp_path):
    first, second = tmp_path / "a", tmp_path / "b"
    args = ["generate", "--d", "1", "--N", "2", "--P", "1", "--seed", "7"]
    assert main(args + ["--out", str(first)]) == 0
    assert main(args + ["--out", str(second)]) == 0
    for name in ("hrep.json", "factor.json", "gram.json"):
        assert (first / name).read_bytes() == (second / name).read_bytes()
    assert (first / "manifest.json").exists()


def test_generate_zero_scale_has_real_factor(tmp_path):
    assert main(["generate", "--d", "2", "--N", "3", "--P", "2", "--seed", "1", "--scale", "0",
                 "--out", str(tmp_path)]) == 0
    data = json.loads((tmp_path / "factor.json").read_text(encoding="utf-8"))
    assert not np.any(np.array(data["coeffs_im"]))


def test_generate_rejects_bad_sizes(tmp_path):
    assert main(["generate", "--d", "3", "--N", "2", "--P", "1", "--out", str(tmp_path)]) == 1


def test_classify_exit_codes(tmp_path, e1_hrep):
    e1 = tmp_path / "e1.json"
    write_json(str(e1), to_model(to_factor(e1_hrep)))
    assert main(["classify", "--input", str(e1)]) == EXIT_COMPLEX_ONLY

    real = tmp_path / "real.json"
    write_json(str(real), to_model(to_factor(sample(1, 3, 1, seed=2, scale=0.0))))
    out = tmp_path / "classification.json"
    assert main(["classify", "--input", str(real), "--out", str(out)]) == 0
    verdict = json.loads(out.read_text(encoding="utf-8"))
    assert verdict["verdict"] == "RealFactorable"
    assert verdict["real_factor"]["degree"] == 1
    assert (tmp_path / "classification.manifest.json").exists()

    non_real = tmp_path / "non_real.json"
    write_json(str(non_real), to_model(PolyMatrix((np.array([[1.0, 0.0]]), np.array([[0.0, 1.0j]])))))
    assert main(["classify", "--input", str(non_real)]) == 4

    deficient = tmp_path / "deficient.json"
    write_json(str(deficient), to_model(PolyMatrix((np.array([[0.0, 0.0]]), np.array([[1.0, 0.0]])))))
    assert main(["classify", "--input", str(deficient)]) == 5


def test_recover_matches_canonical_sample(tmp_path):
    assert main(["generate", "--d", "2", "--N", "4", "--P", "2", "--seed", "3", "--out", str(tmp_path)]) == 0
    out = tmp_path / "recovered.json"
    assert main(["recover", "--input", str(tmp_path / "factor.json"), "--out", str(out)]) == 0
    recovered = from_model(read_json(str(out), HRepModel))
    assert hrep_distance(recovered, canonicalize_hrep(sample(2, 4, 2, seed=3))) <= 1e-7


def test_recover_real_factor_has_zero_w(tmp_path):
    assert main(["generate", "--d", "1", "--N", "3", "--P", "2", "--seed", "4", "--scale", "0",
                 "--out", str(tmp_path)]) == 0
    out = tmp_path / "recovered.json"
    assert main(["recover", "--input", str(tmp_path / "factor.json"), "--out", str(out)]) == 0
    recovered = from_model(read_json(str(out), HRepModel))
    assert recovered.w_norm() <= 1e-12


def test_recover_corrupted_json(tmp_path):
    broken = tmp_path / "factor.json"
    broken.write_text('{"rows": 1, "cols"', encoding="utf-8")
    assert main(["recover", "--input", str(broken), "--out", str(tmp_path / "h.json")]) == 1


def test_scan_writes_csv(tmp_path, capsys):
    out = tmp_path / "scan.csv"
    assert main(["scan", "--d", "1", "--P", "1", "--N", "2,3", "--trials", "1", "--out", str(out)]) == 0
    lines = out.read_text(encoding="utf-8").splitlines()
    assert lines[0] == ",".join(CSV_COLUMNS)
    assert len(lines) == 3
    assert (tmp_path / "scan.manifest.json").exists()
    assert "expected_image_rank_R" in capsys.readouterr().out


def test_scan_from_config_file(tmp_path):
    config = tmp_path / "scan.json"
    config.write_text(json.dumps({"grid": [[1, 2, 1]], "trials": 1, "seed": 5}), encoding="utf-8")
    out = tmp_path / "scan.csv"
    assert main(["scan", "--config", str(config), "--out", str(out)]) == 0
    assert out.read_text(encoding="utf-8").splitlines()[1].startswith("1,1,2,1,4,4,4,4,0,1,")


def test_scan_empty_grid(tmp_path):
    assert main(["scan", "--d", "3", "--N", "2", "--out", str(tmp_path / "scan.csv")]) == 1


def test_solve_skew(tmp_path, capsys):
    A = _write_matrix(tmp_path / "a.json", [[1.0, 0.0]])
    zero = _write_matrix(tmp_path / "zero.json", [[0.0, 0.0], [0.0, 0.0]])
    out = tmp_path / "solution.json"
    assert main(["solve-skew", "--A", A, "--C", zero, "--out", str(out)]) == 0
    solution = json.loads(out.read_text(encoding="utf-8"))
    assert solution["X"] == [[0.0, 0.0]]
    assert "symmetric" in solution["family"]

    C = _write_matrix(tmp_path / "c.json", [[0.0, 3.0], [-3.0, 0.0]])
    assert main(["solve-skew", "--A", A, "--C", C]) == 0
    assert '"residual"' in capsys.readouterr().out

    symmetric = _write_matrix(tmp_path / "sym.json", [[0.0, 1.0], [1.0, 0.0]])
    assert main(["solve-skew", "--A", A, "--C", symmetric]) == 5

    A3 = _write_matrix(tmp_path / "a3.json", [[1.0, 0.0, 0.0]])
    C3 = _write_matrix(tmp_path / "c3.json", [[0.0, 0.0, 0.0], [0.0, 0.0, 1.0], [0.0, -1.0, 0.0]])
    assert main(["solve-skew", "--A", A3, "--C", C3]) == 6


def test_roundtrip():
    assert main(["roundtrip", "--d", "2", "--N", "3", "--P", "2", "--seed", "0"]) == 0


@pytest.mark.parametrize("argv", [[], ["frobnicate"], ["generate", "--d", "1"], ["--tol", "-1", "roundtrip",
                                                                                    "--d", "1", "--N", "2", "--P", "1"]])
def test_usage_errors(argv):
    assert main(argv) == 1


def test_scan_rank_tol_follows_tolerance_scale():
    tolerances = DEFAULT_TOLERANCES.scaled(10.0)
    cfg = _scan_config(build_parser().parse_args(["--tol", "10", "scan"]), Config(), tolerances)
    assert cfg.rank_tol == pytest.approx(1e-5)
    assert cfg.fd_step == DEFAULT_TOLERANCES.fd_step

    explicit = build_parser().parse_args(["--tol", "10", "scan", "--rank-tol", "1e-7", "--fd-step", "1e-4"])
    cfg = _scan_config(explicit, Config(), tolerances)
    assert (cfg.rank_tol, cfg.fd_step) == (1e-7, 1e-4)


def test_scan_modal_ranks_do_not_depend_on_trial_count(tmp_path):
    one, eight = tmp_path / "one.csv", tmp_path / "eight.csv"
    base = ["scan", "--d", "1", "--P", "1", "--N", "2,3,4"]
    assert main(base + ["--trials", "1", "--out", str(one)]) == 0
    assert main(base + ["--trials", "8", "--out", str(eight)]) == 0
    columns = ["d", "P", "N", "chart_dim_C", "image_rank_C", "chart_dim_R", "image_rank_R", "margin"]
    pd.testing.assert_frame_equal(pd.read_csv(one)[columns], pd.read_csv(eight)[columns])


@pytest.mark.parametrize("document", [
    '{"rows": 0, "cols": 2, "degree": 0, "coeffs_re": [[]], "coeffs_im": [[]]}',
    '{"rows": 1, "cols": 0, "degree": 0, "coeffs_re": [[[]]], "coeffs_im": [[[]]]}',
    '{"rows": 1, "cols": 1, "degree": -1, "coeffs_re": [], "coeffs_im": []}',
    '{"rows": 1, "cols": 1, "degree": 0, "coeffs_re": [[[NaN]]], "coeffs_im": [[[0.0]]]}',
    '{"rows": 1, "cols": 1, "degree": 0, "coeffs_re": [[[1.0]]], "coeffs_im": [[[Infinity]]]}',
])
def test_classify_rejects_malformed_factor(tmp_path, document):
    path = tmp_path / "factor.json"
    path.write_text(document, encoding="utf-8")
    assert main(["classify", "--input", str(path)]) == 1


def test_solve_skew_rejects_empty_matrix(tmp_path):
    A = _write_matrix(tmp_path / "a.json", [])
    C = _write_matrix(tmp_path / "c.json", [[0.0]])
    assert main(["solve-skew", "--A", A, "--C", C]) == 1

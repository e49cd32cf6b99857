import json
from unittest.mock import patch

import pytest

from lrpossib import likelihood as lk
from lrpossib import types
from lrpossib.__main__ import EXIT_CONVERGENCE, EXIT_INPUT, EXIT_OK, main

BINOMIAL_DOC = {
    "model": {"name": "binomial", "params": {"n": 8}},
    "sample": {"data": [4]},
    "regions": [{"type": "box", "name": "theta0", "intervals": [{"lower": 0.4, "upper": 0.6}]}],
    "optimizer": {"threads": 1},
}


@pytest.fixture
def binomial_spec(tmp_path):
    path = tmp_path.joinpath("binomial.json")
    path.write_text(json.dumps(BINOMIAL_DOC))
    return str(path)


def run(argv, capsys):
    code = main(argv)
    return code, capsys.readouterr().out


def test_evidence(binomial_spec, capsys):
    code, out = run(["evidence", "--spec", binomial_spec], capsys)
    assert code == EXIT_OK
    report = types.EvidenceReport.model_validate(json.loads(out))
    assert report.nu0 == 1.0
    assert report.nu0c == pytest.approx(0.96 ** 4, abs=5e-4)
    assert report.mle == [0.5]


def test_evidence_from_flags(capsys):
    region = json.dumps({"type": "box", "intervals": [{"lower": 0.0, "upper": 3.0}]})
    code, out = run(
        ["phi", "--model", "poisson", "--sample", "8", "--region", region, "--a_star", "0.1"],
        capsys,
    )
    assert code == EXIT_OK
    report = types.PhiReport.model_validate(json.loads(out))
    assert report.decision == "reject"
    assert report.a_star == 0.1


def test_output_is_deterministic(binomial_spec, capsys):
    _, first = run(["phi", "--spec", binomial_spec], capsys)
    _, second = run(["phi", "--spec", binomial_spec], capsys)
    assert first == second


def test_output_file(binomial_spec, tmp_path, capsys):
    target = tmp_path.joinpath("report.json")
    code, out = run(["evidence", "--spec", binomial_spec, "--output", str(target)], capsys)
    assert code == EXIT_OK
    assert out == ""
    assert json.loads(target.read_text())["region"]


def test_ratio(tmp_path, capsys):
    doc = {
        "model": {"name": "severini"},
        "sample": {"data": [6]},
        "regions": [
            {"type": "finite", "name": "a", "points": [[13]]},
            {"type": "finite", "name": "b", "points": [[12]]},
        ],
    }
    path = tmp_path.joinpath("severini.json")
    path.write_text(json.dumps(doc))
    code, out = run(["ratio", "--spec", str(path), "--first", "a", "--second", "b"], capsys)
    assert code == EXIT_OK
    assert json.loads(out)["value"] == pytest.approx(1.25)


def test_bayes_bound(binomial_spec, capsys):
    prior = json.dumps({"kind": "uniform", "bounds": [[0.0, 1.0]]})
    code, out = run(["bayes_bound", "--spec", binomial_spec, "--prior", prior], capsys)
    assert code == EXIT_OK
    report = types.BayesReport.model_validate(json.loads(out))
    assert report.m_x == pytest.approx(1 / 9, rel=1e-6)
    assert report.lemma2_holds
    assert report.walley_moral is None


def test_contour_csv(binomial_spec, capsys):
    code, out = run(
        [
            "contour",
            "--spec",
            binomial_spec,
            "--alpha",
            "0.5",
            "--resolution",
            "5",
            "--format",
            "csv",
        ],
        capsys,
    )
    assert code == EXIT_OK
    lines = out.splitlines()
    assert lines[0] == "alpha,theta,lambda,inside"
    assert len(lines) == 6


@pytest.mark.parametrize(
    "argv, case",
    [
        (["hwe", "--counts", "2,4,2"], "mle_on_curve"),
        (["hwe", "--counts", "9,5,6"], "mle_in_outbreeding"),
    ],
)
def test_hwe_counts(argv, case, capsys):
    code, out = run(argv, capsys)
    assert code == EXIT_OK
    assert types.HweReportModel.model_validate(json.loads(out)).case == case


def test_hwe_grid(capsys):
    code, out = run(["hwe", "--grid", "3"], capsys)
    assert code == EXIT_OK
    lines = out.splitlines()
    assert lines[0].split(",")[:3] == ["y1", "y2", "y3"]
    assert len(lines) == 1 + 10


@pytest.mark.parametrize(
    "argv",
    [
        ["evidence", "--region", '{"type": "box", "intervals": []}', "--model", "poisson"],
        ["evidence", "--model", "poisson", "--sample", "2", "--bogus", "1"],
        ["hwe"],
        ["hwe", "--counts", "1,2"],
        ["evidence", "--spec", "does-not-exist.json"],
    ],
)
def test_bad_input_exits_with_two(argv, capsys):
    code, _ = run(argv, capsys)
    assert code == EXIT_INPUT


def test_malformed_document(tmp_path, capsys):
    path = tmp_path.joinpath("broken.json")
    path.write_text("{not json")
    code, _ = run(["evidence", "--spec", str(path)], capsys)
    assert code == EXIT_INPUT


def test_sharp_null_mismatch_exits_with_two(binomial_spec, capsys):
    code, _ = run(["phi", "--spec", binomial_spec, "--regime", "sharp_null"], capsys)
    assert code == EXIT_INPUT


@patch("lrpossib.analysis.evidence", side_effect=lk.ConvergenceError("no luck"))
def test_convergence_failure_exits_with_three(mock_evidence, binomial_spec, capsys):
    code, out = run(["evidence", "--spec", binomial_spec], capsys)
    assert code == EXIT_CONVERGENCE
    assert out == ""
    mock_evidence.assert_called_once()


def test_equality_curve_region_exits_cleanly(tmp_path, capsys):
    doc = {
        "model": {"name": "trinomial"},
        "sample": {"data": [9, 5, 6]},
        "regions": [{"type": "constraint", "function": "hwe", "relation": "=", "rhs": 1.0}],
        "optimizer": {"threads": 1},
    }
    path = tmp_path.joinpath("curve.json")
    path.write_text(json.dumps(doc))
    code, out = run(["evidence", "--spec", str(path)], capsys)
    assert code in (EXIT_OK, EXIT_CONVERGENCE)
    if code == EXIT_OK:
        report = types.EvidenceReport.model_validate(json.loads(out))
        assert report.nu0 == pytest.approx(lk.hwe_report(lk.HweSample(9, 5, 6)).nu1, abs=1e-4)

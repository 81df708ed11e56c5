import json
import shutil

import pytest

from mlagreview.cli import main
from mlagreview.io import FORMAT_VERSION, hospital_paths


@pytest.fixture
def data_dir(tmp_path):
    for name, src in hospital_paths().items():
        shutil.copy(src, tmp_path / src.name)
    return tmp_path


def file_args(d):
    return [
        "--graph", str(d / "graph.json"),
        "--controls", str(d / "controls.json"),
        "--assessment", str(d / "assessment.csv"),
        "--alignment-spec", str(d / "alignment_spec.csv"),
        "--alignment-layers", str(d / "alignment_layers.csv"),
        "--vulns", str(d / "vulns.json"),
    ]


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_review_reports_worked_control(capsys, data_dir):
    code, out, _ = run(capsys, "review", *file_args(data_dir))
    assert code == 0
    doc = json.loads(out)
    row = next(c for c in doc["controls"] if c["id"] == "A.9.4.3")
    assert row["specificity"] == 0.25 and row["fitting"] == 0.7
    assert (row["lifetime"], row["management"]) == ("DesignTime", "Operational")
    assert doc["format_version"] == FORMAT_VERSION
    assert set(doc["inputs"]) >= {"graph", "controls", "assessment", "alignment_spec", "alignment_layers"}
    assert all(v.startswith("sha256:") for v in doc["inputs"].values())
    assert doc["config"]["alpha"] == 0.5


def test_review_csv_columns(capsys):
    code, out, _ = run(capsys, "review", "--hospital", "--format", "csv")
    assert code == 0
    assert out.splitlines()[0] == "id,lifetime,management,specificity,h,a,n,fitting,reliability,assessed_value,flagged"


def test_missing_assessment_row_exit_3(capsys, data_dir):
    path = data_dir / "assessment.csv"
    path.write_text("\n".join(l for l in path.read_text().splitlines() if not l.startswith("A.13.1.1")) + "\n")
    code, _, err = run(capsys, "review", *file_args(data_dir))
    assert code == 3
    assert "A.13.1.1" in err


def test_malformed_layer_exit_2(capsys, data_dir):
    path = data_dir / "graph.json"
    doc = json.loads(path.read_text())
    doc["nodes"][-1]["layer"] = "net"
    path.write_text(json.dumps(doc))
    code, _, err = run(capsys, "score", *file_args(data_dir))
    assert code == 2
    assert "net" in err and "graph.json" in err


def test_usage_errors_exit_1(capsys):
    assert run(capsys, "review")[0] == 1
    assert run(capsys, "bogus")[0] == 1
    assert run(capsys, "analyze", "sweep", "--hospital", "--percentages", "a,b")[0] == 1


def test_score_json(capsys):
    code, out, _ = run(capsys, "score", "--hospital", "--attacker", "naive", "--aggregation", "min")
    assert code == 0
    doc = json.loads(out)
    assert doc["kind"] == "scored-assessment"
    assert doc["orientation"] == "higher-is-safer"
    assert doc["attacker"] == "naive" and doc["aggregation"] == "min"
    assert doc["config"]["attacker_thresholds"]["AC"] == 0.6
    for e in doc["edges"]:
        assert e["score"] == pytest.approx(min(e["governance"], e["lambda"]) * doc["cv"], abs=1e-12)


def test_score_csv_to_file(capsys, tmp_path):
    out = tmp_path / "scores.csv"
    code, stdout, _ = run(capsys, "score", "--hospital", "--format", "csv", "--out", str(out))
    assert code == 0 and stdout == ""
    assert out.read_text().splitlines()[0] == "id,layer,lambda,governance,score"


def test_cv_mode_flag_scales(capsys):
    _, raw, _ = run(capsys, "score", "--hospital")
    _, norm, _ = run(capsys, "score", "--hospital", "--cv-mode", "normalized")
    p, n = json.loads(raw), json.loads(norm)
    ratio = n["cv"] / p["cv"]
    for a, b in zip(p["edges"], n["edges"]):
        assert b["score"] == pytest.approx(a["score"] * ratio, rel=1e-12)


def test_config_file(capsys, tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"alpha": 1.0, "flag_threshold": 0.9}))
    code, out, _ = run(capsys, "review", "--hospital", "--config", str(cfg))
    assert code == 0
    doc = json.loads(out)
    row = next(c for c in doc["controls"] if c["id"] == "A.9.4.3")
    assert row["specificity"] == 0.5
    assert doc["config"]["flag_threshold"] == 0.9
    assert len(doc["flagged"]) > 0


def test_bad_config_exit_2(capsys, tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"alpha": 3}))
    assert run(capsys, "review", "--hospital", "--config", str(cfg))[0] == 2


def test_analyze_summary_single_edge(capsys, tmp_path):
    report = tmp_path / "one.json"
    report.write_text(json.dumps({"edges": [{"id": "e1", "layer": "human", "lambda": 0.5, "governance": 0.5, "score": 0.42}]}))
    code, out, _ = run(capsys, "analyze", "summary", "--scores", str(report))
    assert code == 0
    d = json.loads(out)["distribution"]
    assert d["mean"] == d["median"] == d["min"] == d["max"] == 0.42
    assert d["std"] == 0.0 and d["outliers"] == []


def test_analyze_summary_from_inputs_csv(capsys):
    code, out, _ = run(capsys, "analyze", "summary", "--hospital", "--format", "csv")
    assert code == 0
    assert out.splitlines()[0].startswith("case,count,mean,std")


def test_analyze_sweep_28_runs(capsys):
    code, out, _ = run(capsys, "analyze", "sweep", "--hospital", "--percentages", "15,45,65,90", "--trials", "7", "--seed", "11")
    assert code == 0
    doc = json.loads(out)
    assert doc["run_count"] == 28 and len(doc["runs"]) == 28
    assert doc["config"]["seed"] == 11


def test_analyze_sweep_csv(capsys):
    code, out, _ = run(capsys, "analyze", "sweep", "--hospital", "--percentages", "15", "--trials", "1", "--format", "csv")
    assert code == 0
    assert out.splitlines()[0] == "percentage,trial,edge_id,layer,score,ground_truth_score,deviation"


def test_analyze_bias_conservative_mean_not_higher(capsys):
    code, out, _ = run(capsys, "analyze", "bias", "--hospital", "--bias", "conservative")
    assert code == 0
    cases = json.loads(out)["cases"]
    assert cases["conservative"]["distribution"]["mean"] <= cases["ground_truth"]["distribution"]["mean"]


def test_analyze_bias_perturb(capsys):
    code, out, _ = run(capsys, "analyze", "bias", "--hospital", "--bias", "perturb", "--percentage", "45")
    assert code == 0
    assert json.loads(out)["percentage"] == 45.0


def test_analyze_borderline(capsys):
    code, out, _ = run(capsys, "analyze", "borderline", "--hospital")
    assert code == 0
    cases = json.loads(out)["cases"]
    assert list(cases) == ["all_C", "all_PC", "all_NC"]
    assert cases["all_PC"]["cv"] == 0.5 * cases["all_C"]["cv"]


def test_validate(capsys, data_dir):
    code, out, _ = run(capsys, "validate", *file_args(data_dir))
    assert code == 0 and json.loads(out)["valid"] is True
    path = data_dir / "graph.json"
    doc = json.loads(path.read_text())
    doc["edges"][0]["target"] = "nX"
    path.write_text(json.dumps(doc))
    code, _, err = run(capsys, "validate", *file_args(data_dir))
    assert code == 2 and "nX" in err


def test_validate_unresolved_vuln_exit_3(capsys, data_dir):
    path = data_dir / "graph.json"
    doc = json.loads(path.read_text())
    doc["edges"][-1]["vuln"] = "cve_unknown"
    path.write_text(json.dumps(doc))
    code, _, err = run(capsys, "validate", *file_args(data_dir))
    assert code == 3 and "cve_unknown" in err


def test_lexical_alignment_flags(capsys):
    p = hospital_paths()
    code, out, _ = run(
        capsys, "review",
        "--graph", str(p["graph"]), "--controls", str(p["controls"]), "--assessment", str(p["assessment"]),
        "--feature-concepts", str(p["feature_concepts"]), "--layer-concepts", str(p["layer_concepts"]),
    )
    assert code == 0
    assert set(json.loads(out)["inputs"]) >= {"feature_concepts", "layer_concepts"}


def test_bad_json_location(capsys, data_dir):
    (data_dir / "vulns.json").write_text("{\n  'x': 1\n}")
    code, _, err = run(capsys, "score", *file_args(data_dir))
    assert code == 2 and "line 2" in err


def test_alignment_range_error_exit_2(capsys, data_dir):
    path = data_dir / "alignment_layers.csv"
    path.write_text(path.read_text().replace("A.9.4.3,0.7,", "A.9.4.3,1.2,"))
    code, _, err = run(capsys, "review", *file_args(data_dir))
    assert code == 2 and "human" in err and "1.2" in err

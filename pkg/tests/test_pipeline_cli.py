import json

import pytest

from ellsec.cli import main
from ellsec.field import DEFAULT_PRIME
from ellsec.pipeline import ConfigError, PipelineConfig, run_pipeline


def test_config_validation():
    with pytest.raises(ConfigError):
        PipelineConfig(n=4).validate()
    with pytest.raises(ConfigError):
        PipelineConfig(prime=2305843009213693952).validate()  # composite
    with pytest.raises(ConfigError):
        PipelineConfig(margin=0).validate()
    with pytest.raises(ConfigError):
        PipelineConfig(trials=0).validate()
    field, curve = PipelineConfig().validate()
    assert field.p == DEFAULT_PRIME


def test_config_json_roundtrip():
    cfg = PipelineConfig(n=6, seed=9)
    assert PipelineConfig.from_json_dict(cfg.to_json_dict()) == cfg
    assert len(cfg.config_hash()) == 64


def test_run_report_shape(pipeline5):
    rep = pipeline5.report
    assert rep.passed and rep.dims == [5, 1, 1, 1]
    names = [s.name for s in rep.stages]
    assert names == [
        "curve-sample",
        "ideal",
        "secant-eq",
        "klein",
        "pfaffians",
        "sigma",
        "cremona-check",
        "omega",
        "poisson-check",
        "szego-check",
        "rank-profile",
    ]
    assert all(s.status == "PASS" for s in rep.stages)


def test_even_report_shape(pipeline6):
    rep = pipeline6.report
    assert rep.passed and rep.dims == [2, 1]
    assert [s.name for s in rep.stages] == [
        "curve-sample",
        "secant-eq",
        "omega",
        "poisson-check",
        "szego-check",
    ]


def _strip_timings(report_dict):
    out = json.loads(json.dumps(report_dict))
    for s in out["stages"]:
        s.pop("seconds")
    return out


def test_verify_deterministic_modulo_timings(tmp_path):
    cfg = PipelineConfig(n=5, seed=7)
    d1, d2 = tmp_path / "a", tmp_path / "b"
    d1.mkdir(), d2.mkdir()
    r1 = run_pipeline(cfg, outdir=str(d1))
    r2 = run_pipeline(cfg, outdir=str(d2))
    assert r1.passed and r2.passed
    assert _strip_timings(r1.to_json_dict()) == _strip_timings(r2.to_json_dict())
    for name in (
        "curve.json",
        "ideal.json",
        "secant_eq.json",
        "phi.json",
        "forward.json",
        "inverse.json",
        "composition.json",
        "omega.json",
        "poisson.json",
        "szego.json",
        "ranks.json",
        "manifest.json",
    ):
        assert (d1 / name).read_bytes() == (d2 / name).read_bytes(), name


def test_cli_verify_exit_code_and_artifacts(tmp_path, capsys):
    out = tmp_path / "run"
    out.mkdir()
    code = main(["verify", "--n", "5", "--seed", "7", "--out", str(out)])
    assert code == 0
    printed = capsys.readouterr().out
    assert "overall: PASS" in printed
    report = json.loads((out / "report.json").read_text())
    assert report["pass"] is True and report["dims"] == [5, 1, 1, 1]
    assert report["config_sha256"] == PipelineConfig(n=5, seed=7).config_hash()


def test_cli_stage_chain_matches_pipeline_artifacts(tmp_path):
    ref = tmp_path / "ref"
    ref.mkdir()
    run_pipeline(PipelineConfig(n=5, seed=7), outdir=str(ref))

    w = tmp_path / "stages"
    w.mkdir()
    assert main(["curve-sample", "--n", "5", "--seed", "7", "--out", f"{w}/curve.json"]) == 0
    assert main(["ideal", "--curve", f"{w}/curve.json", "--out", f"{w}/ideal.json"]) == 0
    assert main(["secant-eq", "--curve", f"{w}/curve.json", "--out", f"{w}/secant_eq.json"]) == 0
    assert main(["klein", "--ideal", f"{w}/ideal.json", "--out", f"{w}/phi.json"]) == 0
    assert (
        main(
            ["pfaffians", "--phi", f"{w}/phi.json", "--ideal", f"{w}/ideal.json", "--out", f"{w}/forward.json"]
        )
        == 0
    )
    assert main(["sigma", "--phi", f"{w}/phi.json", "--out", f"{w}/inverse.json"]) == 0
    assert (
        main(
            [
                "cremona-check",
                "--forward",
                f"{w}/forward.json",
                "--inverse",
                f"{w}/inverse.json",
                "--secant-eq",
                f"{w}/secant_eq.json",
                "--out",
                f"{w}/composition.json",
            ]
        )
        == 0
    )
    assert main(["omega", "--secant-eq", f"{w}/secant_eq.json", "--out", f"{w}/omega.json"]) == 0
    assert (
        main(
            [
                "poisson-check",
                "--omega",
                f"{w}/omega.json",
                "--secant-eq",
                f"{w}/secant_eq.json",
                "--out",
                f"{w}/poisson.json",
            ]
        )
        == 0
    )
    assert main(["szego-check", "--omega", f"{w}/omega.json", "--out", f"{w}/szego.json"]) == 0

    for name in (
        "curve.json",
        "ideal.json",
        "secant_eq.json",
        "phi.json",
        "forward.json",
        "inverse.json",
        "composition.json",
        "omega.json",
        "poisson.json",
        "szego.json",
    ):
        assert (w / name).read_bytes() == (ref / name).read_bytes(), name


def test_cli_rejects_composite_prime(capsys):
    code = main(["verify", "--n", "5", "--prime", "91"])
    assert code == 1
    assert "error" in capsys.readouterr().err


def test_cli_schema_mismatch_reported(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"schema": "ellsec/other/v1", "config": {}}))
    code = main(["ideal", "--curve", str(bad), "--out", f"{tmp_path}/x.json"])
    assert code == 1
    assert "expected schema 'ellsec/curve/v1'" in capsys.readouterr().err


def test_cli_missing_file_reported(tmp_path, capsys):
    code = main(["ideal", "--curve", f"{tmp_path}/nope.json", "--out", f"{tmp_path}/x.json"])
    assert code == 1


def test_verify_through_stage(tmp_path):
    out = tmp_path / "partial"
    out.mkdir()
    rep = run_pipeline(PipelineConfig(n=5, seed=7), outdir=str(out), through_stage="klein")
    assert rep.passed
    assert [s.name for s in rep.stages] == ["curve-sample", "ideal", "secant-eq", "klein"]
    assert (out / "phi.json").exists() and not (out / "omega.json").exists()


def test_unknown_stage_rejected():
    with pytest.raises(ConfigError):
        run_pipeline(PipelineConfig(n=5), through_stage="blowup")

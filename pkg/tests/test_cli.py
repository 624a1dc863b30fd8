"""End-to-end command-line runs against a materialized benchmark."""

import json
import shutil

import pytest

from rumorvet.cli import main
from rumorvet.corpus import load_conversations_jsonl, load_key_file, load_split
from rumorvet.predictions import load_predictions_jsonl
from rumorvet.probs import VERACITY_CLASSES
from rumorvet.synthetic import SyntheticSpec, materialize

SPEC = SyntheticSpec(
    n_train_per_cell=5, n_test_per_cell=2, replies_per_thread=3, pretrain_per_class=12
)


@pytest.fixture(scope="module")
def ws(tmp_path_factory):
    """Materialized data, a config file, and fully trained models."""
    root = tmp_path_factory.mktemp("cliws")
    data = root / "data"
    materialize(SPEC, data)
    cfg = root / "run.cfg"
    cfg.write_text(
        "\n".join(
            [
                f"train_dir = {data / 'train'}",
                f"train_key = {data / 'keys' / 'train-key.json'}",
                f"hedge_corpus = {data / 'corpora' / 'hedge.tsv'}",
                f"deception_corpus = {data / 'corpora' / 'deception.tsv'}",
                f"agreement_corpus = {data / 'corpora' / 'agreement.tsv'}",
                f"model_dir = {root / 'models'}",
                "phase1_per_class = 8",
            ]
        )
        + "\n",
        encoding="utf-8",
    )
    assert main(["train", "--config", str(cfg), "--phase", "all"]) == 0
    assert main(["train", "--config", str(cfg), "--phase", "2-1", "--mode", "single_lie"]) == 0
    return {
        "root": root,
        "cfg": str(cfg),
        "test_dir": str(data / "test"),
        "test_key": str(data / "keys" / "test-key.json"),
        "models": root / "models",
    }


class TestTrain(object):
    def test_model_files_and_manifests(self, ws):
        for name in ("phase1", "lie", "lie_unrouted", "agreement"):
            assert (ws["models"] / f"{name}.json").is_file()
            assert (ws["models"] / f"{name}.manifest.json").is_file()

    def test_manifest_names_inputs(self, ws):
        doc = json.loads((ws["models"] / "lie.manifest.json").read_text())
        assert doc["command"] == "train:lie"
        assert "deception_corpus" in doc["inputs"]
        assert "phase1_model" in doc["inputs"]
        assert doc["outputs"]["model"].startswith("file:")

    def test_unrouted_manifest_has_no_phase1_input(self, ws):
        doc = json.loads((ws["models"] / "lie_unrouted.manifest.json").read_text())
        assert "phase1_model" not in doc["inputs"]

    def test_retrain_is_byte_identical(self, ws, tmp_path):
        before = (ws["models"] / "agreement.json").read_bytes()
        assert main(["train", "--config", ws["cfg"], "--phase", "2-2"]) == 0
        assert (ws["models"] / "agreement.json").read_bytes() == before


class TestIngest:
    def test_round_trip(self, ws, tmp_path, capsys):
        out = tmp_path / "test.jsonl"
        assert main(["ingest", ws["test_dir"], str(out), "--key", ws["test_key"]]) == 0
        line = capsys.readouterr().out
        assert "10 threads" in line
        loaded = load_conversations_jsonl(out)
        expected = load_split(ws["test_dir"], labels=load_key_file(ws["test_key"]))
        assert loaded == expected

    def test_missing_input_dir(self, tmp_path, capsys):
        rc = main(["ingest", str(tmp_path / "absent"), str(tmp_path / "o.jsonl")])
        assert rc == 2
        assert "data error" in capsys.readouterr().err

    def test_corrupt_structure_file(self, ws, tmp_path, capsys):
        broken = tmp_path / "broken"
        shutil.copytree(ws["test_dir"], broken)
        victim = next(broken.glob("*/structure.json"))
        victim.write_text("{oops", encoding="utf-8")
        rc = main(["ingest", str(broken), str(tmp_path / "o.jsonl")])
        assert rc == 2
        assert "structure.json" in capsys.readouterr().err


class TestClassify:
    def test_predictions_schema(self, ws, tmp_path, capsys):
        out = tmp_path / "preds.jsonl"
        rc = main(
            ["classify", ws["test_dir"], "--config", ws["cfg"], "--out", str(out)]
        )
        assert rc == 0
        assert "10 predictions" in capsys.readouterr().out
        rows = [json.loads(line) for line in out.read_text().splitlines()]
        assert len(rows) == 10
        for row in rows:
            assert row["label"] in VERACITY_CLASSES
            assert row["channel"] in ("lie", "agreement")
            assert len(row["evidence"]) == 2
            assert row["assignment"]["label"] in ("certain", "uncertain")
        assert out.with_suffix(".manifest.json").is_file()

    def test_single_mode_has_null_assignment(self, ws, tmp_path):
        out = tmp_path / "preds.jsonl"
        rc = main(
            [
                "classify",
                ws["test_dir"],
                "--config",
                ws["cfg"],
                "--mode",
                "single_agreement",
                "--out",
                str(out),
            ]
        )
        assert rc == 0
        rows = [json.loads(line) for line in out.read_text().splitlines()]
        assert all(row["assignment"] is None for row in rows)
        assert all(row["channel"] == "agreement" for row in rows)

    def test_window_restricts_threads(self, ws, tmp_path, capsys):
        out = tmp_path / "preds.jsonl"
        rc = main(
            [
                "classify",
                ws["test_dir"],
                "--config",
                ws["cfg"],
                "--window-days",
                "1",
                "--out",
                str(out),
            ]
        )
        assert rc == 0
        stdout = capsys.readouterr().out
        # Only the two crowd cells have replies at all: 4 of 10 threads.
        assert "4 predictions" in stdout
        assert "(6 threads outside the window)" in stdout

    def test_missing_model_exits_3(self, ws, tmp_path, capsys):
        rc = main(
            [
                "classify",
                ws["test_dir"],
                "--config",
                ws["cfg"],
                "--model-dir",
                str(tmp_path / "nothing"),
                "--out",
                str(tmp_path / "p.jsonl"),
            ]
        )
        assert rc == 3
        assert "model error" in capsys.readouterr().err

    def test_loaded_predictions_replay(self, ws, tmp_path):
        out = tmp_path / "preds.jsonl"
        assert (
            main(["classify", ws["test_dir"], "--config", ws["cfg"], "--out", str(out)]) == 0
        )
        for pred in load_predictions_jsonl(out):
            assert pred.replays(("true", "false"), 1e-3)


class TestEvaluate:
    def test_grid_outputs(self, ws, tmp_path, capsys):
        out = tmp_path / "reports"
        rc = main(
            [
                "evaluate",
                ws["test_dir"],
                "--config",
                ws["cfg"],
                "--key",
                ws["test_key"],
                "--modes",
                "all",
                "--out",
                str(out),
            ]
        )
        assert rc == 0
        stdout = capsys.readouterr().out
        assert stdout.startswith("# ")
        assert "double" in stdout and "inverse" in stdout
        for slug in ("double", "single_lie", "single_agreement", "inverse"):
            assert (out / f"predictions-{slug}.jsonl").is_file()
        assert (out / "report.txt").is_file()
        assert (out / "report.json").is_file()
        assert (out / "manifest.json").is_file()
        payload = json.loads((out / "report.json").read_text())
        assert [r["config"]["mode"] for r in payload] == list(
            ("double", "single_lie", "single_agreement", "inverse")
        )

    def test_double_beats_singles_on_benchmark(self, ws, tmp_path):
        out = tmp_path / "reports"
        assert (
            main(
                [
                    "evaluate",
                    ws["test_dir"],
                    "--config",
                    ws["cfg"],
                    "--key",
                    ws["test_key"],
                    "--modes",
                    "all",
                    "--out",
                    str(out),
                ]
            )
            == 0
        )
        scores = {
            r["config"]["mode"]: r["macro_f1"]
            for r in json.loads((out / "report.json").read_text())
        }
        assert scores["double"] > scores["single_lie"]
        assert scores["double"] > scores["single_agreement"]
        assert scores["double"] > scores["inverse"]

    def test_window_grid_rows(self, ws, tmp_path):
        out = tmp_path / "reports"
        rc = main(
            [
                "evaluate",
                ws["test_dir"],
                "--config",
                ws["cfg"],
                "--key",
                ws["test_key"],
                "--window-days",
                "none,1",
                "--out",
                str(out),
            ]
        )
        assert rc == 0
        payload = json.loads((out / "report.json").read_text())
        assert [r["config"]["reply_window_days"] for r in payload] == [None, 1]
        assert payload[0]["n_threads"] == 10
        assert payload[1]["n_threads"] == 4
        assert payload[1]["avg_replies"] == pytest.approx(3.0)
        assert (out / "predictions-double-1d.jsonl").is_file()

    def test_micro_average_flag(self, ws, tmp_path):
        out = tmp_path / "reports"
        rc = main(
            [
                "evaluate",
                ws["test_dir"],
                "--config",
                ws["cfg"],
                "--key",
                ws["test_key"],
                "--micro",
                "--out",
                str(out),
            ]
        )
        assert rc == 0
        row = json.loads((out / "report.json").read_text())[0]
        assert row["average"] == "micro"
        assert row["precision"] == pytest.approx(row["accuracy"])

    def test_no_gold_labels_notice(self, ws, tmp_path, capsys):
        plain = tmp_path / "plain.jsonl"
        assert main(["ingest", ws["test_dir"], str(plain)]) == 0
        capsys.readouterr()
        out = tmp_path / "reports"
        rc = main(["evaluate", str(plain), "--config", ws["cfg"], "--out", str(out)])
        assert rc == 0
        assert "no gold labels; wrote predictions only" in capsys.readouterr().out
        assert not (out / "report.txt").exists()
        assert (out / "predictions-double.jsonl").is_file()
        assert (out / "manifest.json").is_file()

    def test_ablate_matches_evaluate_all(self, ws, tmp_path):
        out_a, out_b = tmp_path / "a", tmp_path / "b"
        assert (
            main(
                [
                    "ablate",
                    ws["test_dir"],
                    "--config",
                    ws["cfg"],
                    "--key",
                    ws["test_key"],
                    "--out",
                    str(out_a),
                ]
            )
            == 0
        )
        assert (
            main(
                [
                    "evaluate",
                    ws["test_dir"],
                    "--config",
                    ws["cfg"],
                    "--key",
                    ws["test_key"],
                    "--modes",
                    "all",
                    "--out",
                    str(out_b),
                ]
            )
            == 0
        )
        assert (out_a / "report.txt").read_bytes() == (out_b / "report.txt").read_bytes()

    def test_reruns_byte_identical(self, ws, tmp_path):
        outs = []
        for name in ("r1", "r2"):
            out = tmp_path / name
            assert (
                main(
                    [
                        "evaluate",
                        ws["test_dir"],
                        "--config",
                        ws["cfg"],
                        "--key",
                        ws["test_key"],
                        "--modes",
                        "all",
                        "--window-days",
                        "none,1",
                        "--out",
                        str(out),
                    ]
                )
                == 0
            )
            outs.append(out)
        a, b = outs
        compared = 0
        for path_a in sorted(a.iterdir()):
            if path_a.name == "manifest.json":
                continue
            assert path_a.read_bytes() == (b / path_a.name).read_bytes()
            compared += 1
        assert compared >= 10


class TestExitCodes:
    def test_unknown_mode_flag(self, ws, capsys):
        rc = main(["classify", ws["test_dir"], "--config", ws["cfg"], "--mode", "triple"])
        assert rc == 1
        assert "error" in capsys.readouterr().err

    def test_unknown_config_key(self, ws, tmp_path, capsys):
        bad = tmp_path / "bad.cfg"
        bad.write_text("momentum = 0.9\n", encoding="utf-8")
        rc = main(["classify", ws["test_dir"], "--config", str(bad)])
        assert rc == 1
        assert "momentum" in capsys.readouterr().err

    def test_bad_window_token(self, ws, capsys):
        rc = main(
            ["classify", ws["test_dir"], "--config", ws["cfg"], "--window-days", "soon"]
        )
        assert rc == 1
        assert "soon" in capsys.readouterr().err

    def test_train_without_train_dir(self, tmp_path, capsys):
        rc = main(["train", "--phase", "1", "--model-dir", str(tmp_path)])
        assert rc == 1
        assert "train_dir" in capsys.readouterr().err

    def test_missing_corpus_file_is_data_error(self, ws, tmp_path, capsys):
        cfg = tmp_path / "run.cfg"
        base = (ws["root"] / "run.cfg").read_text()
        cfg.write_text(base.replace("hedge.tsv", "missing-hedge.tsv"), encoding="utf-8")
        rc = main(["train", "--config", str(cfg), "--phase", "1"])
        assert rc == 2
        assert "hedge_corpus" in capsys.readouterr().err

"""CLI tests: exit codes and the synth -> train -> eval -> predict -> export-emb pipeline"""
import json

import pandas as pd
import pytest

from app.main import main

TINY_CONFIG = """
seed = 3

[model]
window = 28
scales = [7, 14]
d_c = 4
d_e = 4
d_h = 8
n_induced = 3
n_heads = 2
n_set_layers = 1

[train]
epochs = 2
batch_size = 16
lr = 0.005

[synth]
n_users = 60
items_per_user = 3
periods = [7, 14]
n_periodic_items = 12
n_distractor_items = 8
distractors_per_user = 2
horizon = 120

[eval]
ks = [1, 3]
"""


@pytest.fixture(scope="module")
def workspace(tmp_path_factory):
    root = tmp_path_factory.mktemp("cli")
    config = root / "run.toml"
    config.write_text(TINY_CONFIG, encoding="utf-8")
    assert main(["--config", str(config), "synth", "--out", str(root / "corpus")]) == 0
    assert main(["--config", str(config), "train", "--data", str(root / "corpus" / "histories.tsv"), "--out", str(root / "model")]) == 0
    return root


def _cli(workspace, *args: str) -> int:
    return main(["--config", str(workspace / "run.toml"), *args])


class TestExitCodes:
    def test_bad_schema_choice_is_usage_error(self, tmp_path):
        assert main(["ingest", "--input", str(tmp_path / "x.csv"), "--schema", "weekly", "--out", str(tmp_path / "h.tsv")]) == 2

    def test_missing_input_is_runtime_error(self, tmp_path):
        assert main(["ingest", "--input", str(tmp_path / "missing.csv"), "--out", str(tmp_path / "h.tsv")]) == 1

    def test_unknown_override_is_configuration_error(self, tmp_path):
        csv = tmp_path / "tx.csv"
        csv.write_text("user,item,day\nu1,a,0\n", encoding="utf-8")
        assert main(["--set", "train.epoch=3", "ingest", "--input", str(csv), "--out", str(tmp_path / "h.tsv")]) == 2

    def test_missing_subcommand(self):
        assert main([]) == 2

    def test_help(self, capsys):
        assert main(["--help"]) == 0
        assert "predict" in capsys.readouterr().out


class TestIngest:
    def test_day_schema(self, tmp_path, capsys):
        csv = tmp_path / "tx.csv"
        csv.write_text("user,item,day\nu1,milk,0\nu1,milk,7\nu1,eggs,7\nu2,tea,3\nu2,tea,10\nu3,jam,5\n", encoding="utf-8")
        out = tmp_path / "data" / "histories.tsv"
        assert main(["ingest", "--input", str(csv), "--schema", "day", "--out", str(out)]) == 0
        assert "users=2" in capsys.readouterr().out
        summary = json.loads((out.parent / "summary.json").read_text(encoding="utf-8"))
        assert summary["users"] == 2
        assert summary["dropped_users"] == 1
        assert (out.parent / "run_config.json").exists()


class TestPipeline:
    def test_train_artifacts(self, workspace):
        model = workspace / "model"
        assert (model / "best.ckpt").exists()
        assert (model / "epoch_002.ckpt").exists()
        assert len(pd.read_csv(model / "training_log.csv")) == 2
        resolved = json.loads((model / "run_config.json").read_text(encoding="utf-8"))
        assert resolved["model"]["window"] == 28

    def test_eval_checkpoint(self, workspace, capsys):
        out = workspace / "eval_case"
        data = str(workspace / "corpus" / "histories.tsv")
        assert _cli(workspace, "eval", "--data", data, "--checkpoint", str(workspace / "model" / "best.ckpt"), "--out", str(out), "--dump-signals") == 0
        report = pd.read_csv(out / "eval_report.csv")
        assert set(report["k"]) == {1, 3}
        assert set(report["metric"]) == {"precision", "recall", "ndcg"}
        assert report["value"].between(0.0, 1.0).all()
        assert (out / "signals.tsv").exists()
        assert "precision" in capsys.readouterr().out

    @pytest.mark.parametrize("baseline", ["personal_top", "tifuknn"])
    def test_eval_baseline(self, workspace, baseline):
        out = workspace / f"eval_{baseline}"
        data = str(workspace / "corpus" / "histories.tsv")
        assert _cli(workspace, "eval", "--data", data, "--baseline", baseline, "--ks", "1,5", "--out", str(out)) == 0
        assert set(pd.read_csv(out / "eval_report.csv")["k"]) == {1, 5}

    def test_oracle_needs_truth(self, workspace):
        data = str(workspace / "corpus" / "histories.tsv")
        out = str(workspace / "eval_oracle")
        assert _cli(workspace, "eval", "--data", data, "--baseline", "oracle", "--out", out) == 2
        truth = str(workspace / "corpus" / "truth.csv")
        assert _cli(workspace, "eval", "--data", data, "--baseline", "oracle", "--truth", truth, "--out", out) == 0

    def test_predict_depends_on_as_of_day(self, workspace, capsys):
        args = ["predict", "--data", str(workspace / "corpus" / "histories.tsv"), "--checkpoint", str(workspace / "model" / "best.ckpt"), "--user", "u00000"]
        assert _cli(workspace, *args, "--as-of-day", "100", "--k", "3") == 0
        first = capsys.readouterr().out.splitlines()
        assert _cli(workspace, *args, "--as-of-day", "107", "--k", "3") == 0
        second = capsys.readouterr().out.splitlines()
        assert len(first) == len(second) == 4
        assert first[1:] != second[1:]

    def test_predict_truncates_to_candidates(self, workspace, capsys):
        args = ["predict", "--data", str(workspace / "corpus" / "histories.tsv"), "--checkpoint", str(workspace / "model" / "best.ckpt"), "--user", "u00001"]
        assert _cli(workspace, *args, "--k", "500") == 0
        lines = capsys.readouterr().out.splitlines()
        n = int(lines[0].split("(")[1].split()[0])
        assert len(lines) == n + 1

    def test_predict_before_first_purchase(self, workspace):
        args = ["predict", "--data", str(workspace / "corpus" / "histories.tsv"), "--checkpoint", str(workspace / "model" / "best.ckpt"), "--user", "u00000"]
        assert _cli(workspace, *args, "--as-of-day", "0") == 1

    def test_predict_unknown_user(self, workspace):
        args = ["predict", "--data", str(workspace / "corpus" / "histories.tsv"), "--checkpoint", str(workspace / "model" / "best.ckpt"), "--user", "nobody"]
        assert _cli(workspace, *args) == 1

    def test_export_embeddings(self, workspace):
        out = workspace / "emb" / "embeddings.csv"
        args = ["export-emb", "--checkpoint", str(workspace / "model" / "best.ckpt"), "--data", str(workspace / "corpus" / "histories.tsv"), "--out", str(out)]
        assert _cli(workspace, *args) == 0
        frame = pd.read_csv(out)
        assert list(frame.columns[:3]) == ["user", "item", "label"]
        assert [c for c in frame.columns if c.startswith("c_")] == ["c_0", "c_1", "c_2", "c_3"]
        assert [c for c in frame.columns if c.startswith("z_")] == [f"z_{i}" for i in range(8)]
        assert set(frame["label"]) <= {0, 1}

    def test_bench(self, workspace, capsys):
        out = workspace / "bench"
        assert _cli(workspace, "bench", "--populations", "20,40", "--queries", "5", "--repeats", "1", "--out", str(out)) == 0
        frame = pd.read_csv(out / "bench.csv")
        assert set(frame["ranker"]) == {"case", "tifuknn"}
        assert sorted(set(frame["population"])) == [20, 40]
        assert "ratio" in capsys.readouterr().out

    def test_checkpoint_refuses_other_vocabulary(self, workspace, tmp_path):
        csv = tmp_path / "tx.csv"
        csv.write_text("user,item,day\nu1,x,0\nu1,x,7\n", encoding="utf-8")
        other = tmp_path / "other.tsv"
        assert main(["ingest", "--input", str(csv), "--out", str(other)]) == 0
        args = ["eval", "--data", str(other), "--checkpoint", str(workspace / "model" / "best.ckpt"), "--out", str(tmp_path / "e")]
        assert _cli(workspace, *args) == 1

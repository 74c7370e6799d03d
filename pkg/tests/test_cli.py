import json

import pytest

from pudroid.cli import build_parser, run
from pudroid.datasets import load_dataset, save_dataset
from pudroid.synthetic import SyntheticSpec, generate_synthetic


@pytest.fixture()
def corpus(tmp_path):
    feats = tmp_path / "feats"
    feats.mkdir()
    (feats / "mal1.txt").write_text("permission::SEND_SMS\napi::getDeviceId\nurl::evil.example\n")
    (feats / "ben1.txt").write_text("permission::INTERNET\napi::getDeviceId\n")
    (feats / "ben2.txt").write_text("permission::INTERNET\nurl::gone.example\n")
    manifest = tmp_path / "manifest.csv"
    manifest.write_text(
        "app_id,path,group\n"
        "mal-1,feats/mal1.txt,positive\n"
        "ben-1,feats/ben1.txt,unlabeled\n"
        "ben-2,feats/ben2.txt,unlabeled\n"
    )
    ipmap = tmp_path / "ipmap.tsv"
    ipmap.write_text("evil.example\t9.8.7.6\n")
    return manifest, ipmap


@pytest.fixture()
def dataset_file(tmp_path):
    spec = SyntheticSpec(
        n_positive=60, n_negative=120, dimension=30, signal_features=4,
        n_families=2, label_frequency_c=0.7, seed=4,
    )
    path = tmp_path / "ds.json"
    save_dataset(generate_synthetic(spec).dataset, path)
    return path


class TestExitCodes:
    def test_no_arguments_is_usage_error(self, capsys):
        assert run([]) == 1
        assert "error" in capsys.readouterr().err

    def test_unknown_flag_is_usage_error(self, capsys):
        assert run(["pca", "--bogus"]) == 1

    def test_clean_without_input_is_usage_error(self, tmp_path, capsys):
        assert run(["clean", "--out", str(tmp_path / "o.json")]) == 1

    def test_missing_file_is_io_error(self, tmp_path, capsys):
        code = run([
            "ingest", "--manifest", str(tmp_path / "nope.csv"),
            "--ipmap", str(tmp_path / "nope.tsv"), "--out", str(tmp_path / "o.json"),
        ])
        assert code == 3

    def test_invalid_data_is_data_error(self, tmp_path, capsys):
        spec_file = tmp_path / "spec.txt"
        spec_file.write_text("bogus_key=1\n")
        code = run([
            "experiment", "--protocol", "rq1", "--spec-file", str(spec_file),
            "--out", str(tmp_path / "o.json"),
        ])
        assert code == 2

    def test_version_exits_zero(self, capsys):
        with pytest.raises(SystemExit) as exc:
            run(["--version"])
        assert exc.value.code == 0


class TestSeedDefault:
    def test_env_seed_is_picked_up(self, monkeypatch):
        monkeypatch.setenv("PUDROID_SEED", "42")
        args = build_parser().parse_args(["pca", "--dataset", "x", "--out", "y"])
        assert args is not None  # pca takes no seed; check a seeded command
        args = build_parser().parse_args(
            ["experiment", "--protocol", "rq1", "--out", "y"]
        )
        assert args.seed == 42


class TestPipeline:
    def test_ingest_select_pca(self, corpus, tmp_path, capsys):
        manifest, ipmap = corpus
        ds_path = tmp_path / "ds.json"
        assert run(["ingest", "--manifest", str(manifest), "--ipmap", str(ipmap),
                    "--out", str(ds_path)]) == 0
        ds = load_dataset(ds_path)
        assert len(ds.positives) == 1 and len(ds.unlabeled) == 2

        sel_path = tmp_path / "sel.json"
        names_path = tmp_path / "names.txt"
        assert run(["select-features", "--dataset", str(ds_path), "--eta", "1",
                    "--out", str(sel_path), "--features-out", str(names_path)]) == 0
        selected = load_dataset(sel_path)
        assert selected.space.dimension >= 1
        assert len(names_path.read_text().splitlines()) == selected.space.dimension

        csv_path = tmp_path / "proj.csv"
        assert run(["pca", "--dataset", str(ds_path), "--out", str(csv_path)]) == 0
        lines = csv_path.read_text().splitlines()
        assert lines[0] == "id,x,y,group"
        assert len(lines) == 4

    def test_clean_writes_report_and_dataset(self, dataset_file, tmp_path, capsys):
        out = tmp_path / "clean.json"
        cleaned = tmp_path / "cleaned.json"
        code = run([
            "clean", "--dataset", str(dataset_file), "--learner", "linear",
            "--lr", "1.0", "--epochs", "200", "--seed", "3",
            "--out", str(out), "--cleaned-out", str(cleaned),
        ])
        assert code == 0
        payload = json.loads(out.read_text())
        assert payload["schema"] == "pudroid-clean/1"
        assert payload["config"]["seed"] == 3
        assert isinstance(payload["contaminant_ids"], list)
        load_dataset(cleaned)

    def test_experiment_report(self, tmp_path, capsys):
        out = tmp_path / "rq1.json"
        code = run([
            "experiment", "--protocol", "rq1",
            "--n-positive", "60", "--n-negative", "120", "--dimension", "30",
            "--signal-features", "4", "--n-families", "2",
            "--iterations", "1", "--step", "5",
            "--learner", "linear", "--epochs", "100", "--seed", "2",
            "--out", str(out),
        ])
        assert code == 0
        payload = json.loads(out.read_text())
        assert payload["protocol"] == "RQ1"
        assert [r["condition"] for r in payload["rows"]] == ["N=0", "N=1"]
        assert payload["config"]["generator"]["n_positive"] == 60
        assert "threshold_rule" in payload["config"]

    def test_spec_file_and_flags_combine(self, tmp_path, capsys):
        spec_file = tmp_path / "spec.txt"
        spec_file.write_text(
            "# generator\nn_positive=60\nn_negative=120\ndimension=30\n"
            "signal_features=4\nn_families=2\nfamily_exclusive=true\n"
        )
        out = tmp_path / "rq3.json"
        code = run([
            "experiment", "--protocol", "rq3", "--spec-file", str(spec_file),
            "--learner", "linear", "--epochs", "100", "--seed", "1",
            "--out", str(out),
        ])
        assert code == 0
        payload = json.loads(out.read_text())
        assert payload["config"]["generator"]["family_exclusive"] is True
        assert [r["condition"] for r in payload["rows"]] == ["family-0", "family-1"]

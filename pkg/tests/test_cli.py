"""Command-line behavior: flows, validation, persistence, determinism."""

import pytest

from almsvm.cli import main, read_model, write_model
from almsvm.data_io import load_libsvm, write_libsvm
from almsvm.metrics import Model, predict, predict_label
from almsvm.synthetic import svc_blobs, svr_planted


@pytest.fixture
def svc_file(tmp_path):
    data = svc_blobs(200, 10, separation=8.0, scale=1.5, seed=7)
    path = tmp_path / "blobs.libsvm"
    write_libsvm(data, path)
    return path


@pytest.fixture
def svr_file(tmp_path):
    data = svr_planted(120, 12, out_frac=0.05, seed=3)
    path = tmp_path / "reg.libsvm"
    write_libsvm(data, path)
    return path


class TestTrain:
    def test_train_writes_model_and_report(self, svc_file, tmp_path, capsys):
        model_path = tmp_path / "m.model"
        rc = main(["train", "--task", "svc", "--data", str(svc_file),
                   "--model", str(model_path)])
        assert rc == 0
        out = capsys.readouterr().out
        for field in ("k=", "it_sn=", "it_cg=", "time_s=", "kkt=", "gap=",
                      "obj="):
            assert field in out
        model = read_model(model_path)
        assert model.task == "svc"
        assert model.w.size == 10
        assert model.c_used == pytest.approx(550.0 / 200)

    def test_train_svr(self, svr_file, tmp_path, capsys):
        model_path = tmp_path / "m.model"
        rc = main(["train", "--task", "svr", "--data", str(svr_file),
                   "--model", str(model_path)])
        assert rc == 0
        model = read_model(model_path)
        assert model.task == "svr"
        assert model.eps_used == 0.1
        assert model.c_used == pytest.approx(5.0 / 12)

    def test_train_with_bias(self, svc_file, tmp_path):
        model_path = tmp_path / "m.model"
        main(["train", "--task", "svc", "--data", str(svc_file),
              "--model", str(model_path), "--bias"])
        model = read_model(model_path)
        assert model.bias_augmented
        assert model.w.size == 11

    def test_missing_data_flag_exits_2(self, tmp_path):
        with pytest.raises(SystemExit) as excinfo:
            main(["train", "--task", "svc", "--model", str(tmp_path / "m")])
        assert excinfo.value.code == 2

    def test_nonpositive_c_exits_2(self, svc_file, tmp_path, capsys):
        with pytest.raises(SystemExit) as excinfo:
            main(["train", "--task", "svc", "--data", str(svc_file),
                  "--model", str(tmp_path / "m"), "--c", "0"])
        assert excinfo.value.code == 2
        assert "C must be positive" in capsys.readouterr().err

    def test_missing_file_is_runtime_error(self, tmp_path, capsys):
        rc = main(["train", "--task", "svc", "--data",
                   str(tmp_path / "nope.libsvm"), "--model",
                   str(tmp_path / "m")])
        assert rc == 1
        assert "error:" in capsys.readouterr().err


class TestModelFile:
    def test_round_trip_is_byte_identical(self, tmp_path, rng):
        model = Model(w=rng.normal(size=7), task="svc",
                      bias_augmented=True, label_map=(0.0, 1.0),
                      c_used=2.75, eps_used=0.0)
        p1, p2 = tmp_path / "a.model", tmp_path / "b.model"
        write_model(model, p1)
        write_model(read_model(p1), p2)
        assert p1.read_bytes() == p2.read_bytes()

    def test_rejects_foreign_file(self, tmp_path):
        path = tmp_path / "bad.model"
        path.write_text("not a model\n")
        with pytest.raises(ValueError):
            read_model(path)

    def test_rejects_truncated_weights(self, tmp_path):
        path = tmp_path / "bad.model"
        path.write_text(
            "alm-svm v1 task=svc n=3 bias=0 c=1.0 eps=0.0 labels=none\n0.5\n"
        )
        with pytest.raises(ValueError, match="expected 3 weights"):
            read_model(path)


class TestPredictEval:
    def test_predictions_match_library_calls(self, svc_file, tmp_path, capsys):
        model_path = tmp_path / "m.model"
        main(["train", "--task", "svc", "--data", str(svc_file),
              "--model", str(model_path)])
        capsys.readouterr()
        out_path = tmp_path / "pred.txt"
        rc = main(["predict", "--model", str(model_path), "--data",
                   str(svc_file), "--output", str(out_path)])
        assert rc == 0
        got = [float(v) for v in out_path.read_text().split()]
        model = read_model(model_path)
        data = load_libsvm(svc_file)
        expected = [predict_label(model, s) for s in data.samples]
        assert got == expected

    def test_svr_predictions_are_raw_scores(self, svr_file, tmp_path, capsys):
        model_path = tmp_path / "m.model"
        main(["train", "--task", "svr", "--data", str(svr_file),
              "--model", str(model_path)])
        capsys.readouterr()
        rc = main(["predict", "--model", str(model_path), "--data",
                   str(svr_file)])
        assert rc == 0
        got = [float(v) for v in capsys.readouterr().out.split()]
        model = read_model(model_path)
        data = load_libsvm(svr_file)
        assert got == [predict(model, s) for s in data.samples]

    def test_empty_data_gives_empty_output(self, svc_file, tmp_path, capsys):
        model_path = tmp_path / "m.model"
        main(["train", "--task", "svc", "--data", str(svc_file),
              "--model", str(model_path)])
        empty = tmp_path / "empty.libsvm"
        empty.write_text("")
        capsys.readouterr()
        rc = main(["predict", "--model", str(model_path), "--data", str(empty)])
        assert rc == 0
        assert capsys.readouterr().out == ""

    def test_eval_prints_accuracy(self, svc_file, tmp_path, capsys):
        model_path = tmp_path / "m.model"
        main(["train", "--task", "svc", "--data", str(svc_file),
              "--model", str(model_path)])
        capsys.readouterr()
        rc = main(["eval", "--model", str(model_path), "--data", str(svc_file)])
        assert rc == 0
        out = capsys.readouterr().out
        assert out.startswith("accuracy=")
        assert float(out.split("=")[1]) == 100.0

    def test_eval_prints_mse(self, svr_file, tmp_path, capsys):
        model_path = tmp_path / "m.model"
        main(["train", "--task", "svr", "--data", str(svr_file),
              "--model", str(model_path)])
        capsys.readouterr()
        rc = main(["eval", "--model", str(model_path), "--data", str(svr_file)])
        assert rc == 0
        assert capsys.readouterr().out.startswith("mse=")


class TestBench:
    def test_csv_header_and_determinism(self, svc_file, capsys):
        args = ["bench", "--data", str(svc_file), "--task", "svc",
                "--split", "0.8", "--seed", "1"]
        assert main(args) == 0
        first = capsys.readouterr().out.splitlines()
        assert main(args) == 0
        second = capsys.readouterr().out.splitlines()
        assert first[0] == "dataset,k,it_sn,it_cg,time_s,metric"

        def strip_time(line):
            parts = line.split(",")
            parts[4] = ""
            return ",".join(parts)

        assert [strip_time(r) for r in first[1:]] == [
            strip_time(r) for r in second[1:]
        ]

    def test_invalid_split_exits_2(self, svc_file):
        with pytest.raises(SystemExit) as excinfo:
            main(["bench", "--data", str(svc_file), "--task", "svc",
                  "--split", "1.5"])
        assert excinfo.value.code == 2

    def test_pretty_output(self, svc_file, capsys):
        assert main(["bench", "--data", str(svc_file), "--task", "svc",
                     "--pretty"]) == 0
        out = capsys.readouterr().out.splitlines()
        assert out[0].split() == ["dataset", "k", "it_sn", "it_cg", "time_s",
                                  "metric"]

    def test_history_dumps(self, svc_file, tmp_path, capsys):
        active = tmp_path / "active.csv"
        resid = tmp_path / "resid.csv"
        assert main(["bench", "--data", str(svc_file), "--task", "svc",
                     "--emit-active-set", str(active),
                     "--emit-residuals", str(resid)]) == 0
        capsys.readouterr()
        a_lines = active.read_text().splitlines()
        r_lines = resid.read_text().splitlines()
        assert a_lines[0] == "outer,newton_iter,active_rows"
        assert r_lines[0] == "outer,newton_iter,grad_norm"
        assert len(a_lines) > 1 and len(r_lines) > 1
        outer, j, size = a_lines[1].split(",")
        assert (outer, j) == ("0", "0")
        assert int(size) >= 0

    def test_multiple_datasets_with_jobs(self, svc_file, tmp_path, capsys):
        # two copies of the same classification set, solved concurrently
        other = tmp_path / "copy.libsvm"
        other.write_text(svc_file.read_text())
        assert main(["bench", "--data", str(svc_file), str(other),
                     "--task", "svc", "--jobs", "2"]) == 0
        lines = capsys.readouterr().out.splitlines()
        assert len(lines) == 3
        assert lines[1].split(",")[0] == "blobs"
        assert lines[2].split(",")[0] == "copy"
        # identical data must produce identical rows modulo time
        a = lines[1].split(","); b = lines[2].split(",")
        assert a[1:4] == b[1:4] and a[5] == b[5]


def test_self_check_flag(svc_file, tmp_path, capsys):
    rc = main(["--self-check", "train", "--task", "svc", "--data",
               str(svc_file), "--model", str(tmp_path / "m.model")])
    assert rc == 0
    assert "self-check ok" in capsys.readouterr().err

import json

import pytest

from andfeatures import RunReport, read_afs, read_fsn
from andfeatures.cli import main

from conftest import DATA


@pytest.fixture
def iris_fsn(tmp_path):
    out = tmp_path / "iris.fsn"
    assert main(["ingest", str(DATA / "iris.csv"), "-o", str(out), "--label-column", "class"]) == 0
    return out


class TestIngest:
    def test_iris(self, tmp_path, capsys):
        out = tmp_path / "iris.fsn"
        assert main(["ingest", str(DATA / "iris.csv"), "-o", str(out), "--label-column", "class", "--bins", "3"]) == 0
        net = read_fsn(out.read_text())
        assert (net.n_samples, net.n_features) == (150, 12)
        summary = capsys.readouterr().out
        assert "degree histogram: 4:150" in summary
        assert "possible and-features: 4083" in summary

    def test_wine_summary(self, tmp_path, capsys):
        rc = main(["ingest", str(DATA / "wine.csv"), "-o", str(tmp_path / "w.fsn"), "--label-column", "class"])
        assert rc == 0
        assert "possible and-features: 549755813848" in capsys.readouterr().out

    def test_missing_label(self, tmp_path, capsys):
        rc = main(["ingest", str(DATA / "iris.csv"), "-o", str(tmp_path / "x.fsn"), "--label-column", "nope"])
        assert rc == 3
        assert "nope" in capsys.readouterr().err

    def test_width_binning(self, tmp_path, capsys):
        out = tmp_path / "g.fsn"
        main(["ingest", str(DATA / "glass.csv"), "-o", str(out), "--label-column", "type", "--binning", "width"])
        assert read_fsn(out.read_text()).n_features == 27


class TestOracle:
    def test_iris(self, iris_fsn, tmp_path, capsys):
        dump = tmp_path / "all.afs"
        assert main(["oracle", str(iris_fsn), "--dump", str(dump)]) == 0
        assert capsys.readouterr().out.strip() == "128"
        assert len(read_afs(dump.read_text())) == 128

    def test_single_sample(self, tmp_path, capsys):
        fsn = tmp_path / "one.fsn"
        fsn.write_text("FSN 1\n1 4\n0: 0 1 2 3\n")
        assert main(["oracle", str(fsn)]) == 0
        assert capsys.readouterr().out.strip() == "11"

    def test_refusal(self, tmp_path, capsys):
        fsn = tmp_path / "dense.fsn"
        fsn.write_text("FSN 1\n1 40\n0: " + " ".join(map(str, range(40))) + "\n")
        assert main(["oracle", str(fsn)]) == 4
        assert str(2**40) in capsys.readouterr().err


class TestEnhance:
    ARGS = ["--population", "20", "--elitism", "5", "--archive", "5", "--generations", "5", "--mu", "10", "--sigma", "5"]

    def test_lga(self, iris_fsn, tmp_path):
        report, afs = tmp_path / "r.json", tmp_path / "best.afs"
        rc = main(["enhance", str(iris_fsn), "--report", str(report), "--afs", str(afs)] + self.ARGS)
        assert rc == 0
        rep = RunReport.from_json(report.read_text())
        assert rep.strategy == "lga" and rep.generations == 5
        assert len(read_afs(afs.read_text(), 12)) == rep.best().count

    @pytest.mark.parametrize("strategy", ["lga", "spea2"])
    def test_byte_identical(self, iris_fsn, tmp_path, strategy):
        outs = []
        for i, threads in enumerate(["1", "3"]):
            path = tmp_path / f"{i}.json"
            main(["enhance", str(iris_fsn), "--strategy", strategy, "--threads", threads, "--report", str(path)] + self.ARGS)
            outs.append(path.read_bytes())
        assert outs[0] == outs[1]

    def test_timing(self, iris_fsn, tmp_path):
        path = tmp_path / "t.json"
        main(["enhance", str(iris_fsn), "--timing", "--report", str(path)] + self.ARGS)
        assert json.loads(path.read_text())["wall_time"] > 0

    def test_config_rejected(self, iris_fsn, capsys):
        assert main(["enhance", str(iris_fsn), "--population", "10", "--elitism", "100"]) == 2
        assert "elite_size" in capsys.readouterr().err

    def test_config_file_and_override(self, iris_fsn, tmp_path):
        cfg = tmp_path / "run.yaml"
        cfg.write_text("strategy: spea2\npopulation: 20\narchive: 4\ngenerations: 3\nseed: 9\n")
        path = tmp_path / "r.json"
        assert main(["enhance", str(iris_fsn), "--config", str(cfg), "--generations", "2", "--report", str(path)]) == 0
        rep = RunReport.from_json(path.read_text())
        assert rep.strategy == "spea2" and rep.generations == 2 and rep.seed == 9
        assert rep.config["archive_size"] == 4 and rep.config["m_max"] == 1200

    def test_unknown_config_key(self, iris_fsn, tmp_path, capsys):
        cfg = tmp_path / "bad.json"
        cfg.write_text('{"populaton": 5}')
        assert main(["enhance", str(iris_fsn), "--config", str(cfg)]) == 2
        assert "populaton" in capsys.readouterr().err


class TestEvaluate:
    def test_none_equals_empty(self, iris_fsn, tmp_path, capsys):
        empty = tmp_path / "empty.afs"
        empty.write_text("")
        base = ["--repeats", "3", "--k-max", "4"]
        main(["evaluate", str(iris_fsn), "none"] + base)
        a = capsys.readouterr().out
        main(["evaluate", str(iris_fsn), str(empty)] + base)
        assert capsys.readouterr().out == a
        assert a.splitlines()[0] == "fraction,k,mean,sd"
        assert len(a.splitlines()) == 1 + 2 * 4

    def test_json_output(self, iris_fsn, tmp_path):
        js = tmp_path / "t.json"
        main(["evaluate", str(iris_fsn), "none", "--repeats", "2", "--k-max", "2", "--fractions", "0.5",
              "--json", str(js), "-o", str(tmp_path / "t.csv")])
        d = json.loads(js.read_text())
        assert d["options"]["fractions"] == [0.5]
        assert list(d["table"]["best"]) == ["0.5"]

    def test_out_of_range_afs(self, iris_fsn, tmp_path):
        afs = tmp_path / "bad.afs"
        afs.write_text("0 99\n")
        assert main(["evaluate", str(iris_fsn), str(afs)]) == 3

    def test_unlabelled(self, tmp_path):
        fsn = tmp_path / "u.fsn"
        fsn.write_text("FSN 1\n2 2\n0: 0\n1: 1\n")
        assert main(["evaluate", str(fsn), "none"]) == 3


class TestExport:
    def test_dot(self, iris_fsn, tmp_path, capsys):
        afs = tmp_path / "one.afs"
        afs.write_text("0 3\n")
        assert main(["export", str(iris_fsn), str(afs)]) == 0
        dot = capsys.readouterr().out
        assert dot.startswith("graph") and dot.count("fillcolor=gray") <= 1

    def test_missing_file(self, tmp_path):
        assert main(["export", str(tmp_path / "nothing.fsn")]) == 3

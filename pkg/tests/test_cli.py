import json
import subprocess
import sys

import numpy as np
import pytest

from motifrules.cli import main
from motifrules.series import load_csv


@pytest.fixture(scope="module")
def synth_dir(tmp_path_factory):
    d = tmp_path_factory.mktemp("synth")
    assert main(["synth", "--length", "4000", "--instances", "10", "--seed", "1", "--out-dir", str(d)]) == 0
    return d


@pytest.fixture(scope="module")
def mined(synth_dir, tmp_path_factory):
    out = tmp_path_factory.mktemp("mined")
    code = main(["mine", "--series-a", str(synth_dir / "T_A.csv"), "--series-b", str(synth_dir / "T_B.csv"),
                 "--tau", "101", "--theta", "18", "--k-rules", "3", "--out", str(out)])
    assert code == 0
    return out


def files_under(path):
    return sorted(p.relative_to(path) for p in path.rglob("*"))


class TestSynth:
    def test_outputs(self, synth_dir):
        truth = json.loads((synth_dir / "truth.json").read_text())
        assert truth["n_instances"] == 10 and len(truth["a_starts"]) == 10
        assert truth["manifest"] == "manifest.json"
        manifest = json.loads((synth_dir / "manifest.json").read_text())
        assert manifest["seed"] == 1
        assert {"T_A.csv", "T_B.csv", "truth.json"} <= {p.name for p in synth_dir.iterdir()}

    def test_noiseless_windows_equal_templates(self, tmp_path):
        assert main(["synth", "--length", "2000", "--instances", "4", "--noise", "0", "--out-dir", str(tmp_path)]) == 0
        truth = json.loads((tmp_path / "truth.json").read_text())
        a = load_csv(tmp_path / "T_A.csv")
        b = load_csv(tmp_path / "T_B.csv")
        for s in truth["a_starts"]:
            assert np.array_equal(a.values[s:s + 50], truth["antecedent"])
        for s in truth["b_starts"]:
            assert np.array_equal(b.values[s:s + 30], truth["consequent"])

    def test_same_seed_identical(self, tmp_path):
        for d in ("x", "y"):
            assert main(["synth", "--length", "2000", "--instances", "4", "--seed", "3",
                         "--out-dir", str(tmp_path / d)]) == 0
        for name in ("T_A.csv", "T_B.csv", "truth.json"):
            assert (tmp_path / "x" / name).read_bytes() == (tmp_path / "y" / name).read_bytes()

    def test_infeasible(self, tmp_path, capsys):
        assert main(["synth", "--length", "500", "--instances", "20", "--out-dir", str(tmp_path)]) == 1
        assert "--instances" in capsys.readouterr().err


class TestMine:
    def test_rule_file(self, mined):
        doc = json.loads((mined / "rules.json").read_text())
        assert doc["manifest"] == "manifest.json"
        assert len(doc["rules"]) == 3
        r = doc["rules"][0]
        for key in ("antecedent", "consequent", "tau", "theta", "score", "s", "n_antecedents",
                    "matched_instances"):
            assert key in r
        assert len(r["antecedent"]["values"]) == r["antecedent"]["length"]
        manifest = json.loads((mined / "manifest.json").read_text())
        assert manifest["config"]["tau"] == 101
        assert len(manifest["inputs"]) == 2

    def test_k_rules_zero_exit_two(self, synth_dir, tmp_path):
        code = main(["mine", "--series-a", str(synth_dir / "T_A.csv"), "--k-rules", "0", "--out", str(tmp_path)])
        assert code == 2
        assert json.loads((tmp_path / "rules.json").read_text())["rules"] == []

    @pytest.mark.parametrize("flag,value", [("--tau", "0"), ("--theta", "-1"), ("--bits", "1"),
                                            ("--motif-lengths", "50,x"), ("--k-motifs", "0")])
    def test_bad_flag_named(self, synth_dir, tmp_path, capsys, flag, value):
        code = main(["mine", "--series-a", str(synth_dir / "T_A.csv"), flag, value, "--out", str(tmp_path)])
        assert code == 1
        assert flag in capsys.readouterr().err

    def test_missing_file(self, tmp_path, capsys):
        assert main(["mine", "--series-a", str(tmp_path / "nope.csv"), "--out", str(tmp_path / "o")]) == 1
        assert "--series-a" in capsys.readouterr().err

    def test_unknown_flag_is_usage_error(self, tmp_path):
        assert main(["mine", "--bogus", "--out", str(tmp_path)]) == 1

    def test_series_too_short(self, tmp_path, capsys):
        (tmp_path / "s.csv").write_text("value\n" + "\n".join(str(i % 7) for i in range(60)))
        assert main(["mine", "--series-a", str(tmp_path / "s.csv"), "--out", str(tmp_path / "o")]) == 1
        assert "--motif-lengths" in capsys.readouterr().err

    def test_pairs_dir(self, tmp_path):
        rng = np.random.default_rng(0)
        src = tmp_path / "in"
        src.mkdir()
        for name in ("fridge", "kettle", "washer"):
            np.savetxt(src / f"{name}.csv", np.cumsum(rng.normal(size=600)), header="value", comments="")
        out = tmp_path / "out"
        code = main(["mine", "--pairs-dir", str(src), "--motif-lengths", "20", "--k-motifs", "2",
                     "--theta", "30", "--tau", "100", "--out", str(out)])
        assert code in (0, 2)
        names = {p.name for p in out.iterdir()}
        expected = {f"rules__{a}__{b}.json" for a in ("fridge", "kettle", "washer")
                    for b in ("fridge", "kettle", "washer") if a != b}
        assert expected | {"manifest.json"} == names


class TestEval:
    def test_report_and_determinism(self, synth_dir, mined, tmp_path):
        args = ["eval", "--rules", str(mined / "rules.json"), "--test-a", str(synth_dir / "T_A.csv"),
                "--test-b", str(synth_dir / "T_B.csv"), "--repetitions", "50", "--seed", "4"]
        assert main(args + ["--out", str(tmp_path / "r1")]) == 0
        assert main(args + ["--out", str(tmp_path / "r2")]) == 0
        r1 = (tmp_path / "r1" / "report.json").read_bytes()
        assert r1 == (tmp_path / "r2" / "report.json").read_bytes()
        report = json.loads(r1)
        assert report["manifest"] == "manifest.json"
        assert len(report["rules"]) == 3
        # evaluated on its own training data the planted rule predicts almost perfectly
        assert report["top5_mean_Q"] < 0.2

    def test_overlay_csv(self, synth_dir, mined, tmp_path):
        assert main(["eval", "--rules", str(mined / "rules.json"), "--test-a", str(synth_dir / "T_A.csv"),
                     "--test-b", str(synth_dir / "T_B.csv"), "--repetitions", "5", "--overlay-csv",
                     "--out", str(tmp_path)]) == 0
        lines = (tmp_path / "overlay_rule1.csv").read_text().splitlines()
        assert lines[0] == "index,actual,predicted_overlay"
        assert len(lines) == 4001

    def test_unknown_series_name(self, synth_dir, mined, tmp_path, capsys):
        code = main(["eval", "--rules", str(mined / "rules.json"),
                     "--test-a", f"fridge={synth_dir / 'T_A.csv'}", "--test-b", str(synth_dir / "T_B.csv"),
                     "--out", str(tmp_path)])
        assert code == 1
        assert "fridge" in capsys.readouterr().err

    def test_bad_rules_file(self, tmp_path, synth_dir, capsys):
        (tmp_path / "r.json").write_text("{not json")
        code = main(["eval", "--rules", str(tmp_path / "r.json"), "--test-a", str(synth_dir / "T_A.csv"),
                     "--out", str(tmp_path / "o")])
        assert code == 1
        assert "--rules" in capsys.readouterr().err

    def test_writes_only_inside_out(self, synth_dir, mined, tmp_path):
        before_synth, before_mined = files_under(synth_dir), files_under(mined)
        out = tmp_path / "deep" / "out"
        assert main(["eval", "--rules", str(mined / "rules.json"), "--test-a", str(synth_dir / "T_A.csv"),
                     "--test-b", str(synth_dir / "T_B.csv"), "--repetitions", "5", "--out", str(out)]) == 0
        assert files_under(synth_dir) == before_synth and files_under(mined) == before_mined
        assert {p.name for p in tmp_path.rglob("*") if p.is_file()} == {"report.json", "manifest.json"}


def test_module_entry_point(tmp_path):
    res = subprocess.run([sys.executable, "-m", "motifrules", "synth", "--length", "1000", "--instances", "2",
                          "--out-dir", str(tmp_path)], capture_output=True, text=True)
    assert res.returncode == 0, res.stderr
    assert (tmp_path / "T_A.csv").exists()

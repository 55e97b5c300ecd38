import json
from importlib import resources
from pathlib import Path

import pytest

from motifsel.cli import RunConfig, main
from motifsel.patterns import parse_patterns

TOY = Path(str(resources.files("motifsel") / "data" / "toy"))


@pytest.fixture(scope="module")
def pipeline(tmp_path_factory):
    d = tmp_path_factory.mktemp("pipe")
    inputs = sorted(str(p) for p in TOY.glob("*.csv"))
    assert main(["build-graphs", *inputs, "--delta", "7", "-o", str(d / "graphs")]) == 0
    graphs = sorted(str(p) for p in (d / "graphs").glob("*.graph"))
    assert main(["mine", *graphs, "--min-support", "0.3", "--workers", "1",
                 "-o", str(d / "omega.txt")]) == 0
    assert main(["select", str(d / "omega.txt"), "--tau", "30", "--matrix", "blosum62",
                 "--workers", "1", "-o", str(d / "sel.txt")]) == 0
    return d, graphs


def test_build_graphs_outputs(pipeline):
    d, graphs = pipeline
    assert len(graphs) == 20
    man = json.loads((d / "graphs" / "manifest.json").read_text())
    assert len(man["inputs"]) == 20 and all(len(h) == 64 for h in man["inputs"].values())
    assert man["config"]["delta"] == 7.0


def test_mine_output_has_support(pipeline):
    d, _ = pipeline
    text = (d / "omega.txt").read_text()
    assert "# support " in text and "\ns " in text
    assert len(parse_patterns(text)) > 0


def test_select_report_and_rerun_identical(pipeline, tmp_path):
    d, _ = pipeline
    assert (d / "sel.txt.report.txt").read_text().startswith("# selection report")
    assert (d / "sel.txt.groups.csv").read_text().startswith("group,order,size")
    again = tmp_path / "again.txt"
    assert main(["select", str(d / "sel.txt"), "--tau", "30", "--workers", "1",
                 "-o", str(again)]) == 0
    assert again.read_bytes() == (d / "sel.txt").read_bytes()


def test_patterns_in_flag(pipeline, tmp_path):
    d, _ = pipeline
    out = tmp_path / "s.txt"
    assert main(["select", "--patterns-in", str(d / "omega.txt"), "--workers", "1",
                 "-o", str(out)]) == 0
    assert out.read_bytes() == (d / "sel.txt").read_bytes()


def test_eval_deterministic(pipeline, tmp_path):
    d, graphs = pipeline
    outs = []
    for k in range(2):
        out = tmp_path / f"m{k}.csv"
        assert main(["eval", "--graphs", *graphs, "--patterns", str(d / "omega.txt"),
                     str(d / "sel.txt"), "--folds", "5", "--runs", "5", "--seed", "7",
                     "--histogram", "--features", "-o", str(out)]) == 0
        outs.append(out.read_text())
    assert outs[0] == outs[1]
    lines = outs[0].splitlines()
    assert lines[0].startswith("dataset,method,tau,matrix,patterns,accuracy")
    assert len(lines) == 3
    assert (tmp_path / "sel.sizes.csv").exists() and (tmp_path / "size_distribution.png").exists()
    assert (tmp_path / "omega.features.csv").exists()


def test_stats_sweep(pipeline, tmp_path):
    d, graphs = pipeline
    out = tmp_path / "st"
    assert main(["stats", "--patterns", str(d / "omega.txt"), "--graphs", *graphs,
                 "--taus", "0,50,100", "--runs", "1", "--workers", "1", "-o", str(out)]) == 0
    rows = (out / "sweep.csv").read_text().splitlines()
    assert len(rows) == 4 and rows[-1].split(",")[3] == "100.0000"
    for name in ("selection_rate.png", "size_distribution.png", "accuracy.png", "manifest.json"):
        assert (out / name).exists()


def test_stats_runtime_small(tmp_path):
    assert main(["stats", "--runtime", "--sizes", "200,400", "--taus", "30", "--workers", "1",
                 "-o", str(tmp_path)]) == 0
    assert (tmp_path / "runtime.csv").read_text().splitlines()[0] == "patterns,tau30"
    assert (tmp_path / "runtime.png").exists()


def test_triangle_via_cli(tmp_path):
    g = tmp_path / "tri.graph"
    g.write_text("t # tri\nv 0 A\nv 1 B\nv 2 C\ne 0 1\ne 1 2\ne 0 2\n")
    out = tmp_path / "p.txt"
    assert main(["mine", str(g), "--min-support", "1.0", "--max-edges", "3", "--workers", "1",
                 "-o", str(out)]) == 0
    assert len(parse_patterns(out.read_text())) == 10


@pytest.mark.parametrize("argv", [
    ["mine", "x.graph", "--min-support", "1.1"],
    ["select", "x.txt", "--tau", "101"],
    ["build-graphs", "x.csv", "--delta", "0"],
    ["select"],
    ["bogus"],
])
def test_config_errors_exit_2(argv, tmp_path, capsys):
    (tmp_path / "x.graph").write_text("t # a\nv 0 A\n")
    (tmp_path / "x.txt").write_text("")
    (tmp_path / "x.csv").write_text("1,A,0,0,0\n")
    argv = [str(tmp_path / a) if a.startswith("x.") else a for a in argv]
    assert main(argv) == 2


def test_bad_residue_line_names_file_and_line(tmp_path, capsys):
    bad = tmp_path / "bad.csv"
    bad.write_text("1,A,0,0,0\n2,J,1,1,1\n")
    assert main(["build-graphs", str(bad), "-o", str(tmp_path / "g")]) == 2
    assert f"{bad}:2" in capsys.readouterr().err


def test_mining_limit_exit_1(tmp_path):
    g = tmp_path / "c.graph"
    g.write_text("t # c\nv 0 A\nv 1 B\nv 2 C\nv 3 D\ne 0 1\ne 1 2\ne 2 3\ne 0 3\n")
    assert main(["mine", str(g), "--min-support", "1", "--max-patterns", "3",
                 "-o", str(tmp_path / "p.txt")]) == 1


def test_run_config_round_trip(tmp_path):
    rc = RunConfig("select", ["a", "b"], matrix="pam250", tau=45.0, seed=3, workers=2)
    assert RunConfig.from_json(rc.to_json()) == rc
    cfg = tmp_path / "c.json"
    cfg.write_text(RunConfig(tau=60.0).to_json())
    omega = tmp_path / "o.txt"
    omega.write_text("t # p0\n# support 1\nv 0 A\nv 1 A\ne 0 1\ns g1\n"
                     "t # p1\n# support 2\nv 0 A\nv 1 G\ne 0 1\ns g2 g3\n")
    out = tmp_path / "s.txt"
    assert main(["--config", str(cfg), "select", str(omega), "--workers", "1",
                 "-o", str(out)]) == 0
    assert parse_patterns(out.read_text()).meta["tau"] == "60.0"

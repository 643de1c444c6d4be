import subprocess
import sys
from types import SimpleNamespace

import pytest

from lastmile.cli import main
from lastmile.graphs import generate_random_graph, read_graph, write_node_edge_files
from lastmile.mlp import save_model


def run_cli(argv):
    try:
        return main(argv)
    except SystemExit as exc:  # argparse usage errors
        return int(exc.code)


@pytest.fixture(scope="module")
def art(tmp_path_factory, full_model):
    d = tmp_path_factory.mktemp("cli")
    ns = SimpleNamespace(
        dir=d,
        graph=d / "g.txt",
        model=d / "model.txt",
        data=d / "data.csv",
    )
    assert main(["gen-graph", "--vertices", "20", "--seed", "3",
                 "-o", str(ns.graph)]) == 0
    save_model(full_model.weights, ns.model)
    assert main(["gen-data", "--n", "300", "--seed", "1", "-o", str(ns.data)]) == 0
    return ns


class TestArgumentHandling:
    def test_no_arguments_is_input_error(self, capsys):
        assert run_cli([]) == 1
        assert "usage" in capsys.readouterr().err

    def test_unknown_flag(self, capsys):
        assert run_cli(["gen-graph", "--frobnicate"]) == 1
        assert "error" in capsys.readouterr().err

    def test_bad_subcommand(self):
        assert run_cli(["make-money"]) == 1

    def test_missing_required_option(self, capsys):
        assert run_cli(["gen-graph"]) == 1
        assert "missing required option --out" in capsys.readouterr().err

    def test_solve_requires_model(self, art, capsys):
        assert run_cli(["solve", "--graph", str(art.graph)]) == 1
        assert "--model" in capsys.readouterr().err

    def test_algorithm_choices_enforced(self, art):
        assert run_cli(["solve", "--graph", str(art.graph),
                        "--model", str(art.model), "--algorithm", "magic"]) == 1

    def test_config_echo_formats_ranges(self, art, tmp_path, capsys):
        out = tmp_path / "r.csv"
        assert run_cli(["bench", "--model", str(art.model), "--graph", str(art.graph),
                        "--n", "4..5", "--samples", "1", "-o", str(out)]) == 0
        echoed = capsys.readouterr().out
        assert "n=4..5" in echoed
        assert "measure_timing=false" in echoed


class TestConfigFile:
    def test_unknown_key_rejected(self, tmp_path, capsys):
        cfg = tmp_path / "c.cfg"
        cfg.write_text("bogus = 1\n")
        assert run_cli(["gen-graph", "--config", str(cfg),
                        "-o", str(tmp_path / "g.txt")]) == 1
        assert "unknown config key" in capsys.readouterr().err

    def test_file_value_used_when_flag_absent(self, tmp_path, capsys):
        cfg = tmp_path / "c.cfg"
        cfg.write_text("# sizing\nvertices = 10\nseed = 4\n")
        out = tmp_path / "g.txt"
        assert run_cli(["gen-graph", "--config", str(cfg), "-o", str(out)]) == 0
        echoed = capsys.readouterr().out
        assert "vertices=10" in echoed and "master seed: 4" in echoed
        assert len(read_graph(out).nodes) == 10

    def test_flag_beats_file(self, tmp_path, capsys):
        cfg = tmp_path / "c.cfg"
        cfg.write_text("vertices = 10\n")
        out = tmp_path / "g.txt"
        assert run_cli(["gen-graph", "--config", str(cfg), "--vertices", "12",
                        "-o", str(out)]) == 0
        assert "vertices=12" in capsys.readouterr().out
        assert len(read_graph(out).nodes) == 12

    def test_missing_config_file(self, tmp_path):
        assert run_cli(["gen-graph", "--config", str(tmp_path / "nope.cfg"),
                        "-o", str(tmp_path / "g.txt")]) == 1

    def test_dashed_keys_accepted(self, art, tmp_path, capsys):
        cfg = tmp_path / "c.cfg"
        cfg.write_text("learning-rate = 0.02\nmax-epochs = 2\nhidden-width = 8\n")
        assert run_cli(["train", "--config", str(cfg), "--data", str(art.data),
                        "-o", str(tmp_path / "m.txt")]) == 0
        assert "learning_rate=0.02" in capsys.readouterr().out


class TestSeedEnvironment:
    def test_env_supplies_default_seed(self, tmp_path, monkeypatch, capsys):
        monkeypatch.setenv("LASTMILE_SEED", "77")
        assert run_cli(["gen-graph", "-o", str(tmp_path / "g.txt")]) == 0
        assert "master seed: 77" in capsys.readouterr().out

    def test_flag_beats_environment(self, tmp_path, monkeypatch, capsys):
        monkeypatch.setenv("LASTMILE_SEED", "77")
        assert run_cli(["gen-graph", "--seed", "5", "-o", str(tmp_path / "g.txt")]) == 0
        assert "master seed: 5" in capsys.readouterr().out

    def test_garbage_environment_value(self, tmp_path, monkeypatch, capsys):
        monkeypatch.setenv("LASTMILE_SEED", "many")
        assert run_cli(["gen-graph", "-o", str(tmp_path / "g.txt")]) == 1
        assert "LASTMILE_SEED" in capsys.readouterr().err


class TestSolve:
    def test_time_objective_prints_neutral_average(self, art, capsys):
        assert run_cli(["solve", "--graph", str(art.graph), "--model", str(art.model),
                        "--n", "5", "--seed", "2", "--algorithm", "time"]) == 0
        out = capsys.readouterr().out
        assert "avg_sat 4.0000" in out
        assert out.count("cab ") == 5  # time objective keeps everyone solo

    def test_simsat_writes_plan_file(self, art, tmp_path, capsys):
        plan = tmp_path / "plan.txt"
        assert run_cli(["solve", "--graph", str(art.graph), "--model", str(art.model),
                        "--n", "6", "--seed", "3", "-o", str(plan)]) == 0
        text = plan.read_text()
        assert text.startswith("cab 0:")
        assert text in capsys.readouterr().out

    def test_optimal_beats_or_ties_simsat(self, art, capsys):
        def avg(algorithm):
            assert run_cli(["solve", "--graph", str(art.graph),
                            "--model", str(art.model), "--n", "5", "--seed", "4",
                            "--algorithm", algorithm]) == 0
            out = capsys.readouterr().out
            return float(out.rsplit("avg_sat ", 1)[1])

        assert avg("optimal") >= avg("simsat") - 1e-9

    def test_missing_graph_file(self, art, capsys):
        assert run_cli(["solve", "--graph", "nope.txt",
                        "--model", str(art.model)]) == 1

    def test_malformed_graph_file(self, art, tmp_path):
        bad = tmp_path / "bad.txt"
        bad.write_text("nodes 2\n0 0.0\n")  # truncated node line
        assert run_cli(["solve", "--graph", str(bad), "--model", str(art.model)]) == 1


class TestPipeline:
    def test_import_graph_with_crop(self, tmp_path, capsys):
        g = generate_random_graph(30, seed=8)
        nodes, edges = tmp_path / "nodes.csv", tmp_path / "edges.csv"
        write_node_edge_files(g, nodes, edges)
        out = tmp_path / "crop.txt"
        assert run_cli(["import-graph", "--nodes", str(nodes), "--edges", str(edges),
                        "--origin", str(g.origin), "--crop", "10",
                        "-o", str(out)]) == 0
        assert "10 nodes" in capsys.readouterr().out
        back = read_graph(out)
        assert len(back.nodes) == 10
        assert back.origin == g.origin

    def test_train_reports_metrics(self, art, tmp_path, capsys):
        model_out = tmp_path / "tiny.txt"
        assert run_cli(["train", "--data", str(art.data), "--seed", "5",
                        "--max-epochs", "3", "--hidden-width", "8",
                        "-o", str(model_out)]) == 0
        out = capsys.readouterr().out
        for token in ("train_rmse=", "val_rmse=", "test_rmse=", "epochs=3",
                      "stopped_early=False"):
            assert token in out
        assert model_out.exists()

    def test_bench_then_report_round_trip(self, art, tmp_path, capsys):
        rows = tmp_path / "rows.csv"
        assert run_cli(["bench", "--model", str(art.model), "--graph", str(art.graph),
                        "--n", "4,5", "--samples", "2", "--seed", "9",
                        "-o", str(rows)]) == 0
        agg = tmp_path / "rows_agg.csv"
        assert rows.exists() and agg.exists()
        redone = tmp_path / "redone.csv"
        assert run_cli(["report", "--results", str(rows), "-o", str(redone)]) == 0
        assert redone.read_bytes() == agg.read_bytes()
        capsys.readouterr()

    def test_bench_chart_output(self, art, tmp_path):
        rows = tmp_path / "rows.csv"
        chart = tmp_path / "chart.png"
        assert run_cli(["bench", "--model", str(art.model), "--graph", str(art.graph),
                        "--n", "4", "--samples", "1", "--seed", "9",
                        "-o", str(rows), "--chart", str(chart)]) == 0
        assert chart.stat().st_size > 0


class TestExitCodes:
    def test_unwritable_output_is_runtime_error(self, art, capsys):
        missing_dir = str(art.dir / "absent" / "g.txt")
        assert run_cli(["gen-graph", "-o", missing_dir]) == 2
        assert "runtime error" in capsys.readouterr().err

    @pytest.mark.filterwarnings("ignore::RuntimeWarning")
    def test_training_divergence_is_runtime_error(self, art, tmp_path, capsys):
        assert run_cli(["train", "--data", str(art.data),
                        "--learning-rate", "1000", "--max-epochs", "5",
                        "-o", str(tmp_path / "m.txt")]) == 2
        assert "diverged" in capsys.readouterr().err

    def test_success_is_zero(self, tmp_path):
        assert run_cli(["gen-graph", "--seed", "1",
                        "-o", str(tmp_path / "g.txt")]) == 0


class TestEntryPoint:
    def test_module_invocation(self, tmp_path):
        out = tmp_path / "g.txt"
        proc = subprocess.run(
            [sys.executable, "-m", "lastmile", "gen-graph", "--vertices", "15",
             "--seed", "2", "-o", str(out)],
            capture_output=True, text=True, timeout=120,
        )
        assert proc.returncode == 0
        assert "wrote" in proc.stdout
        assert len(read_graph(out).nodes) == 15

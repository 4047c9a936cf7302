"""End-to-end command-line behavior: files in, files out, exit codes."""

import csv
import json
import os

import pytest

from lssched.cli import main
from lssched.pauli import load_circuit

GATES = "qubits 3\nh 0\nt 0\ncx 0 1\nt 1\ns 2\nt 2\n"


def write(path, text):
    path.write_text(text, encoding="utf-8")
    return str(path)


@pytest.fixture
def product_file(tmp_path):
    path = tmp_path / "circuit.json"
    code = main(["randgen", str(path), "--qubits", "8", "--products", "40",
                 "--size-mean", "2.0", "--seed", "3"])
    assert code == 0
    return str(path)


class TestTranspile:
    def test_gate_file_to_products(self, tmp_path, capsys):
        gate_path = write(tmp_path / "prog.gates", GATES)
        out_path = str(tmp_path / "prog.json")
        assert main(["transpile", gate_path, out_path]) == 0
        circuit = load_circuit(out_path)
        assert len(circuit.products) == 3
        assert "3 products" in capsys.readouterr().out

    def test_parse_error_exit_code(self, tmp_path, capsys):
        gate_path = write(tmp_path / "bad.gates", "qubits 2\nfrobnicate 0\n")
        assert main(["transpile", gate_path, str(tmp_path / "o.json")]) == 2
        assert "line 2" in capsys.readouterr().err

    def test_missing_file_exit_code(self, tmp_path):
        assert main(["transpile", str(tmp_path / "nope.gates"),
                     str(tmp_path / "o.json")]) == 2


class TestStats:
    def test_stats_output(self, product_file, capsys):
        assert main(["stats", product_file]) == 0
        out = capsys.readouterr().out
        assert "qubits 8" in out
        assert "products 40" in out
        assert "avg_products_per_layer" in out

    def test_window_csv(self, product_file, tmp_path):
        csv_path = str(tmp_path / "windows.csv")
        assert main(["stats", product_file, "--window", "2",
                     "--window-csv", csv_path]) == 0
        with open(csv_path, encoding="utf-8") as fh:
            rows = list(csv.DictReader(fh))
        assert rows
        assert set(rows[0]) == {"layer_index", "avg_products", "max_products",
                                "avg_size", "max_size"}


class TestRandgen:
    def test_writes_circuit(self, product_file):
        circuit = load_circuit(product_file)
        assert circuit.num_qubits == 8
        assert len(circuit.products) == 40

    def test_preset_flag(self, tmp_path, capsys):
        path = str(tmp_path / "c.json")
        assert main(["randgen", path, "--qubits", "16", "--products", "60",
                     "--preset", "low", "--seed", "1"]) == 0
        assert "products_per_layer" in capsys.readouterr().out

    def test_target_ppl_flag(self, tmp_path):
        path = str(tmp_path / "c.json")
        assert main(["randgen", path, "--qubits", "16", "--products", "60",
                     "--target-ppl", "3.0"]) == 0

    def test_preset_and_size_mean_conflict(self, tmp_path):
        with pytest.raises(SystemExit) as err:
            main(["randgen", str(tmp_path / "c.json"), "--qubits", "8",
                  "--preset", "low", "--size-mean", "2.0"])
        assert err.value.code == 2

    def test_bad_size_mean_exit_code(self, tmp_path):
        assert main(["randgen", str(tmp_path / "c.json"), "--qubits", "4",
                     "--size-mean", "40.0"]) == 2


class TestSchedule:
    def test_run_writes_all_outputs(self, product_file, tmp_path, capsys):
        out_dir = str(tmp_path / "out")
        layout_path = str(tmp_path / "layout.json")
        code = main(["schedule", product_file, "--out-dir", out_dir,
                     "--instant-magic", "--seed", "5", "--reps", "2",
                     "--verify", "--dump-layout", layout_path])
        assert code == 0
        assert sorted(os.listdir(out_dir)) == [
            "metrics_5.json", "metrics_6.json", "summary.json",
            "trace_5.csv", "trace_6.csv"]
        summary = json.loads((tmp_path / "out" / "summary.json").read_text())
        assert summary["runs"] == 2
        assert summary["config"]["instant_magic"] is True
        assert "efficiency_upper_bound" in summary
        layout = json.loads((tmp_path / "layout.json").read_text())
        assert any(c["kind"] == "data" for c in layout["cells"])
        out = capsys.readouterr().out
        assert "seed 5:" in out and "seed 6:" in out

    def test_metrics_content(self, product_file, tmp_path):
        out_dir = tmp_path / "out"
        assert main(["schedule", product_file, "--out-dir", str(out_dir),
                     "--arch", "bus", "--cultivation-mean", "3.0",
                     "--seed", "1"]) == 0
        metrics = json.loads((out_dir / "metrics_1.json").read_text())
        assert metrics["config"]["arch"] == "bus"
        assert metrics["cycles"] > 0
        assert metrics["volume"] == metrics["n_cells"] * metrics["cycles"]

    def test_baseline_compat_flag(self, product_file, tmp_path):
        out_dir = tmp_path / "out"
        assert main(["schedule", product_file, "--out-dir", str(out_dir),
                     "--baseline-compat", "--seed", "2"]) == 0
        metrics = json.loads((out_dir / "metrics_2.json").read_text())
        assert metrics["config"]["arch"] == "bus"
        assert metrics["config"]["packing"] == "random_order"
        assert metrics["config"]["instant_magic"] is True
        assert metrics["config"]["allow_horizontal_edges"] is False

    def test_byte_identical_reruns(self, product_file, tmp_path):
        args = ["schedule", product_file, "--arch", "pure",
                "--cultivation-mean", "4.0", "--seed", "9"]
        texts = []
        for sub in ("a", "b"):
            out_dir = tmp_path / sub
            assert main(args + ["--out-dir", str(out_dir)]) == 0
            texts.append(((out_dir / "trace_9.csv").read_bytes(),
                          (out_dir / "metrics_9.json").read_bytes()))
        assert texts[0] == texts[1]

    def test_unschedulable_exit_code(self, tmp_path, capsys):
        path = tmp_path / "c.json"
        write(path, '{"version": 1, "num_qubits": 2, "products": ["X0 Z1"]}')
        code = main(["schedule", str(path), "--out-dir", str(tmp_path / "o"),
                     "--instant-magic", "--strict-single-side"])
        assert code == 2  # access rules reject the product up front


class TestSweep:
    def spec(self, tmp_path, jobs):
        spec_path = tmp_path / "sweep.json"
        write(spec_path, json.dumps({"output_dir": "results", "jobs": jobs}))
        return str(spec_path)

    def test_sweep_matrix(self, product_file, tmp_path, capsys):
        jobs = [
            {"name": "pure", "input": {"product_file": product_file},
             "arch": "pure", "config": {"cultivation_mean": 3.0},
             "reps": 2, "seed": 0},
            {"name": "bus", "input": {"product_file": product_file},
             "arch": "bus", "config": {"cultivation_mean": 3.0},
             "reps": 2, "seed": 0},
            {"name": "randgen-input",
             "input": {"randgen": {"num_qubits": 8, "num_products": 30,
                                   "size_mean": 2.0, "seed": 1}},
             "arch": "pure", "config": {"instant_magic": True}},
        ]
        assert main(["sweep", self.spec(tmp_path, jobs)]) == 0
        results = tmp_path / "results"
        with open(results / "long.csv", encoding="utf-8") as fh:
            rows = list(csv.DictReader(fh))
        assert len(rows) == 5
        assert {r["status"] for r in rows} == {"ok"}
        assert {r["job"] for r in rows} == {"pure", "bus", "randgen-input"}
        for name in ("parallelism_efficiency.csv", "density_efficiency.csv",
                     "cultivation_improvement.csv"):
            assert (results / name).exists()

    def test_parallel_workers_match_serial(self, product_file, tmp_path):
        jobs = [{"name": f"j{i}", "input": {"product_file": product_file},
                 "arch": "pure", "config": {"instant_magic": True},
                 "seed": i} for i in range(3)]
        spec = self.spec(tmp_path, jobs)
        assert main(["sweep", spec]) == 0
        serial = (tmp_path / "results" / "long.csv").read_bytes()
        assert main(["sweep", spec, "--jobs", "3"]) == 0
        assert (tmp_path / "results" / "long.csv").read_bytes() == serial

    def test_failed_job_exit_code(self, tmp_path, capsys):
        bad = [{"name": "broken", "input": {"product_file": "missing.json"},
                "arch": "pure"}]
        assert main(["sweep", self.spec(tmp_path, bad)]) == 4
        with open(tmp_path / "results" / "long.csv", encoding="utf-8") as fh:
            rows = list(csv.DictReader(fh))
        assert rows[0]["status"] == "error"
        assert rows[0]["error"]

    def test_bad_spec_exit_code(self, tmp_path):
        assert main(["sweep", write(tmp_path / "s.json", "{}")]) == 2
        assert main(["sweep", write(tmp_path / "t.json", "not json")]) == 2

import numpy as np
import pytest

from nlchns.cli import main

GOOD = """
grid.n = 32
grid.l = 6.283185307179586
kernel = gaussian
kernel.sigma = 0.5026548245743669
kernel.strength = 6.0
potential = double_well
nu = 0.1
dt = 2e-3
t_end = 0.05
"""

RANDOM_RUN = GOOD + """
initial = random
initial.amplitude = 0.05
initial.mean = 0.0
initial.seed = 77
initial.u0 = taylor_green
initial.u0_amplitude = 0.5
"""


def write(tmp_path, text, name="run.cfg"):
    p = tmp_path / name
    p.write_text(text)
    return str(p)


class TestRun:
    def test_zero_data_exits_clean(self, tmp_path, capsys):
        rc = main(["run", write(tmp_path, GOOD)])
        out = capsys.readouterr().out
        assert rc == 0
        assert "steps completed: 25" in out
        assert "total energy" in out

    def test_writes_diagnostics_and_snapshots(self, tmp_path):
        out_dir = tmp_path / "out"
        cfg = RANDOM_RUN + f"output.out_dir = {out_dir}\noutput.snapshot_every = 10\n"
        rc = main(["run", write(tmp_path, cfg)])
        assert rc == 0
        assert (out_dir / "diagnostics.csv").exists()
        assert (out_dir / "phi_00000000.f64").exists()
        assert (out_dir / "phi_00000020.f64").exists()
        assert (out_dir / "ux_00000010.f64").exists()

    def test_gate_refusal_and_force(self, tmp_path, capsys):
        weak = GOOD.replace("kernel.strength = 6.0", "kernel.strength = 1.0")
        rc = main(["run", write(tmp_path, weak)])
        assert rc == 3
        assert "refused" in capsys.readouterr().out
        rc = main(["run", write(tmp_path, weak), "--force"])
        assert rc == 0

    def test_deterministic_csv_bytes(self, tmp_path):
        out_a, out_b = tmp_path / "a", tmp_path / "b"
        cfg_a = write(tmp_path, RANDOM_RUN + f"output.out_dir = {out_a}\n", "a.cfg")
        cfg_b = write(tmp_path, RANDOM_RUN + f"output.out_dir = {out_b}\n", "b.cfg")
        assert main(["run", cfg_a]) == 0
        assert main(["run", cfg_b]) == 0
        assert (out_a / "diagnostics.csv").read_bytes() == (out_b / "diagnostics.csv").read_bytes()

    def test_seed_override_changes_output(self, tmp_path):
        out_a, out_b = tmp_path / "a", tmp_path / "b"
        cfg_a = write(tmp_path, RANDOM_RUN + f"output.out_dir = {out_a}\n", "a.cfg")
        cfg_b = write(tmp_path, RANDOM_RUN + f"output.out_dir = {out_b}\n", "b.cfg")
        assert main(["run", cfg_a]) == 0
        assert main(["run", cfg_b, "--seed", "123"]) == 0
        assert (out_a / "diagnostics.csv").read_bytes() != (out_b / "diagnostics.csv").read_bytes()

    def test_bad_config_exit_code(self, tmp_path, capsys):
        rc = main(["run", write(tmp_path, GOOD.replace("dt = 2e-3", "dt = 0"))])
        assert rc == 2
        assert "dt must be positive" in capsys.readouterr().out


class TestCheck:
    def test_passing_report(self, tmp_path, capsys):
        rc = main(["check", write(tmp_path, GOOD)])
        out = capsys.readouterr().out
        assert rc == 0
        assert "h1 = pass" in out and "h4 = pass" in out
        assert "m0 = 4" in out

    def test_failing_convexity(self, tmp_path, capsys):
        weak = GOOD.replace("kernel.strength = 6.0", "kernel.strength = 1.0")
        rc = main(["check", write(tmp_path, weak)])
        out = capsys.readouterr().out
        assert rc == 1
        assert "h2 = fail" in out


class TestConvergenceAndBenchmark:
    def test_convergence_dts(self, tmp_path, capsys):
        cfg = """
grid.n = 32
grid.l = 6.283185307179586
kernel = gaussian
kernel.sigma = 0.9424777960769379
kernel.strength = 1.0
potential = quartic
potential.a4 = 1.0
potential.a2 = 0.5
nu = 0.05
dt = 8e-3
t_end = 0.2
stabilizer = 1.0
initial = random
initial.amplitude = 0.05
initial.mean = 0.0
initial.seed = 11
initial.band = 1
initial.u0 = taylor_green
initial.u0_amplitude = 0.25
"""
        rc = main(["convergence", write(tmp_path, cfg), "--dts", "8e-3,4e-3,2e-3"])
        out = capsys.readouterr().out
        assert "order[residual]" in out
        assert rc == 0

    def test_convergence_sizes(self, tmp_path, capsys):
        cfg = RANDOM_RUN.replace("initial.amplitude = 0.05", "initial.amplitude = 0.1")
        rc = main(["convergence", write(tmp_path, cfg), "--sizes", "16,32,64"])
        out = capsys.readouterr().out
        assert "uniform_bounds" in out
        assert rc == 0

    def test_convergence_needs_flags(self, tmp_path, capsys):
        rc = main(["convergence", write(tmp_path, GOOD)])
        assert rc == 2

    def test_benchmark_taylor_green(self, tmp_path, capsys):
        cfg = GOOD + "initial.u0 = taylor_green\ninitial.u0_amplitude = 1.0\n"
        rc = main(["benchmark", "taylor-green", write(tmp_path, cfg)])
        out = capsys.readouterr().out
        assert rc == 0
        assert "relative_energy_error" in out


class TestReport:
    def test_reaudit_round_trip(self, tmp_path, capsys):
        out_dir = tmp_path / "out"
        gentle = GOOD + f"""
initial = random
initial.amplitude = 1e-5
initial.mean = 0.45
initial.seed = 13
output.out_dir = {out_dir}
checks.dissipative = true
"""
        cfg = write(tmp_path, gentle)
        assert main(["run", cfg]) == 0
        rc = main(["report", str(out_dir / "diagnostics.csv"), "--config", cfg])
        out = capsys.readouterr().out
        assert "energy inequality: PASS" in out
        assert "dissipative envelope: PASS" in out
        assert rc == 0

    def test_report_needs_nu(self, tmp_path, capsys):
        out_dir = tmp_path / "out"
        cfg = write(tmp_path, GOOD + f"output.out_dir = {out_dir}\n")
        assert main(["run", cfg]) == 0
        rc = main(["report", str(out_dir / "diagnostics.csv")])
        assert rc == 2
        rc = main(["report", str(out_dir / "diagnostics.csv"), "--nu", "0.1"])
        assert rc == 0

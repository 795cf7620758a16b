"""Tests for cli.py - configuration and experiment runs."""
import os

import pytest

from cli import ConfigError, Experiment, RunConfig, main, parse_config, sweep_config
from models import SenseMode, SweepVariable


@pytest.fixture
def config_file(tmp_path):
    def write(text):
        path = tmp_path / "run.conf"
        path.write_text(text, encoding="utf-8")
        return str(path)
    return write


class TestParseConfig:
    """Test configuration resolution."""

    def test_defaults(self):
        """Test an empty configuration uses the indoor 60 GHz defaults."""
        config = parse_config(["--experiment", "fig4_sumrate_vs_k"])
        params = config.scenario_params()
        assert config.trials == 1000
        assert config.thresholds() == (-74.0, -64.0)
        assert params.area_width_m == params.area_height_m == 10.0
        assert params.pair_distance_m == 4.0
        assert params.carrier_freq_hz == 60e9
        assert params.bandwidth_hz == 1e9
        assert params.tx_power_dbm == 10.0
        assert params.pathloss_exponent == 2.0
        assert params.noise_psd_dbm_hz == -174.0
        assert params.antenna.theta_tx_deg == 60.0
        assert params.antenna.theta_rx_deg == 90.0
        assert params.antenna.tx_mainlobe_gain_db == 10.0
        assert params.antenna.tx_sidelobe_gain == 0.0

    def test_trials_override(self):
        """Test overriding trials leaves the rest at defaults."""
        config = parse_config(["--trials", "10"])
        assert config.trials == 10
        assert config.model_dump(exclude={"trials"}) == RunConfig().model_dump(exclude={"trials"})

    def test_file_then_flags(self, config_file):
        """Test flags override the config file."""
        path = config_file("# run settings\nk = 20\ntrials = 50  # quick\nschemes = dir-lbt, omni-lbt\n"
                           "mt_rx_mode = omni\n")
        config = parse_config(["--config", path, "--k", "25"])
        assert config.k == 25
        assert config.trials == 50
        assert config.schemes == ["dir-lbt", "omni-lbt"]
        assert config.mt_rx_mode == SenseMode.OMNI

    def test_repeatable_scheme_flag(self):
        """Test --scheme may be given several times."""
        config = parse_config(["--scheme", "dir-lbt", "--scheme", "dir-lbt-dir-lbr"])
        assert config.schemes == ["dir-lbt", "dir-lbt-dir-lbr"]

    def test_normalized_threshold(self):
        """Test the directional threshold follows the normalized one."""
        assert parse_config(["--threshold", "-70"]).thresholds() == (-70.0, -60.0)
        assert parse_config(["--threshold-dir-dbm", "-50"]).thresholds() == (-74.0, -50.0)

    def test_unknown_key_suggestion(self, config_file):
        """Test a misspelt key suggests the known one."""
        with pytest.raises(ConfigError, match="did you mean 'threshold'"):
            parse_config(["--config", config_file("treshold = -70\n")])

    def test_bad_value_names_key(self, config_file):
        """Test an invalid value names its key."""
        with pytest.raises(ConfigError, match="trials"):
            parse_config(["--config", config_file("trials = many\n")])
        with pytest.raises(ConfigError, match="theta_rx_deg"):
            parse_config(["--config", config_file("theta_rx_deg = 400\n")])

    def test_missing_equals(self, config_file):
        """Test a line without '=' is rejected with its line number."""
        with pytest.raises(ConfigError, match=":2:"):
            parse_config(["--config", config_file("k = 3\nk 4\n")])

    def test_unknown_scheme(self, config_file):
        """Test unknown scheme names are rejected."""
        with pytest.raises(ConfigError, match="unknown scheme"):
            parse_config(["--config", config_file("schemes = dir-lbt, csma\n")])

    def test_sweep_grids(self):
        """Test sweep experiments pick their sweep variable and grid."""
        tx_sweep = sweep_config(parse_config(["--experiment", "fig6_sumrate_vs_txbw"]))
        assert tx_sweep.sweep_variable == SweepVariable.THETA_TX_DEG
        assert tx_sweep.base.num_pairs == 40
        k_sweep = sweep_config(parse_config([]))
        assert 40 in k_sweep.sweep_values
        rx_sweep = sweep_config(parse_config(["--experiment", "fig7_sumrate_vs_rxbw"]))
        assert {90, 360} <= set(rx_sweep.sweep_values)

    def test_custom_sweep(self):
        """Test custom sweeps take sweep_var and sweep_values."""
        config = parse_config(["--experiment", "custom", "--sweep-var", "theta_rx_deg",
                               "--sweep-values", "45, 90"])
        sweep = sweep_config(config)
        assert sweep.sweep_variable == SweepVariable.THETA_RX_DEG
        assert sweep.sweep_values == [45, 90]

    def test_conflicting_sweep_var(self):
        """Test a sweep_var that contradicts the experiment is rejected."""
        config = parse_config(["--experiment", "fig4_sumrate_vs_k", "--sweep-var", "theta_tx_deg"])
        with pytest.raises(ConfigError, match="sweep_var"):
            sweep_config(config)


class TestMain:
    """Test end-to-end runs."""

    def test_slots_overhead(self, tmp_path, golden):
        """Test the overhead table for mu 3 and 4."""
        out = tmp_path / "overhead.csv"
        assert main(["--experiment", "slots_overhead", "--out", str(out)]) == 0
        assert out.read_text(encoding="utf-8") == golden("slots_overhead.csv")

    def test_slots_overhead_single_mu(self, capsys):
        """Test --mu restricts the table to one row."""
        assert main(["--experiment", "slots_overhead", "--mu", "2"]) == 0
        lines = capsys.readouterr().out.splitlines()
        assert lines[1] == "2,60,250,9,2.778"
        assert len(lines) == 2

    def test_callflow_demo(self, tmp_path, golden):
        """Test the call-flow demo trace matches the golden file."""
        out = tmp_path / "trace.txt"
        assert main(["--experiment", "callflow_demo", "--out", str(out)]) == 0
        assert out.read_text(encoding="utf-8") == golden("callflow_demo.txt")

    def test_sweep_repeatable(self, tmp_path, capsys):
        """Test a fixed seed writes identical CSV files."""
        args = ["--experiment", "fig4_sumrate_vs_k", "--trials", "5", "--seed", "4",
                "--sweep-values", "2,6", "--workers", "2"]
        first, second = tmp_path / "a.csv", tmp_path / "b.csv"
        assert main(args + ["--out", str(first)]) == 0
        assert main(args + ["--out", str(second), "--workers", "1"]) == 0
        text = first.read_text(encoding="utf-8")
        assert text == second.read_text(encoding="utf-8")
        lines = text.splitlines()
        assert lines[0].startswith("scheme,sweep_var,sweep_value")
        assert len(lines) == 1 + 6 * 2
        assert "best K=" in capsys.readouterr().out

    def test_sweep_to_stdout_is_pure_csv(self, capsys):
        """Test without --out stdout holds only the CSV and the summary goes to stderr."""
        assert main(["--experiment", "fig4_sumrate_vs_k", "--trials", "2",
                     "--sweep-values", "2", "--scheme", "dir-lbt", "--workers", "1"]) == 0
        captured = capsys.readouterr()
        lines = captured.out.splitlines()
        assert lines[0].startswith("scheme,sweep_var,sweep_value")
        assert len(lines) == 2
        assert all(len(line.split(",")) == 8 for line in lines)
        assert "best K=" in captured.err

    def test_config_error_exit_code(self, config_file, capsys):
        """Test configuration errors exit with status 2."""
        assert main(["--config", config_file("treshold = -70\n")]) == 2
        assert "threshold" in capsys.readouterr().err

    def test_missing_config_file(self, tmp_path):
        """Test an unreadable config file is a configuration error."""
        assert main(["--config", str(tmp_path / "absent.conf")]) == 2

    def test_unwritable_output(self, tmp_path, capsys):
        """Test an unwritable output path exits with status 1."""
        out = os.path.join(str(tmp_path), "missing-dir", "trace.txt")
        assert main(["--experiment", "callflow_demo", "--out", out]) == 1
        assert "cannot write" in capsys.readouterr().err

    def test_experiment_names(self):
        """Test every experiment name parses."""
        for experiment in Experiment:
            assert parse_config(["--experiment", experiment.value]).experiment == experiment

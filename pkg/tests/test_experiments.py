import io
from pathlib import Path

import numpy as np
import pytest

from radome_irs import ConfigError, SimConfig
from radome_irs.cli import main
from radome_irs.experiments import (
    RESULT_FIELDS,
    ResultRow,
    irpa_params_for,
    realization_tensors,
    run_algorithm,
    run_compare,
    run_mismatch,
    run_simulate,
    run_sweep,
    write_results_csv,
)
from radome_irs.seeding import realization_seed, substream


@pytest.fixture(scope="module")
def tiny_config():
    return SimConfig(M_x=2, M_z=2, N_j2=2, K=2, L_k=2).validate()


def _csv_bytes(rows):
    buf = io.StringIO()
    write_results_csv(rows, buf)
    return buf.getvalue()


def test_csv_header_matches_result_fields(tiny_config):
    rows, _ = run_simulate(tiny_config, "none", realizations=1)
    text = _csv_bytes(rows)
    assert text.splitlines()[0] == ",".join(RESULT_FIELDS)
    assert text.splitlines()[0] == (
        "experiment,realization,seed,algorithm,param_name,param_value,"
        "sum_rate_bps_hz,oracle_queries,iterations,wall_ms"
    )


def test_csv_is_deterministic_and_sorted(tiny_config):
    rows_a, _ = run_simulate(tiny_config, "rpa", realizations=3, t_total=10)
    rows_b, _ = run_simulate(tiny_config, "rpa", realizations=3, t_total=10)
    assert _csv_bytes(rows_a) == _csv_bytes(rows_b)
    shuffled = list(reversed(rows_a))
    assert _csv_bytes(shuffled) == _csv_bytes(rows_a)


def test_realization_seeds_are_distinct(tiny_config):
    seeds = [realization_seed(tiny_config.master_seed, r) for r in range(200)]
    assert len(set(seeds)) == len(seeds)


def test_channels_do_not_depend_on_algorithm_order(tiny_config):
    a = realization_tensors(tiny_config, 1)
    _ = run_algorithm("rpa", tiny_config, a, 0, t_total=5)
    b = realization_tensors(tiny_config, 1)
    assert np.array_equal(a.f, b.f)
    assert np.array_equal(a.direct, b.direct)


def test_grouping_kicks_in_above_threshold():
    config = SimConfig(N_j1=3).validate()  # 96 elements
    tensors = realization_tensors(config, 0)
    assert tensors.n_elements == 32
    baseline = realization_tensors(SimConfig().validate(), 0)
    assert baseline.n_elements == 32  # exactly at the threshold: ungrouped


def test_irpa_budget_split():
    params = irpa_params_for(1400)
    assert params.T0 == 200
    assert params.T_j == (1400 - 200) // 40
    assert params.max_rounds == 10
    tight = irpa_params_for(100)
    assert tight.T0 == 100 and tight.T_j == 0


def test_run_algorithm_rpa_query_contract(tiny_config):
    tensors = realization_tensors(tiny_config, 0)
    rate, queries, iters, theta, _ = run_algorithm("rpa", tiny_config, tensors, 0, t_total=17)
    assert queries == 17
    assert iters == 17
    assert rate > 0
    assert np.allclose(np.abs(theta), 1.0, atol=1e-9)


def test_run_algorithm_rejects_unknown(tiny_config):
    tensors = realization_tensors(tiny_config, 0)
    with pytest.raises(ConfigError):
        run_algorithm("simulated-annealing", tiny_config, tensors, 0)


def test_run_compare_setups(tiny_config):
    rows = run_compare(tiny_config, ["full", "single", "double", "none"], realizations=1)
    by_setup = {row.param_value: row for row in rows}
    assert set(by_setup) == {"full", "single", "double", "none"}
    assert by_setup["none"].algorithm == "none"
    assert by_setup["full"].sum_rate_bps_hz >= by_setup["none"].sum_rate_bps_hz
    with pytest.raises(ConfigError):
        run_compare(tiny_config, ["everything"], 1)


def test_run_sweep_tilt_forces_ground_sampling(tiny_config):
    rows = run_sweep(tiny_config, "theta_tilt", [0.0, np.pi / 2], realizations=1)
    values = sorted(row.param_value for row in rows)
    assert values == [0.0, np.pi / 2]
    with pytest.raises(ConfigError):
        run_sweep(tiny_config, "bandwidth", [1], 1)
    with pytest.raises(ConfigError):
        run_sweep(tiny_config, "t_total", [], 1)


def test_run_sweep_t_total_budgets(tiny_config):
    rows = run_sweep(tiny_config, "t_total", [30, 60], realizations=1)
    budgets = {
        (row.algorithm, row.param_value): row.oracle_queries for row in rows
    }
    assert budgets[("rpa", 30)] == 30
    assert budgets[("rpa", 60)] == 60
    assert budgets[("sr", 30)] == 0  # perfect-CSI design never queries the oracle
    assert budgets[("dft", 30)] == 2**4


def test_run_mismatch_emits_both_designs(tiny_config):
    rows = run_mismatch(tiny_config, [8], realizations=1)
    algorithms = sorted(row.algorithm for row in rows)
    assert algorithms == ["sr-elementwise", "sr-farfield"]
    assert all(row.param_value == 8 for row in rows)
    with pytest.raises(ConfigError):
        run_mismatch(tiny_config.with_(eta=4), [8], 1)


def test_wall_ms_is_a_fixed_placeholder(tiny_config):
    rows, _ = run_simulate(tiny_config, "none", realizations=2)
    assert all(row.wall_ms == 0 for row in rows)


CONFIG_TEXT = "M_x = 2\nM_z = 2\nN_j2 = 2\nK = 2\nL_k = 2\n"


def _write_config(tmp_path: Path) -> Path:
    path = tmp_path / "sim.cfg"
    path.write_text(CONFIG_TEXT)
    return path


def test_cli_simulate_writes_csv_and_figure(tmp_path):
    config = _write_config(tmp_path)
    out = tmp_path / "results.csv"
    code = main(
        [
            "simulate",
            "--config", str(config),
            "--algorithm", "rpa",
            "--t-total", "10",
            "--realizations", "2",
            "--out", str(out),
            "--trace", str(tmp_path / "trace.csv"),
        ]
    )
    assert code == 0
    lines = out.read_text().splitlines()
    assert lines[0].startswith("experiment,")
    assert len(lines) == 3
    assert (tmp_path / "results.png").exists()
    trace = (tmp_path / "trace.csv").read_text().splitlines()
    assert trace[0] == "step,accepted_rate_bps_hz,oracle_queries"
    assert (tmp_path / "trace.png").exists()


def test_cli_reruns_are_byte_identical(tmp_path):
    config = _write_config(tmp_path)
    out_a, out_b = tmp_path / "a.csv", tmp_path / "b.csv"
    for out in (out_a, out_b):
        code = main(
            [
                "simulate", "--config", str(config), "--algorithm", "rpa",
                "--t-total", "10", "--realizations", "2",
                "--out", str(out), "--no-fig",
            ]
        )
        assert code == 0
    assert out_a.read_bytes() == out_b.read_bytes()
    assert not (tmp_path / "a.png").exists()


def test_cli_seed_override_changes_results(tmp_path):
    config = _write_config(tmp_path)
    out_a, out_b = tmp_path / "a.csv", tmp_path / "b.csv"
    for out, seed in ((out_a, "1"), (out_b, "2")):
        main(
            [
                "simulate", "--config", str(config), "--algorithm", "none",
                "--realizations", "1", "--seed", seed,
                "--out", str(out), "--no-fig",
            ]
        )
    assert out_a.read_bytes() != out_b.read_bytes()


def test_cli_compare_and_mismatch(tmp_path):
    config = _write_config(tmp_path)
    out = tmp_path / "compare.csv"
    assert main(
        [
            "compare", "--config", str(config), "--setups", "full,none",
            "--realizations", "1", "--out", str(out), "--no-fig",
        ]
    ) == 0
    assert len(out.read_text().splitlines()) == 3

    out = tmp_path / "mismatch.csv"
    assert main(
        [
            "mismatch", "--config", str(config), "--values", "8",
            "--realizations", "1", "--out", str(out), "--no-fig",
        ]
    ) == 0
    assert len(out.read_text().splitlines()) == 3


def test_cli_config_error_exits_2(tmp_path):
    bad = tmp_path / "bad.cfg"
    bad.write_text("rocket_fuel = 11\n")
    out = tmp_path / "never.csv"
    stderr = io.StringIO()
    from contextlib import redirect_stderr

    with redirect_stderr(stderr):
        code = main(
            ["simulate", "--config", str(bad), "--out", str(out), "--no-fig"]
        )
    assert code == 2
    assert not out.exists()
    assert "config error" in stderr.getvalue()


def test_cli_rejects_zero_realizations(tmp_path):
    config = _write_config(tmp_path)
    code = main(
        [
            "simulate", "--config", str(config), "--realizations", "0",
            "--out", str(tmp_path / "x.csv"), "--no-fig",
        ]
    )
    assert code == 2

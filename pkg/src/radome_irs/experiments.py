"""Seeded Monte Carlo experiment harness producing deterministic CSV results.

Every realization draws its channels from a sub-stream named only by the
master seed and the realization index, so adding or reordering algorithms
never changes the channels, and identical (spec, master_seed) runs produce
byte-identical CSV files.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .channel import (
    apply_grouping,
    assemble_effective_channel,
    build_far_field_tensors,
    build_tensors,
    column_grouping,
    sample_paths,
)
from .config import ConfigError, SimConfig
from .geometry import build_layout
from .optimize import (
    IrpaParams,
    OptimizerTrace,
    SrParams,
    dft_codebook_search,
    irpa,
    rpa,
    successive_refinement,
)
from .rate import RateParams, make_oracle, sum_rate
from .seeding import realization_seed, substream

RESULT_FIELDS = (
    "experiment",
    "realization",
    "seed",
    "algorithm",
    "param_name",
    "param_value",
    "sum_rate_bps_hz",
    "oracle_queries",
    "iterations",
    "wall_ms",
)

ALGORITHMS = ("sr", "rpa", "irpa", "dft", "none")

# Fixed IRPA budget split: T_j = (T_total - T0) / (4 * max_rounds).
IRPA_T0 = 200
IRPA_MAX_ROUNDS = 10

GROUPING_THRESHOLD = 32  # group to shared columns whenever N exceeds this


@dataclass(frozen=True)
class ResultRow:
    experiment: str
    realization: int
    seed: int
    algorithm: str
    param_name: str
    param_value: object
    sum_rate_bps_hz: float
    oracle_queries: int
    iterations: int
    wall_ms: int = 0  # fixed placeholder: kept deterministic for reproducible CSV

    def sort_key(self):
        return (
            self.experiment,
            self.realization,
            self.algorithm,
            self.param_name,
            _format_param(self.param_value),
        )


def _format_param(value) -> str:
    if isinstance(value, float):
        return format(value, ".12g")
    return str(value)


def write_results_csv(rows, fh) -> None:
    fh.write(",".join(RESULT_FIELDS) + "\n")
    for row in sorted(rows, key=ResultRow.sort_key):
        fh.write(
            f"{row.experiment},{row.realization},{row.seed},{row.algorithm},"
            f"{row.param_name},{_format_param(row.param_value)},"
            f"{row.sum_rate_bps_hz:.12g},{row.oracle_queries},{row.iterations},{row.wall_ms}\n"
        )


def realization_tensors(config: SimConfig, realization: int, far_field: bool = False):
    """Build (and if large, group) the channel tensors of one realization."""
    layout = build_layout(config)
    paths = sample_paths(config, realization)
    seed = realization_seed(config.master_seed, realization)
    if far_field:
        tensors = build_far_field_tensors(paths, layout, seed=seed)
    else:
        tensors = build_tensors(paths, layout, seed=seed)
    if config.eta == 1 and layout.n_elements > GROUPING_THRESHOLD:
        tensors = apply_grouping(tensors, column_grouping(layout))
    return tensors


def irpa_params_for(t_total: int) -> IrpaParams:
    t_j = max(0, (t_total - IRPA_T0) // (4 * IRPA_MAX_ROUNDS))
    return IrpaParams(T0=min(IRPA_T0, t_total), T_j=t_j, max_rounds=IRPA_MAX_ROUNDS)


def run_algorithm(
    algorithm: str,
    config: SimConfig,
    tensors,
    realization: int,
    t_total: int = 1000,
    sr_params: SrParams | None = None,
) -> tuple[float, int, int, np.ndarray | None, OptimizerTrace | None]:
    """Run one optimizer; returns (rate, oracle_queries, iterations, theta, trace)."""
    params = RateParams.from_config(config)
    rng = substream(config.master_seed, "alg", realization, algorithm)
    if algorithm == "none":
        return sum_rate(tensors.direct, params), 0, 0, None, None
    if algorithm == "sr":
        theta, trace = successive_refinement(tensors, params, sr_params or SrParams(), rng)
        return trace.final_rate, 0, trace.iterations, theta, trace
    oracle = make_oracle(tensors, params)
    if algorithm == "rpa":
        theta, trace = rpa(oracle, t_total, rng)
    elif algorithm == "irpa":
        theta, trace = irpa(oracle, irpa_params_for(t_total), rng)
    elif algorithm == "dft":
        theta, trace = dft_codebook_search(oracle)
    else:
        raise ConfigError(f"unknown algorithm {algorithm!r}")
    return trace.final_rate, oracle.query_count, trace.iterations, theta, trace


def run_simulate(
    config: SimConfig,
    algorithm: str,
    realizations: int,
    t_total: int = 1000,
    sr_params: SrParams | None = None,
):
    """One algorithm over R realizations; returns (rows, first-realization trace)."""
    rows, first_trace = [], None
    for r in range(realizations):
        tensors = realization_tensors(config, r)
        rate, queries, iters, _, trace = run_algorithm(
            algorithm, config, tensors, r, t_total=t_total, sr_params=sr_params
        )
        if r == 0:
            first_trace = trace
        rows.append(
            ResultRow(
                experiment="simulate",
                realization=r,
                seed=realization_seed(config.master_seed, r),
                algorithm=algorithm,
                param_name="t_total" if algorithm in ("rpa", "irpa") else "-",
                param_value=t_total if algorithm in ("rpa", "irpa") else "-",
                sum_rate_bps_hz=rate,
                oracle_queries=queries,
                iterations=iters,
            )
        )
    return rows, first_trace


def run_convergence(config: SimConfig, realizations: int, sr_params: SrParams | None = None):
    """Per-iteration traces of the perfect-CSI design over all realizations."""
    traces = []
    for r in range(realizations):
        tensors = realization_tensors(config, r)
        _, _, _, _, trace = run_algorithm("sr", config, tensors, r, sr_params=sr_params)
        traces.append(trace)
    depth = max(len(t.rates) for t in traces)
    padded = np.array([t.rates + [t.rates[-1]] * (depth - len(t.rates)) for t in traces])
    return {
        "mean_rates": padded.mean(axis=0),
        "single": traces[0],
        "traces": traces,
    }


def _config_for_n_elements(config: SimConfig, n_total: int) -> SimConfig:
    per_surface = n_total // 4
    if n_total % 4 or per_surface % config.N_j2:
        raise ConfigError(
            f"n_elements={n_total} must equal 4 * N_j1 * N_j2 with N_j2={config.N_j2}"
        )
    return config.with_(N_j1=per_surface // config.N_j2)


SWEEP_PARAMS = ("n_elements", "t_total", "theta_tilt", "eta")


def run_sweep(config: SimConfig, param: str, values, realizations: int):
    """One ResultRow per (realization, algorithm, swept value)."""
    if param not in SWEEP_PARAMS:
        raise ConfigError(f"unknown sweep parameter {param!r}")
    if not values:
        raise ConfigError("sweep needs at least one value")
    rows = []
    for r in range(realizations):
        seed = realization_seed(config.master_seed, r)
        if param == "t_total":
            tensors = realization_tensors(config, r)
            cached = {
                name: run_algorithm(name, config, tensors, r)
                for name in ("sr", "dft")
            }
            for value in values:
                t_total = int(value)
                for name in ("sr", "irpa", "rpa", "dft"):
                    if name in cached:
                        rate, queries, iters, _, _ = cached[name]
                    else:
                        rate, queries, iters, _, _ = _run_budgeted(
                            name, config, tensors, r, t_total
                        )
                    rows.append(
                        ResultRow(
                            "sweep", r, seed, name, param, t_total, rate, queries, iters
                        )
                    )
        else:
            for value in values:
                if param == "n_elements":
                    cfg = _config_for_n_elements(config, int(value))
                    row_value = int(value)
                elif param == "theta_tilt":
                    cfg = config.with_(theta_tilt=float(value), sampling_mode="global-ground")
                    row_value = float(value)
                else:  # eta
                    cfg = config.with_(eta=int(value))
                    row_value = int(value)
                tensors = realization_tensors(cfg, r)
                rate, queries, iters, _, _ = run_algorithm("sr", cfg, tensors, r)
                rows.append(
                    ResultRow("sweep", r, seed, "sr", param, row_value, rate, queries, iters)
                )
    return rows


def _run_budgeted(name: str, config: SimConfig, tensors, realization: int, t_total: int):
    rng = substream(config.master_seed, "alg", realization, name, t_total)
    params = RateParams.from_config(config)
    oracle = make_oracle(tensors, params)
    if name == "rpa":
        _, trace = rpa(oracle, t_total, rng)
    else:
        _, trace = irpa(oracle, irpa_params_for(t_total), rng)
    return trace.final_rate, oracle.query_count, trace.iterations, None, trace


SETUPS = ("full", "single", "double", "none")


def run_compare(config: SimConfig, setups, realizations: int):
    """Ablation over {full, single-only, double-only, no-IRS} channel setups."""
    for setup in setups:
        if setup not in SETUPS:
            raise ConfigError(f"unknown setup {setup!r}")
    rows = []
    for r in range(realizations):
        seed = realization_seed(config.master_seed, r)
        tensors = realization_tensors(config, r)
        for setup in setups:
            masked = tensors.masked(setup)
            algorithm = "none" if setup == "none" else "sr"
            rate, queries, iters, _, _ = run_algorithm(algorithm, config, masked, r)
            rows.append(
                ResultRow("compare", r, seed, algorithm, "setup", setup, rate, queries, iters)
            )
    return rows


def run_mismatch(config: SimConfig, values, realizations: int):
    """Design on far-field tensors, evaluate on element-wise tensors, and compare."""
    if config.eta != 1:
        raise ConfigError("mismatch study requires eta = 1")
    params = RateParams.from_config(config)
    rows = []
    for r in range(realizations):
        seed = realization_seed(config.master_seed, r)
        for value in values:
            cfg = _config_for_n_elements(config, int(value))
            exact = realization_tensors(cfg, r)
            farfield = realization_tensors(cfg, r, far_field=True)
            rng_ff = substream(cfg.master_seed, "alg", r, "sr-farfield", int(value))
            theta_ff, trace_ff = successive_refinement(farfield, params, SrParams(), rng_ff)
            rate_ff = sum_rate(assemble_effective_channel(exact, theta_ff), params)
            rng_ew = substream(cfg.master_seed, "alg", r, "sr-elementwise", int(value))
            theta_ew, trace_ew = successive_refinement(exact, params, SrParams(), rng_ew)
            rate_ew = trace_ew.final_rate
            rows.append(
                ResultRow(
                    "mismatch", r, seed, "sr-farfield", "n_elements", int(value),
                    rate_ff, 0, trace_ff.iterations,
                )
            )
            rows.append(
                ResultRow(
                    "mismatch", r, seed, "sr-elementwise", "n_elements", int(value),
                    rate_ew, 0, trace_ew.iterations,
                )
            )
    return rows

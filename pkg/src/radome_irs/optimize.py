"""Passive reflection optimizers.

Perfect-CSI route: coordinate-wise successive refinement where each
coefficient solves a concave subproblem over the unit disk and is projected
back to the unit circle, with an accept-only-if-improved guard.  No-CSI
routes: random phase search (RPA), its per-surface iterative variant
(IRPA), and exhaustive DFT codebook search, all speaking to the tensors
only through a ChannelOracle.
"""

from __future__ import annotations

import itertools
import time
from dataclasses import dataclass, field

import numpy as np

from .channel import ChannelTensors, assemble_effective_channel, random_reflection_state
from .rate import ChannelOracle, RateParams, batched_gram_rate, sum_rate


@dataclass
class SrParams:
    T: int = 100  # random initializations
    eps1: float = 1e-5  # absolute sum-rate stop threshold
    max_sweeps: int = 100
    grid_points: int = 64
    phase_tol: float = 1e-10

    def __post_init__(self):
        if self.T < 1 or self.max_sweeps < 1 or self.eps1 <= 0:
            raise ValueError("T, max_sweeps >= 1 and eps1 > 0 required")


@dataclass
class IrpaParams:
    T0: int = 200  # initial random trials
    T_j: int = 50  # trials per surface group per round
    eps2: float = 1e-5
    max_rounds: int = 10

    def __post_init__(self):
        if self.T0 < 1 or self.max_rounds < 1 or self.T_j < 0 or self.eps2 <= 0:
            raise ValueError("invalid IRPA parameters")


@dataclass
class OptimizerTrace:
    """Accepted objective values per step plus bookkeeping."""

    rates: list[float] = field(default_factory=list)
    queries: list[int] = field(default_factory=list)
    iterations: int = 0
    wall_seconds: float = 0.0

    @property
    def final_rate(self) -> float:
        return self.rates[-1] if self.rates else 0.0

    @property
    def total_queries(self) -> int:
        return self.queries[-1] if self.queries else 0

    def write_csv(self, fh) -> None:
        fh.write("step,accepted_rate_bps_hz,oracle_queries\n")
        queries = self.queries or [0] * len(self.rates)
        for step, (rate, q) in enumerate(zip(self.rates, queries)):
            fh.write(f"{step},{rate:.12g},{q}\n")


# --- per-element subproblem -------------------------------------------------

class ElementAdjacency:
    """For each element, the pair rows it participates in and its partners."""

    def __init__(self, tensors: ChannelTensors):
        n = tensors.n_elements
        as_first = [[] for _ in range(n)]
        as_second = [[] for _ in range(n)]
        for p, (a, b) in enumerate(zip(tensors.pair_first, tensors.pair_second)):
            as_first[a].append(p)
            as_second[b].append(p)
        self.pairs_as_first = [np.array(v, dtype=int) for v in as_first]
        self.pairs_as_second = [np.array(v, dtype=int) for v in as_second]
        self.partner_when_first = [tensors.pair_second[v] for v in self.pairs_as_first]
        self.partner_when_second = [tensors.pair_first[v] for v in self.pairs_as_second]


def element_gain_vector(
    tensors: ChannelTensors,
    theta: np.ndarray,
    element: int,
    adjacency: ElementAdjacency | None = None,
) -> np.ndarray:
    """gamma_k: coefficient of theta[element] in the effective channels, (K, M)."""
    if adjacency is None:
        adjacency = ElementAdjacency(tensors)
    gamma = tensors.f[:, element, :].copy()
    p1 = adjacency.pairs_as_first[element]
    if len(p1):
        gamma += np.einsum("p,kpm->km", theta[adjacency.partner_when_first[element]], tensors.g[:, p1, :])
    p2 = adjacency.pairs_as_second[element]
    if len(p2):
        gamma += np.einsum("p,kpm->km", theta[adjacency.partner_when_second[element]], tensors.g[:, p2, :])
    return gamma


def compute_update_matrices(
    tensors: ChannelTensors,
    theta: np.ndarray,
    element: int,
    params: RateParams,
    channels: np.ndarray | None = None,
    adjacency: ElementAdjacency | None = None,
) -> tuple[np.ndarray, np.ndarray]:
    """Constant matrices (A, B) with R(v) = log2 det(A + v B + conj(v) B^H)."""
    if channels is None:
        channels = assemble_effective_channel(tensors, theta)
    gamma = element_gain_vector(tensors, theta, element, adjacency)
    c = channels - theta[element] * gamma  # (K, M)
    m = tensors.n_antennas
    a_mat = np.eye(m, dtype=complex) + params.snr * (c.T @ c.conj() + gamma.T @ gamma.conj())
    b_mat = params.snr * (gamma.T @ c.conj())
    return a_mat, b_mat


def _logdet2_psd(mats: np.ndarray) -> np.ndarray:
    chol = np.linalg.cholesky(mats)
    diag = np.real(np.diagonal(chol, axis1=-2, axis2=-1))
    return 2.0 * np.sum(np.log2(diag), axis=-1)


def _evaluator_from_matrices(a_mat: np.ndarray, b_mat: np.ndarray):
    bh = b_mat.conj().T

    def evaluate(thetas: np.ndarray) -> np.ndarray:
        thetas = np.atleast_1d(np.asarray(thetas, dtype=complex))
        mats = (
            a_mat[None, :, :]
            + thetas[:, None, None] * b_mat[None, :, :]
            + thetas.conj()[:, None, None] * bh[None, :, :]
        )
        return _logdet2_psd(mats)

    return evaluate


def _evaluator_low_rank(c: np.ndarray, gamma: np.ndarray, params: RateParams):
    def evaluate(thetas: np.ndarray) -> np.ndarray:
        thetas = np.atleast_1d(np.asarray(thetas, dtype=complex))
        stack = c[None, :, :] + thetas[:, None, None] * gamma[None, :, :]
        return batched_gram_rate(stack, params)

    return evaluate


def _maximize_on_circle(evaluate, grid_points: int, phase_tol: float):
    """Coarse phase grid followed by staged vectorized bracket refinement."""
    phases = np.linspace(0.0, 2 * np.pi, grid_points, endpoint=False)
    rates = evaluate(np.exp(1j * phases))
    best = int(np.argmax(rates))
    center = phases[best]
    span = 2 * np.pi / grid_points
    while span > phase_tol:
        local = center + np.linspace(-span, span, 17)
        local_rates = evaluate(np.exp(1j * local))
        center = local[int(np.argmax(local_rates))]
        span /= 8.0
    return np.exp(1j * center)


def _best_unit_modulus(evaluate, current: complex, grid_points: int, phase_tol: float):
    """Best of {current, refined circle search}; ties keep the current value."""
    candidates = np.array(
        [complex(current), complex(_maximize_on_circle(evaluate, grid_points, phase_tol))]
    )
    rates = evaluate(candidates)
    best = int(np.argmax(rates))
    return complex(candidates[best]), float(rates[best])


def solve_element_subproblem(
    a_mat: np.ndarray,
    b_mat: np.ndarray,
    current: complex,
    grid_points: int = 64,
    phase_tol: float = 1e-10,
) -> complex:
    """Unit-modulus maximizer of log2 det(A + v B + conj(v) B^H).

    Never returns a value with a lower objective than ``current``.
    """
    if not np.allclose(a_mat, a_mat.conj().T, atol=1e-8):
        raise ValueError("A must be Hermitian")
    evaluate = _evaluator_from_matrices(a_mat, b_mat)
    value, _ = _best_unit_modulus(evaluate, current, grid_points, phase_tol)
    return value


# --- perfect-CSI successive refinement --------------------------------------

def successive_refinement(
    tensors: ChannelTensors,
    params: RateParams,
    sr_params: SrParams | None = None,
    rng: np.random.Generator | None = None,
) -> tuple[np.ndarray, OptimizerTrace]:
    """Coordinate sweeps over all coefficients from the best random start."""
    sr = sr_params or SrParams()
    rng = rng if rng is not None else np.random.default_rng(0)
    start = time.perf_counter()
    n = tensors.n_elements

    best_theta, best_rate = None, -np.inf
    for _ in range(sr.T):
        cand = random_reflection_state(n, rng)
        rate = sum_rate(assemble_effective_channel(tensors, cand), params)
        if rate > best_rate:
            best_theta, best_rate = cand, rate
    theta = best_theta.copy()
    r_current = best_rate

    trace = OptimizerTrace(rates=[r_current], queries=[0])
    adjacency = ElementAdjacency(tensors)
    channels = assemble_effective_channel(tensors, theta)

    sweeps = 0
    for sweeps in range(1, sr.max_sweeps + 1):
        r_sweep_start = r_current
        for e in range(n):
            gamma = element_gain_vector(tensors, theta, e, adjacency)
            c = channels - theta[e] * gamma
            evaluate = _evaluator_low_rank(c, gamma, params)
            value, rate = _best_unit_modulus(evaluate, theta[e], sr.grid_points, sr.phase_tol)
            if rate >= r_current:
                channels = channels + (value - theta[e]) * gamma
                theta[e] = value
                r_current = rate
        trace.rates.append(r_current)
        trace.queries.append(0)
        if r_current - r_sweep_start < sr.eps1:
            break
    trace.iterations = sweeps
    trace.wall_seconds = time.perf_counter() - start
    return theta, trace


# --- no-CSI algorithms ------------------------------------------------------

def rpa(
    oracle: ChannelOracle,
    t_total: int,
    rng: np.random.Generator,
) -> tuple[np.ndarray, OptimizerTrace]:
    """Best of t_total independent uniform-phase states; exactly t_total queries."""
    if t_total < 1:
        raise ValueError("t_total must be >= 1")
    start = time.perf_counter()
    trace = OptimizerTrace()
    best_theta, best_rate = None, -np.inf
    for t in range(t_total):
        cand = random_reflection_state(oracle.n_elements, rng)
        rate = sum_rate(oracle.query(cand), oracle.params)
        if rate > best_rate:
            best_theta, best_rate = cand, rate
        trace.rates.append(best_rate)
        trace.queries.append(oracle.query_count)
    trace.iterations = t_total
    trace.wall_seconds = time.perf_counter() - start
    return best_theta, trace


def _surface_groups(oracle: ChannelOracle) -> list[np.ndarray]:
    """Coefficient groups updated together: surfaces, or whole modules if eta > 1."""
    modules = oracle.element_module
    key = oracle.element_surface if int(modules.max()) == 0 else modules
    return [np.nonzero(key == v)[0] for v in np.unique(key)]


def irpa(
    oracle: ChannelOracle,
    params: IrpaParams,
    rng: np.random.Generator,
) -> tuple[np.ndarray, OptimizerTrace]:
    """Round-robin RPA over surface groups with accept-if-improved updates."""
    start = time.perf_counter()
    trace = OptimizerTrace()
    n = oracle.n_elements
    groups = _surface_groups(oracle)

    best_theta, r_o = None, -np.inf
    for _ in range(params.T0):
        cand = random_reflection_state(n, rng)
        rate = sum_rate(oracle.query(cand), oracle.params)
        if rate > r_o:
            best_theta, r_o = cand, rate
    theta = best_theta.copy()
    trace.rates.append(r_o)
    trace.queries.append(oracle.query_count)

    rounds = 0
    for rounds in range(1, params.max_rounds + 1):
        r_round_start = r_o
        for group in groups:
            group_best, group_rate = None, -np.inf
            for _ in range(params.T_j):
                cand = theta.copy()
                cand[group] = random_reflection_state(len(group), rng)
                rate = sum_rate(oracle.query(cand), oracle.params)
                if rate > group_rate:
                    group_best, group_rate = cand, rate
            if group_best is not None and group_rate > r_o:
                theta, r_o = group_best, group_rate
            trace.rates.append(r_o)
            trace.queries.append(oracle.query_count)
        if r_o - r_round_start < params.eps2:
            break
    trace.iterations = rounds
    trace.wall_seconds = time.perf_counter() - start
    return theta, trace


def dft_codebook(n_rows: int, n_cols: int) -> np.ndarray:
    """All Kronecker products of DFT columns, shape (n_rows*n_cols,)^2."""
    d1 = np.exp(2j * np.pi * np.outer(np.arange(n_rows), np.arange(n_rows)) / n_rows)
    d2 = np.exp(2j * np.pi * np.outer(np.arange(n_cols), np.arange(n_cols)) / n_cols)
    words = [np.kron(d1[:, i1], d2[:, i2]) for i1 in range(n_rows) for i2 in range(n_cols)]
    return np.array(words)


def dft_codebook_search(oracle: ChannelOracle) -> tuple[np.ndarray, OptimizerTrace]:
    """Exhaustive joint search over the per-surface DFT codebooks."""
    start = time.perf_counter()
    trace = OptimizerTrace()
    books = [dft_codebook(rows, cols) for rows, cols in oracle.surface_shapes]
    slices = []
    offset = 0
    for rows, cols in oracle.surface_shapes:
        slices.append(slice(offset, offset + rows * cols))
        offset += rows * cols
    if offset != oracle.n_elements:
        raise ValueError("surface shapes do not cover the coefficient vector")

    best_theta, best_rate = None, -np.inf
    theta = np.empty(oracle.n_elements, dtype=complex)
    for choice in itertools.product(*[range(len(b)) for b in books]):
        for sl, book, idx in zip(slices, books, choice):
            theta[sl] = book[idx]
        rate = sum_rate(oracle.query(theta), oracle.params)
        if rate > best_rate:
            best_theta, best_rate = theta.copy(), rate
        trace.rates.append(best_rate)
        trace.queries.append(oracle.query_count)
    trace.iterations = len(trace.rates)
    trace.wall_seconds = time.perf_counter() - start
    return best_theta, trace

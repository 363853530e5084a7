import numpy as np
import pytest

from radome_irs import RateParams, make_oracle, random_reflection_state, sum_rate
from radome_irs.rate import batched_gram_rate

PARAMS = RateParams.from_dbm(30.0, -70.0)


def test_zero_channels_give_zero_rate():
    assert sum_rate(np.zeros((3, 16), dtype=complex), PARAMS) == 0.0


def test_scalar_channel_reduction():
    h = np.array([[np.sqrt(PARAMS.sigma2 / PARAMS.P)]], dtype=complex)
    assert sum_rate(h, PARAMS) == pytest.approx(1.0)


def test_single_user_matches_norm_formula(rng):
    h = rng.normal(size=(1, 16)) + 1j * rng.normal(size=(1, 16))
    expected = np.log2(1.0 + PARAMS.snr * np.linalg.norm(h) ** 2)
    assert sum_rate(h, PARAMS) == pytest.approx(expected, rel=1e-12)


def test_matches_dense_determinant(rng):
    h = rng.normal(size=(3, 8)) + 1j * rng.normal(size=(3, 8))
    h *= 1e-5
    dense = np.eye(8, dtype=complex) + PARAMS.snr * sum(
        np.outer(row, row.conj()) for row in h
    )
    expected = float(np.log2(np.linalg.det(dense).real))
    assert sum_rate(h, PARAMS) == pytest.approx(expected, rel=1e-9)


def test_user_permutation_invariance(rng):
    h = 1e-5 * (rng.normal(size=(4, 16)) + 1j * rng.normal(size=(4, 16)))
    shuffled = h[rng.permutation(4)]
    assert abs(sum_rate(h, PARAMS) - sum_rate(shuffled, PARAMS)) < 1e-9


def test_common_unitary_invariance(rng):
    h = 1e-5 * (rng.normal(size=(3, 8)) + 1j * rng.normal(size=(3, 8)))
    q, _ = np.linalg.qr(rng.normal(size=(8, 8)) + 1j * rng.normal(size=(8, 8)))
    assert abs(sum_rate(h, PARAMS) - sum_rate(h @ q, PARAMS)) < 1e-9


def test_batched_matches_scalar(rng):
    stack = 1e-5 * (rng.normal(size=(7, 3, 8)) + 1j * rng.normal(size=(7, 3, 8)))
    batch = batched_gram_rate(stack, PARAMS)
    singles = [sum_rate(h, PARAMS) for h in stack]
    assert np.allclose(batch, singles, rtol=1e-10)


def test_rejects_non_finite_channels():
    h = np.full((1, 4), np.nan, dtype=complex)
    with pytest.raises(ValueError):
        sum_rate(h, PARAMS)


def test_rate_params_validation():
    with pytest.raises(ValueError):
        RateParams(P=0.0, sigma2=1.0)
    with pytest.raises(ValueError):
        RateParams(P=1.0, sigma2=-1.0)


def test_oracle_counts_queries(default_tensors, rng):
    oracle = make_oracle(default_tensors, PARAMS)
    theta = random_reflection_state(oracle.n_elements, rng)
    h1 = oracle.query(theta)
    h2 = oracle.query(theta)
    assert np.array_equal(h1, h2)
    assert oracle.query_count == 2
    assert oracle.clone().query_count == 0


def test_oracle_of_zero_tensors_rates_zero(default_tensors, rng):
    zeros = default_tensors.masked("none")
    from dataclasses import replace

    silent = replace(zeros, direct=np.zeros_like(zeros.direct))
    oracle = make_oracle(silent, PARAMS)
    theta = random_reflection_state(oracle.n_elements, rng)
    assert oracle.rate_of(theta) == 0.0

"""Multi-user uplink sum-rate and the channel-oracle boundary."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .channel import ChannelTensors, assemble_effective_channel
from .config import SimConfig, dbm_to_watt


@dataclass(frozen=True)
class RateParams:
    """Per-user transmit power and per-antenna noise power, in watts."""

    P: float
    sigma2: float

    def __post_init__(self):
        if self.P <= 0 or self.sigma2 <= 0:
            raise ValueError("P and sigma2 must be > 0")

    @classmethod
    def from_dbm(cls, p_dbm: float, sigma2_dbm: float) -> "RateParams":
        return cls(dbm_to_watt(p_dbm), dbm_to_watt(sigma2_dbm))

    @classmethod
    def from_config(cls, config: SimConfig) -> "RateParams":
        return cls.from_dbm(config.P_dBm, config.sigma2_dBm)

    @property
    def snr(self) -> float:
        return self.P / self.sigma2


def sum_rate(channels: np.ndarray, params: RateParams) -> float:
    """log2 det(I_M + (P/sigma^2) sum_k h_k h_k^H) in bps/Hz.

    ``channels`` holds one user per row, shape (K, M).  The determinant is
    reduced to the K x K Gram form and evaluated through a Hermitian
    factorization; the Gram matrix is symmetrized first to scrub roundoff.
    """
    h = np.asarray(channels)
    if h.ndim == 1:
        h = h[None, :]
    if not np.all(np.isfinite(h)):
        raise ValueError("channel entries must be finite")
    gram = np.eye(h.shape[0], dtype=complex) + params.snr * (h.conj() @ h.T)
    gram = (gram + gram.conj().T) / 2.0
    try:
        chol = np.linalg.cholesky(gram)
        return float(2.0 * np.sum(np.log2(np.real(np.diagonal(chol)))))
    except np.linalg.LinAlgError:
        eigvals = np.clip(np.linalg.eigvalsh(gram), 1.0, None)
        return float(np.sum(np.log2(eigvals)))


def batched_gram_rate(channel_stack: np.ndarray, params: RateParams) -> np.ndarray:
    """sum_rate for a stack of channel matrices, shape (..., K, M)."""
    h = np.asarray(channel_stack)
    k = h.shape[-2]
    gram = np.eye(k, dtype=complex) + params.snr * np.einsum(
        "...km,...lm->...kl", h.conj(), h
    )
    gram = (gram + np.conj(np.swapaxes(gram, -1, -2))) / 2.0
    chol = np.linalg.cholesky(gram)
    diag = np.real(np.diagonal(chol, axis1=-2, axis2=-1))
    return 2.0 * np.sum(np.log2(diag), axis=-1)


class ChannelOracle:
    """Effective-channel access for no-CSI optimizers.

    Exposes only h_k(theta) for a trial reflection state; the underlying
    tensors never leak.  Each query increments a monotone counter.
    """

    def __init__(self, tensors: ChannelTensors, params: RateParams):
        self._tensors = tensors
        self.params = params
        self.query_count = 0

    @property
    def n_elements(self) -> int:
        return self._tensors.n_elements

    @property
    def element_surface(self) -> np.ndarray:
        return self._tensors.element_surface

    @property
    def element_module(self) -> np.ndarray:
        return self._tensors.element_module

    @property
    def surface_shapes(self):
        return self._tensors.surface_shapes

    def query(self, theta: np.ndarray) -> np.ndarray:
        self.query_count += 1
        return assemble_effective_channel(self._tensors, theta)

    def rate_of(self, theta: np.ndarray) -> float:
        """Convenience: sum-rate of one query (counts as one query)."""
        return sum_rate(self.query(theta), self.params)

    def clone(self) -> "ChannelOracle":
        """Fresh oracle over the same tensors with a zero counter."""
        return ChannelOracle(self._tensors, self.params)


def make_oracle(tensors: ChannelTensors, params: RateParams) -> ChannelOracle:
    return ChannelOracle(tensors, params)

"""Analytic quadrature weights and exact integration on the rotation group.

A band-limited signal integrates exactly from roughly a quarter of the
samples the full transform needs, because only the (0, 0, 0) coefficient is
wanted and aliasing in every higher coefficient is harmless.  The reduced
grid uses the primed nodes

    alpha'_a = 2*pi*a / M   (a < M),
    beta_b   = pi*(2b+1) / (2L-1)   (b < L),
    gamma'_g = 2*pi*g / N   (g < N),

with one real ring weight q(beta_b) combining the sin(beta) measure and the
periodic mirror of each ring.
"""

from __future__ import annotations

import math

import numpy as np

from .errors import NumericalIntegrityError
from .grid import BandLimits

_IMAG_TOL = 1e-12


def weight_w(m_prime: int) -> complex:
    """Closed form of int_0^pi sin(beta) exp(i m' beta) dbeta.

    2 at m' = 0, +-i*pi/2 at m' = +-1, 2/(1 - m'^2) for even m', zero for the
    remaining odd orders.
    """
    if m_prime == 0:
        return complex(2.0)
    if m_prime == 1:
        return complex(0.0, math.pi / 2.0)
    if m_prime == -1:
        return complex(0.0, -math.pi / 2.0)
    if m_prime % 2 == 0:
        return complex(2.0 / (1.0 - m_prime * m_prime))
    return complex(0.0)


def _w_sequence(lags: np.ndarray) -> np.ndarray:
    """Vectorised `weight_w` over an integer lag array."""
    lags = np.asarray(lags)
    out = np.zeros(lags.shape, dtype=np.complex128)
    even = lags % 2 == 0
    with np.errstate(divide="ignore"):
        out[even] = 2.0 / (1.0 - lags[even].astype(np.float64) ** 2)
    out[lags == 1] = 1j * math.pi / 2.0
    out[lags == -1] = -1j * math.pi / 2.0
    return out


def _v_all(L: int) -> np.ndarray:
    """v(beta_b) for every extended ring b in [0, 2L-2], via one inverse DFT.

    v(beta_b) = (1/(2L-1)) sum_{m'} w(-m') exp(i m' beta_b); the node offset
    pi/(2L-1) becomes a per-bin phase on the DFT input.
    """
    P = 2 * L - 1
    m = np.concatenate([np.arange(L), np.arange(-(L - 1), 0)])  # DFT bin order
    spectrum = _w_sequence(-m) * np.exp(1j * m * math.pi / P)
    v = np.fft.ifft(spectrum)  # ifft's 1/P is exactly the 1/(2L-1)
    residue = float(np.abs(v.imag).max())
    if residue > _IMAG_TOL:
        raise NumericalIntegrityError(
            f"imaginary residue {residue:.3e} in ring weights for L={L}"
        )
    return v.real


def weight_v(b: int, L: int) -> float:
    """Single-ring weight v(beta_b), valid for b in [0, 2L-2]."""
    if not 0 <= b <= 2 * L - 2:
        raise ValueError(f"ring index b={b} outside [0, {2 * L - 2}] for L={L}")
    return float(_v_all(L)[b])


def _q_all(L: int, M: int, N: int) -> np.ndarray:
    v = _v_all(L)
    q = v[:L].copy()
    # Fold the mirrored ring 2L-2-b back onto b; the beta = pi ring (b = L-1)
    # is its own mirror and is not doubled.
    q[: L - 1] += v[2 * L - 2 : L - 1 : -1]
    return q * (2.0 * math.pi) ** 2 / (M * N)


def weight_q(b: int, L: int, M: int, N: int) -> float:
    """Quadrature ring weight q(beta_b) for b in [0, L-1]."""
    if not 0 <= b <= L - 1:
        raise ValueError(f"ring index b={b} outside [0, {L - 1}] for L={L}")
    return float(_q_all(L, M, N)[b])


class QuadratureWeights:
    """Ring weights for the reduced integration grid of one band-limit triple.

    Immutable and shareable; `q[b]` weighs ring b, `w_cache` holds the
    analytic weights w(m') for |m'| <= 2L-2 (index m' + 2L-2).
    """

    def __init__(self, limits: BandLimits):
        self.limits = limits
        L, M, N = limits.L, limits.M, limits.N
        self.q = _q_all(L, M, N)
        lags = np.arange(-(2 * L - 2), 2 * L - 1)
        self.w_cache = _w_sequence(lags)
        self.q.flags.writeable = False
        self.w_cache.flags.writeable = False

    def grid_shape(self) -> tuple:
        """Reduced grid shape, axes (beta, alpha', gamma')."""
        return (self.limits.L, self.limits.M, self.limits.N)

    def node_count(self) -> int:
        """Theoretical count [(L-1)M + 1]N; the stored grid is L*M*N."""
        L, M, N = self.limits.L, self.limits.M, self.limits.N
        return ((L - 1) * M + 1) * N


def quadrature_nodes(limits: BandLimits) -> tuple:
    """Primed node arrays (beta_b, alpha'_a, gamma'_g) of the reduced grid."""
    L, M, N = limits.L, limits.M, limits.N
    betas = np.pi * (2 * np.arange(L) + 1) / (2 * L - 1)
    alphas = 2 * np.pi * np.arange(M) / M
    gammas = 2 * np.pi * np.arange(N) / N
    return betas, alphas, gammas


def integrate(values: np.ndarray, weights: QuadratureWeights) -> complex:
    """Integrate a signal sampled on the reduced quadrature grid.

    `values` must have shape (L, M, N) in (beta, alpha', gamma') order and
    hold samples at the primed nodes; the result is exact for any signal
    band-limited at the weights' (L, M, N).
    """
    values = np.asarray(values)
    if values.shape != weights.grid_shape():
        raise ValueError(
            f"quadrature grid shape {values.shape} does not match "
            f"{weights.grid_shape()} for limits {weights.limits}"
        )
    ring_sums = values.sum(axis=(1, 2))
    return complex(np.dot(weights.q, ring_sums))

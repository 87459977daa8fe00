"""Forward and inverse Wigner transforms on the rotation group.

Three routes compute the same exact transform:

* a three-dimensional separation-of-variables path working on the full
  Fourier cube F[m', m, n],
* a per-n path that peels off the gamma axis with an FFT and runs one
  spin-weighted spherical transform per n (cheaper when N << L),
* naive direct summation of the defining integrals, O(L^6), kept as a
  correctness oracle.

FFT frequency layout (the one place this is defined): every transformed axis
of odd length P = 2K-1 is kept in natural DFT bin order, bin k holding
integer frequency k for k < K and k - P otherwise; `_freq` returns that map
and `np.fft.fftshift` converts bins to a centred axis where index i holds
frequency i - (K-1).  The beta axis carries the extra node phase
exp(+-i m' pi / (2L-1)) because beta_b = pi(2b+1)/(2L-1) starts half a step
from zero.

The forward DFT is unnormalised and every analytic factor -- (2 pi)^2 over
the ring FFT, 1/(2L-1) over the beta FFT, the (2l+1)/(8 pi^2) inverse weight
-- is applied at the step that introduces it, so intermediate arrays hold the
continuous-integral quantities they are named after.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from functools import lru_cache

import numpy as np

from .errors import NumericalIntegrityError
from .grid import BandLimits, So3Samples, WignerCoeffs, real_coeff_count
from .quadrature import QuadratureWeights, _w_sequence, integrate, quadrature_nodes
from .wigner_d import DBetaPlane, DeltaTable, d_recursion_step, d_via_fourier, \
    ipow, iter_delta_planes

WEIGHT_VARIANTS = ("aliased", "exact")
PATHS = ("auto", "3d", "per-n", "naive")

# Above this L a full half-pi table would hold O(L^3) doubles; fall back to
# on-the-fly planes unless the caller supplies a table.
_DELTA_TABLE_MAX_L = 1024

_NAIVE_SOFT_CAP = 32


def _readonly(arr: np.ndarray) -> np.ndarray:
    arr.flags.writeable = False
    return arr


@lru_cache(maxsize=256)
def _freq(P: int) -> np.ndarray:
    """Integer frequency per DFT bin for an odd length P = 2K-1."""
    K = (P + 1) // 2
    return _readonly(np.concatenate([np.arange(K), np.arange(-(P - K), 0)]))


def _parity(freqs: np.ndarray) -> np.ndarray:
    return np.where(freqs % 2 == 0, 1.0, -1.0)


@lru_cache(maxsize=256)
def _bin_parity(P: int, offset_odd: bool) -> np.ndarray:
    """(-1)^(freq + offset) over the DFT bins of an odd length P."""
    parity = _parity(_freq(P) + (1 if offset_odd else 0))
    return _readonly(parity)


@lru_cache(maxsize=256)
def _centred_gather(P: int, modulus: int) -> np.ndarray:
    """Bin indices that reorder frequencies ascending: arange centred mod P."""
    K = (P + 1) // 2
    return _readonly(np.arange(-(K - 1), K) % modulus)


@lru_cache(maxsize=4096)
def _mn_phase(m_l: int, n_lo: int, n_l: int) -> np.ndarray:
    """i^(m - n) over one coefficient block, indexed [n - n_lo, m + m_l]."""
    m_idx = np.arange(-m_l, m_l + 1)
    n_idx = np.arange(n_lo, n_l + 1)
    return _readonly(ipow(m_idx[None, :] - n_idx[:, None]))


def _resolve_path(path: str, limits: BandLimits) -> str:
    if path not in PATHS:
        raise ValueError(f"path must be one of {PATHS}, got {path!r}")
    if path != "auto":
        return path
    # The per-n factorisation wins when the directional band-limit is small.
    return "per-n" if limits.N <= limits.L // 4 else "3d"


def _check_weight_variant(variant: str) -> str:
    if variant not in WEIGHT_VARIANTS:
        raise ValueError(
            f"weight_variant must be one of {WEIGHT_VARIANTS}, got {variant!r}"
        )
    return variant


def _delta_planes(limits: BandLimits, delta: DeltaTable):
    if delta is None:
        return iter_delta_planes(limits.L, None)
    if delta.ell_max < limits.L:
        raise ValueError(
            f"half-pi table covers ell < {delta.ell_max}, transform needs {limits.L}"
        )
    return enumerate(delta.planes_through(limits.L))


# ---------------------------------------------------------------------------
# Weight application: turn DFT coefficients of the periodically extended
# rings into integrals against sin(beta) over [0, pi].
# ---------------------------------------------------------------------------

def _fast_fft_len(n: int) -> int:
    """Smallest 5-smooth integer >= n (friendly FFT length)."""
    best = 1 << (n - 1).bit_length()
    p5 = 1
    while p5 <= best:
        p35 = p5
        while p35 <= best:
            k = p35
            while k < n:
                k <<= 1
            best = min(best, k)
            p35 *= 3
        p5 *= 5
    return best


class _Scratch(dict):
    """Reusable buffers for one transform call.

    A workspace belongs to a single top-level call (never shared between
    calls or threads); reusing buffers across the per-n sub-transforms keeps
    large FFT inputs on warm pages instead of freshly mapped memory.
    """

    def cbuf(self, name: str, shape) -> np.ndarray:
        arr = self.get(name)
        if arr is None or arr.shape != shape:
            arr = np.empty(shape, dtype=np.complex128)
            self[name] = arr
        return arr

    def rbuf(self, name: str, shape) -> np.ndarray:
        arr = self.get(name)
        if arr is None or arr.shape != shape:
            arr = np.empty(shape, dtype=np.float64)
            self[name] = arr
        return arr


@lru_cache(maxsize=64)
def _weight_kernel_fft(L: int) -> np.ndarray:
    """FFT of the analytic-weight sequence on the padded circular grid."""
    P4 = _fast_fft_len(4 * L - 3)
    lags = np.arange(-(2 * L - 2), 2 * L - 1)
    spectrum = np.zeros(P4, dtype=np.complex128)
    spectrum[lags % P4] = _w_sequence(-lags)
    kernel = np.fft.fft(spectrum)
    kernel.flags.writeable = False
    return kernel


def _apply_weights_aliased(Ft: np.ndarray, L: int, scratch: _Scratch,
                           centred_rows: bool) -> np.ndarray:
    """Circular weight convolution on a grid of at least 4L-3 points.

    The linear convolution of the ring spectrum (support 2L-1) with the
    analytic weights (support 4L-3) spreads to |m'| <= 3L-3; a circular
    length P >= 4L-3 folds alias copies only onto |m'| > L-1, so every
    in-band output coefficient is exact while the out-of-band ones are
    left aliased and discarded.  P is rounded up to an FFT-friendly size.
    """
    P = 2 * L - 1
    P4 = _fast_fft_len(4 * L - 3)
    padded = scratch.cbuf("weights_padded", (P4,) + Ft.shape[1:])
    padded[:] = 0.0
    src = _freq(P) % P4
    padded[src] = Ft
    kernel = _weight_kernel_fft(L)
    spread = np.fft.fft(padded, axis=0)
    spread *= kernel.reshape((P4,) + (1,) * (Ft.ndim - 1))
    folded = np.fft.ifft(spread, axis=0)
    return folded[_centred_gather(P, P4) if centred_rows else src]


def _apply_weights_exact(Ft: np.ndarray, L: int,
                         centred_rows: bool) -> np.ndarray:
    """Direct Toeplitz form of the weight convolution (validation route)."""
    P = 2 * L - 1
    order = np.argsort(_freq(P))  # bins -> ascending frequency
    centred = Ft[order]
    idx = np.arange(-(L - 1), L)
    W = _w_sequence(idx[None, :] - idx[:, None])  # W[m', m''] = w(m'' - m')
    out_centred = np.tensordot(W, centred, axes=([1], [0]))
    if centred_rows:
        return out_centred
    out = np.empty_like(out_centred)
    out[order] = out_centred
    return out


def _apply_weights(Ft: np.ndarray, L: int, variant: str, scratch: _Scratch,
                   centred_rows: bool = False) -> np.ndarray:
    if variant == "aliased":
        return _apply_weights_aliased(Ft, L, scratch, centred_rows)
    return _apply_weights_exact(Ft, L, centred_rows)


# ---------------------------------------------------------------------------
# Shared beta-axis machinery.
# ---------------------------------------------------------------------------

@lru_cache(maxsize=256)
def _beta_phase(L: int, sign: int) -> np.ndarray:
    P = 2 * L - 1
    return _readonly(np.exp(sign * 1j * _freq(P) * math.pi / P))


def _rings_to_integrals(rings: np.ndarray, L: int, parity: np.ndarray,
                        variant: str, scratch: _Scratch = None,
                        centred_rows: bool = False) -> np.ndarray:
    """From per-ring values G(beta_b), b < L, to H_{m'} = the sin-weighted
    Fourier integrals of G over [0, pi], for all |m'| <= L-1 (bin order, or
    ascending m' when `centred_rows`).

    `parity` carries (-1)^(m+n) per trailing index and mirrors each ring onto
    beta in (pi, 2 pi); the beta = pi ring is its own mirror.
    """
    if scratch is None:
        scratch = _Scratch()
    P = 2 * L - 1
    extended = scratch.cbuf("beta_extended", (P,) + rings.shape[1:])
    extended[:L] = rings
    if L > 1:
        np.multiply(parity, rings[L - 2 :: -1], out=extended[L:])
    Ft = np.fft.fft(extended, axis=0) / P
    Ft *= _beta_phase(L, -1).reshape((P,) + (1,) * (rings.ndim - 1))
    return _apply_weights(Ft, L, variant, scratch, centred_rows)


def _spectrum_to_rings(F: np.ndarray, L: int,
                       scratch: _Scratch = None) -> np.ndarray:
    """Evaluate sum_{m'} F_{m'} exp(i m' beta_b) on the kept rings b < L."""
    if scratch is None:
        scratch = _Scratch()
    P = 2 * L - 1
    X = np.multiply(F, _beta_phase(L, +1).reshape((P,) + (1,) * (F.ndim - 1)),
                    out=scratch.cbuf("beta_spectrum", F.shape))
    return np.fft.ifft(X, axis=0, norm="forward")[:L]


# ---------------------------------------------------------------------------
# Degree summation against the half-pi planes.
# ---------------------------------------------------------------------------

def _coeff_blocks(limits: BandLimits, reality: str):
    """(ell, m_l, n_lo, n_l, start) for every stored coefficient block."""
    start = 0
    for ell in range(limits.L):
        m_l = min(ell, limits.M - 1)
        n_l = min(ell, limits.N - 1)
        n_lo = 0 if reality == "real" else -n_l
        yield ell, m_l, n_lo, n_l, start
        start += (2 * m_l + 1) * (n_l - n_lo + 1)


def _delta_sum_forward(H: np.ndarray, limits: BandLimits, delta: DeltaTable,
                       reality: str) -> np.ndarray:
    """Contract the weighted cube H[m', m, n] (centred m', m axes; n axis
    centred, or the n >= 0 half for real input) into flat coefficients."""
    L, M, N = limits.L, limits.M, limits.N
    size = sum(
        (2 * m_l + 1) * (n_l - n_lo + 1)
        for _, m_l, n_lo, n_l, _ in _coeff_blocks(limits, reality)
    )
    out = np.empty(size, dtype=np.complex128)
    blocks = list(_coeff_blocks(limits, reality))
    planes = _delta_planes(limits, delta)
    # complex cube seen as trailing re/im pairs keeps the einsum all-real
    Hv = np.ascontiguousarray(H).view(np.float64).reshape(H.shape + (2,))
    for (ell, plane), (ell2, m_l, n_lo, n_l, start) in zip(planes, blocks):
        Dm = plane[:, ell - m_l : ell + m_l + 1]
        if reality == "real":
            Dn = plane[:, ell : ell + n_l + 1]
            Hs = Hv[L - 1 - ell : L + ell, M - 1 - m_l : M + m_l, : n_l + 1]
        else:
            Dn = plane[:, ell - n_l : ell + n_l + 1]
            Hs = Hv[L - 1 - ell : L + ell, M - 1 - m_l : M + m_l,
                    N - 1 - n_l : N + n_l]
        block = np.einsum("am,an,amnc->nmc", Dm, Dn, Hs).view(np.complex128)[..., 0]
        block *= _mn_phase(m_l, n_lo, n_l)
        out[start : start + block.size] = block.ravel()
    return out


def _delta_sum_inverse(coeffs: WignerCoeffs, delta: DeltaTable) -> np.ndarray:
    """Assemble the Fourier cube F[m', m, n] (centred axes; n >= 0 half for
    real coefficients) from flat coefficients."""
    limits = coeffs.limits
    L, M, N = limits.L, limits.M, limits.N
    n_size = N if coeffs.reality == "real" else 2 * N - 1
    F = np.zeros((2 * L - 1, 2 * M - 1, n_size), dtype=np.complex128)
    planes = _delta_planes(limits, delta)
    for (ell, plane), (_, m_l, n_lo, n_l, start) in zip(
        planes, _coeff_blocks(limits, coeffs.reality)
    ):
        count = (2 * m_l + 1) * (n_l - n_lo + 1)
        block = coeffs.data[start : start + count].reshape(
            n_l - n_lo + 1, 2 * m_l + 1
        )
        scaled = block * np.conj(_mn_phase(m_l, n_lo, n_l))
        scaled *= (2 * ell + 1) / (8.0 * math.pi**2)
        Dm = plane[:, ell - m_l : ell + m_l + 1]
        if coeffs.reality == "real":
            Dn = plane[:, ell : ell + n_l + 1]
            target = F[L - 1 - ell : L + ell, M - 1 - m_l : M + m_l, : n_l + 1]
        else:
            Dn = plane[:, ell - n_l : ell + n_l + 1]
            target = F[L - 1 - ell : L + ell, M - 1 - m_l : M + m_l,
                       N - 1 - n_l : N + n_l]
        # all-real einsum over trailing re/im pairs; planes stay uncast
        sv = np.ascontiguousarray(scaled).view(np.float64).reshape(
            scaled.shape + (2,))
        target += np.einsum("am,an,nmc->amnc", Dm, Dn, sv).view(np.complex128)[..., 0]
    return F


# ---------------------------------------------------------------------------
# Three-dimensional separation-of-variables path.
# ---------------------------------------------------------------------------

def _forward_3d(f: So3Samples, delta: DeltaTable, variant: str) -> np.ndarray:
    limits = f.limits
    L, M, N = limits.L, limits.M, limits.N
    Pa, Pg = 2 * M - 1, 2 * N - 1
    scale = (2.0 * math.pi) ** 2 / (Pa * Pg)

    if f.reality == "real":
        G = np.fft.rfft(f.values, axis=2)  # n = 0 .. N-1
        G = np.fft.fft(G, axis=1) * scale
        parity_n = _parity(np.arange(N))
    else:
        G = np.fft.fft(np.fft.fft(f.values, axis=2), axis=1) * scale
        parity_n = _parity(_freq(Pg))
    parity = _parity(_freq(Pa))[:, None] * parity_n[None, :]

    H = _rings_to_integrals(G, L, parity, variant, _Scratch(),
                            centred_rows=True)
    H = np.fft.fftshift(H, axes=1)
    if f.reality != "real":
        H = np.fft.fftshift(H, axes=2)
    return _delta_sum_forward(H, limits, delta, f.reality)


def _inverse_3d(coeffs: WignerCoeffs, delta: DeltaTable) -> np.ndarray:
    limits = coeffs.limits
    L, M, N = limits.L, limits.M, limits.N
    F = _delta_sum_inverse(coeffs, delta)
    F = np.fft.ifftshift(F, axes=(0, 1))
    if coeffs.reality != "real":
        F = np.fft.ifftshift(F, axes=2)
    vals = _spectrum_to_rings(F, L, _Scratch())
    vals = np.fft.ifft(vals, axis=1, norm="forward")
    if coeffs.reality == "real":
        return np.fft.irfft(vals, 2 * N - 1, axis=2, norm="forward")
    return np.fft.ifft(vals, axis=2, norm="forward")


# ---------------------------------------------------------------------------
# Spin-weighted spherical transforms and the per-n path.
# ---------------------------------------------------------------------------

@lru_cache(maxsize=256)
def _spin_norm(L: int, M: int, spin: int) -> np.ndarray:
    """(-1)^s sqrt((2l+1)/4pi) i^(m+s) over the (ell, m) coefficient grid."""
    sign_s = -1.0 if spin % 2 else 1.0
    scale = sign_s * np.sqrt((2 * np.arange(L) + 1) / (4.0 * math.pi))
    norm = scale[:, None] * ipow(np.arange(-(M - 1), M) + spin)[None, :]
    norm.flags.writeable = False
    return norm


def _spin_analysis(g: np.ndarray, L: int, M: int, spin: int,
                   delta: DeltaTable, variant: str,
                   scratch: _Scratch) -> np.ndarray:
    Pa = 2 * M - 1
    Gm = np.fft.fft(g, axis=1) * (2.0 * math.pi / Pa)
    parity = _bin_parity(Pa, bool(spin % 2))
    H = _rings_to_integrals(Gm, L, parity[None, :], variant, scratch,
                            centred_rows=True)
    H = H[:, _centred_gather(Pa, Pa)]  # centre the m axis too

    glm = np.zeros((L, 2 * M - 1), dtype=np.complex128)
    glm_v = glm.view(np.float64).reshape(L, 2 * M - 1, 2)
    Hv = np.ascontiguousarray(H).view(np.float64).reshape(H.shape + (2,))
    Kbuf = scratch.rbuf("plane_product", (2 * L - 1, 2 * M - 1))
    for ell, plane in _delta_planes(BandLimits(L, M, 1), delta):
        if ell < abs(spin):
            continue
        m_l = min(ell, M - 1)
        K = np.multiply(plane[:, ell - m_l : ell + m_l + 1],
                        plane[:, ell - spin, None],
                        out=Kbuf[: 2 * ell + 1, : 2 * m_l + 1])
        sl = slice(M - 1 - m_l, M + m_l)
        np.einsum("am,amc->mc", K, Hv[L - 1 - ell : L + ell, sl],
                  out=glm_v[ell, sl])
    # the normalisation is separable per (ell, m): apply it in one pass
    glm *= _spin_norm(L, M, spin)
    return glm


def _spin_synthesis(glm: np.ndarray, L: int, M: int, spin: int,
                    delta: DeltaTable, scratch: _Scratch) -> np.ndarray:
    F = np.zeros((2 * L - 1, 2 * M - 1), dtype=np.complex128)
    scaled = glm * np.conj(_spin_norm(L, M, spin))
    Kbuf = scratch.rbuf("plane_product", (2 * L - 1, 2 * M - 1))
    for ell, plane in _delta_planes(BandLimits(L, M, 1), delta):
        if ell < abs(spin):
            continue
        m_l = min(ell, M - 1)
        sl = slice(M - 1 - m_l, M + m_l)
        K = np.multiply(plane[:, ell - m_l : ell + m_l + 1],
                        plane[:, ell - spin, None],
                        out=Kbuf[: 2 * ell + 1, : 2 * m_l + 1])
        F[L - 1 - ell : L + ell, sl] += K * scaled[ell, sl][None, :]
    F = np.fft.ifftshift(F, axes=(0, 1))
    vals = _spectrum_to_rings(F, L, scratch)
    return np.fft.ifft(vals, axis=1, norm="forward")


def spin_sht_forward(g: np.ndarray, L: int, M: int, spin: int,
                     delta: DeltaTable = None,
                     weight_variant: str = "aliased") -> np.ndarray:
    """Spin-s spherical harmonic analysis on the (theta, phi) grid.

    `g` has shape (L, 2M-1) with theta_b = pi(2b+1)/(2L-1) rows and
    equiangular phi columns.  Returns coefficients glm[ell, m + M-1] such
    that glm = integral of g against the conjugate spin-s harmonic; entries
    with ell < |spin| or |m| > min(ell, M-1) are zero.
    """
    g = np.asarray(g)
    if g.shape != (L, 2 * M - 1):
        raise ValueError(f"spin transform expects shape {(L, 2 * M - 1)}, got {g.shape}")
    if abs(spin) >= L:
        raise ValueError(f"|spin|={abs(spin)} must be < L={L}")
    _check_weight_variant(weight_variant)
    return _spin_analysis(g, L, M, spin, delta, weight_variant, _Scratch())


def spin_sht_inverse(glm: np.ndarray, L: int, M: int, spin: int,
                     delta: DeltaTable = None) -> np.ndarray:
    """Spin-s spherical harmonic synthesis, adjoint layout of the analysis."""
    glm = np.asarray(glm, dtype=np.complex128)
    if glm.shape != (L, 2 * M - 1):
        raise ValueError(f"expected coefficients of shape {(L, 2 * M - 1)}, got {glm.shape}")
    if abs(spin) >= L:
        raise ValueError(f"|spin|={abs(spin)} must be < L={L}")
    return _spin_synthesis(glm, L, M, spin, delta, _Scratch())


def spin_sh_value(ell: int, m: int, s: int, theta: float, phi: float,
                  delta: DeltaTable) -> complex:
    """Pointwise spin-weighted spherical harmonic value."""
    if abs(m) > ell or abs(s) > ell:
        raise ValueError(f"orders (m={m}, s={s}) invalid for ell={ell}")
    d = d_via_fourier(ell, m, -s, theta, delta)
    sign = -1.0 if s % 2 else 1.0
    return complex(
        sign * math.sqrt((2 * ell + 1) / (4.0 * math.pi)) * np.exp(1j * m * phi) * d
    )


def _per_n_forward(f: So3Samples, delta: DeltaTable, variant: str,
                   parallel: bool) -> np.ndarray:
    limits = f.limits
    L, M, N = limits.L, limits.M, limits.N
    Pg = 2 * N - 1
    if f.reality == "real":
        fn = np.fft.rfft(f.values, axis=2) * (2.0 * math.pi / Pg)
        n_values = list(range(N))
        col = {n: n for n in n_values}
    else:
        fn = np.fft.fft(f.values, axis=2) * (2.0 * math.pi / Pg)
        n_values = list(range(-(N - 1), N))
        col = {n: n % Pg for n in n_values}

    out = np.zeros(
        real_coeff_count(limits) if f.reality == "real" else
        sum((2 * min(ell, M - 1) + 1) * (2 * min(ell, N - 1) + 1)
            for ell in range(L)),
        dtype=np.complex128,
    )
    blocks = list(_coeff_blocks(limits, f.reality))
    ell_scale = np.sqrt(4.0 * math.pi / (2 * np.arange(L) + 1))
    shared_scratch = None if parallel else _Scratch()

    def run(n):
        scratch = shared_scratch if shared_scratch is not None else _Scratch()
        glm = _spin_analysis(fn[:, :, col[n]], L, M, -n, delta, variant, scratch)
        glm *= np.where(n % 2, -1.0, 1.0) * ell_scale[:, None]
        for ell, m_l, n_lo, n_l, start in blocks:
            if abs(n) > n_l:
                continue
            offset = start + (n - n_lo) * (2 * m_l + 1)
            out[offset : offset + 2 * m_l + 1] = glm[ell, M - 1 - m_l : M + m_l]

    if parallel and len(n_values) > 1:
        with ThreadPoolExecutor() as pool:
            list(pool.map(run, n_values))
    else:
        for n in n_values:
            run(n)
    return out


def _per_n_inverse(coeffs: WignerCoeffs, delta: DeltaTable,
                   parallel: bool) -> np.ndarray:
    limits = coeffs.limits
    L, M, N = limits.L, limits.M, limits.N
    Pg = 2 * N - 1
    real = coeffs.reality == "real"
    n_values = list(range(N)) if real else list(range(-(N - 1), N))
    fn = np.zeros((L, 2 * M - 1, len(n_values)), dtype=np.complex128)
    blocks = list(_coeff_blocks(limits, coeffs.reality))
    ell_scale = np.sqrt((2 * np.arange(L) + 1) / (16.0 * math.pi**3))
    shared_scratch = None if parallel else _Scratch()

    def run(idx):
        n = n_values[idx]
        scratch = shared_scratch if shared_scratch is not None else _Scratch()
        glm = np.zeros((L, 2 * M - 1), dtype=np.complex128)
        sign_n = -1.0 if n % 2 else 1.0
        for ell, m_l, n_lo, n_l, start in blocks:
            if abs(n) > n_l:
                continue
            offset = start + (n - n_lo) * (2 * m_l + 1)
            glm[ell, M - 1 - m_l : M + m_l] = \
                coeffs.data[offset : offset + 2 * m_l + 1] * \
                (sign_n * ell_scale[ell])
        fn[:, :, idx] = _spin_synthesis(glm, L, M, -n, delta, scratch)

    if parallel and len(n_values) > 1:
        with ThreadPoolExecutor() as pool:
            list(pool.map(run, range(len(n_values))))
    else:
        for idx in range(len(n_values)):
            run(idx)

    if real:
        return np.fft.irfft(fn, Pg, axis=2, norm="forward")
    spectrum = np.zeros((L, 2 * M - 1, Pg), dtype=np.complex128)
    for idx, n in enumerate(n_values):
        spectrum[:, :, n % Pg] = fn[:, :, idx]
    return np.fft.ifft(spectrum, axis=2, norm="forward")


# ---------------------------------------------------------------------------
# Naive direct-summation oracles.
# ---------------------------------------------------------------------------

def _enforce_naive_cap(L: int, allow_large: bool) -> None:
    if L > _NAIVE_SOFT_CAP and not allow_large:
        raise ValueError(
            f"naive path is O(L^6) and capped at L <= {_NAIVE_SOFT_CAP}; "
            f"pass allow_large=True to override (got L={L})"
        )


def _flat_orders(limits: BandLimits):
    """Per-coefficient (ell, m, n) arrays aligned with complex flat storage."""
    ells, ms, ns = [], [], []
    for ell, m_l, n_lo, n_l, _ in _coeff_blocks(limits, "complex"):
        for n in range(n_lo, n_l + 1):
            for m in range(-m_l, m_l + 1):
                ells.append(ell)
                ms.append(m)
                ns.append(n)
    return np.array(ells), np.array(ms), np.array(ns)


def _ring_d_flat(limits: BandLimits, beta: float) -> np.ndarray:
    """d^l_{mn}(beta) for every coefficient triple, flat storage order."""
    plane = DBetaPlane(limits.L, beta)
    parts = []
    for ell, m_l, n_lo, n_l, _ in _coeff_blocks(limits, "complex"):
        d_recursion_step(plane, ell)
        vals = plane.values
        block = vals[ell - m_l : ell + m_l + 1, ell - n_l : ell + n_l + 1]
        # the recursion reuses its buffer in place, so copy out of the view
        parts.append(block.T.copy().ravel())  # (n, m) order matches storage
    return np.concatenate(parts)


def inverse_naive(fhat: WignerCoeffs, limits: BandLimits = None,
                  allow_large: bool = False) -> So3Samples:
    """Synthesise samples by direct evaluation of the Fourier series.

    Every node independently sums (2l+1)/(8 pi^2) f_{lmn} conj(D^l_{mn})
    over all coefficients: O(L^6), the oracle against which the fast paths
    are validated.
    """
    limits = _merge_limits(limits, fhat.limits)
    _enforce_naive_cap(limits.L, allow_large)
    L, M, N = limits.L, limits.M, limits.N
    fc = fhat if fhat.reality == "complex" else fhat.to_complex()
    ells, ms, ns = _flat_orders(limits)
    weighted = fc.data * (2 * ells + 1) / (8.0 * math.pi**2)

    alphas = 2 * np.pi * np.arange(2 * M - 1) / (2 * M - 1)
    gammas = 2 * np.pi * np.arange(2 * N - 1) / (2 * N - 1)
    # conj(D^l_{mn}) = e^{+i m alpha} d^l_{mn}(beta) e^{+i n gamma}
    Em = np.exp(1j * np.outer(alphas, ms))
    En = np.exp(1j * np.outer(gammas, ns))

    vals = np.empty((L, 2 * M - 1, 2 * N - 1), dtype=np.complex128)
    for b in range(L):
        beta = math.pi * (2 * b + 1) / (2 * L - 1)
        ring = weighted * _ring_d_flat(limits, beta)
        # every node of the ring sums over all coefficients independently
        vals[b] = np.einsum("c,ac,gc->ag", ring, Em, En)
    if fhat.reality == "real":
        return So3Samples(limits, "real", vals.real)
    return So3Samples(limits, "complex", vals)


def forward_naive(f: So3Samples, limits: BandLimits = None,
                  allow_large: bool = False) -> WignerCoeffs:
    """Analyse samples by explicit quadrature of <f, conj(D^l_{mn})>.

    The integrand f * D^l_{mn} is band-limited at (2L-1, L+M-1, L+N-1), so
    it is integrated exactly on the quadrature grid of those limits; the
    needed off-grid values of f come from direct summation of its
    trigonometric interpolant.  Each coefficient costs a full pass over the
    fine grid: O(L^6) altogether.
    """
    limits = _merge_limits(limits, f.limits)
    _enforce_naive_cap(limits.L, allow_large)
    L, M, N = limits.L, limits.M, limits.N
    values = f.values.astype(np.complex128)

    # Trigonometric interpolant of f through the periodic beta extension,
    # assembled by direct summation (no FFTs on the oracle path).
    Pa, Pg, Pb = 2 * M - 1, 2 * N - 1, 2 * L - 1
    m_idx = np.arange(-(M - 1), M)
    n_idx = np.arange(-(N - 1), N)
    k_idx = np.arange(-(L - 1), L)
    alphas = 2 * np.pi * np.arange(Pa) / Pa
    gammas = 2 * np.pi * np.arange(Pg) / Pg
    betas = np.pi * (2 * np.arange(Pb) + 1) / Pb
    G = np.einsum(
        "bag,am,gn->bmn",
        values,
        np.exp(-1j * np.outer(alphas, m_idx)),
        np.exp(-1j * np.outer(gammas, n_idx)),
    ) / (Pa * Pg)
    parity = _parity(m_idx)[:, None] * _parity(n_idx)[None, :]
    ext = np.concatenate([G, parity[None] * G[L - 2 :: -1]], axis=0) if L > 1 else G
    Ft = np.einsum("bmn,bk->kmn", ext, np.exp(-1j * np.outer(betas, k_idx))) / Pb

    qlimits = BandLimits(2 * L - 1, L + M - 1, L + N - 1)
    qbetas, qalphas, qgammas = quadrature_nodes(qlimits)
    fine = np.einsum("kmn,kb->bmn", Ft, np.exp(1j * np.outer(k_idx, qbetas)))
    fine = np.einsum("bmn,am->ban", fine, np.exp(1j * np.outer(qalphas, m_idx)))
    fine = np.einsum("ban,gn->bag", fine, np.exp(1j * np.outer(qgammas, n_idx)))

    qw = QuadratureWeights(qlimits)
    weighted = fine * qw.q[:, None, None]

    # d^l planes on every fine ring, then one full-grid reduction per
    # coefficient: integrand samples times e^{-i m alpha} d^l_{mn} e^{-i n gamma}.
    fine_planes = []
    for beta in qbetas:
        plane = DBetaPlane(L, beta)
        planes = []
        for ell in range(L):
            d_recursion_step(plane, ell)
            planes.append(plane.values.copy())
        fine_planes.append(planes)

    Ema = np.exp(-1j * np.outer(qalphas, np.arange(-(M - 1), M)))  # [a, m]
    Eng = np.exp(-1j * np.outer(qgammas, np.arange(-(N - 1), N)))  # [g, n]
    out = WignerCoeffs.zeros(limits, "complex")
    for ell, m_l, n_lo, n_l, start in _coeff_blocks(limits, "complex"):
        stack = np.stack([fine_planes[b][ell] for b in range(qlimits.L)])
        Em_sub = Ema[:, M - 1 - m_l : M + m_l]
        index = start
        for n in range(n_lo, n_l + 1):
            # one full pass over the fine grid per coefficient (the m batch
            # below shares nothing: the einsum iterates grid x m)
            out.data[index : index + 2 * m_l + 1] = np.einsum(
                "bag,bm,am,g->m",
                weighted,
                stack[:, ell - m_l : ell + m_l + 1, n + ell],
                Em_sub,
                Eng[:, n + N - 1],
            )
            index += 2 * m_l + 1
    if f.reality == "real":
        return _fold_to_real(out)
    return out


# ---------------------------------------------------------------------------
# Public transforms.
# ---------------------------------------------------------------------------

def _merge_limits(limits: BandLimits, own: BandLimits) -> BandLimits:
    if limits is not None and limits != own:
        raise ValueError(f"band-limits {limits} do not match data limits {own}")
    return own


def _default_delta(limits: BandLimits, delta: DeltaTable):
    """Full table below the memory threshold, on-the-fly planes above."""
    if delta is not None:
        return delta
    if limits.L < _DELTA_TABLE_MAX_L:
        from .wigner_d import build_delta_table

        return build_delta_table(limits.L)
    return None


def _fold_to_real(coeffs: WignerCoeffs) -> WignerCoeffs:
    """Keep the n >= 0 half of complex coefficients as real-signal storage."""
    limits = coeffs.limits
    out = WignerCoeffs.zeros(limits, "real")
    pos = 0
    for ell, m_l, n_lo, n_l, start in _coeff_blocks(limits, "complex"):
        width = 2 * m_l + 1
        half = coeffs.data[start + n_l * width : start + (2 * n_l + 1) * width]
        out.data[pos : pos + half.size] = half
        pos += half.size
    return out


_REAL_SYMMETRY_TOL = 1e-10


def forward(f: So3Samples, limits: BandLimits = None, delta: DeltaTable = None,
            path: str = "auto", weight_variant: str = "aliased",
            parallel: bool = False) -> WignerCoeffs:
    """Forward Wigner transform: samples on the equiangular grid to exact
    coefficients of the band-limited signal.

    Real-flagged samples dispatch to the half-storage fast path.
    """
    limits = _merge_limits(limits, f.limits)
    _check_weight_variant(weight_variant)
    resolved = _resolve_path(path, limits)
    if resolved == "naive":
        return forward_naive(f, limits)
    delta = _default_delta(limits, delta)
    if resolved == "per-n":
        data = _per_n_forward(f, delta, weight_variant, parallel)
    else:
        data = _forward_3d(f, delta, weight_variant)
    reality = f.reality
    return WignerCoeffs(limits, reality, data)


def inverse(fhat: WignerCoeffs, limits: BandLimits = None,
            delta: DeltaTable = None, path: str = "auto",
            parallel: bool = False) -> So3Samples:
    """Inverse Wigner transform: coefficients to samples on the grid."""
    limits = _merge_limits(limits, fhat.limits)
    resolved = _resolve_path(path, limits)
    if resolved == "naive":
        return inverse_naive(fhat, limits)
    delta = _default_delta(limits, delta)
    if fhat.reality == "real":
        residual = _n0_symmetry_residual(fhat)
        if residual > _REAL_SYMMETRY_TOL:
            raise ValueError(
                f"real coefficients violate conjugate symmetry by {residual:.3e}"
            )
    if resolved == "per-n":
        vals = _per_n_inverse(fhat, delta, parallel)
    else:
        vals = _inverse_3d(fhat, delta)
    if fhat.reality == "real":
        return So3Samples(limits, "real", np.asarray(vals, dtype=np.float64))
    return So3Samples(limits, "complex", vals)


def _n0_symmetry_residual(fhat: WignerCoeffs) -> float:
    """Deviation of the stored n = 0 block from its internal symmetry."""
    worst = 0.0
    for ell, m_l, _, _, start in _coeff_blocks(fhat.limits, "real"):
        width = 2 * m_l + 1
        row = fhat.data[start : start + width]
        mirrored = np.conj(row[::-1]) * _parity(np.arange(-m_l, m_l + 1))
        worst = max(worst, float(np.abs(row - mirrored).max()))
    return worst


def forward_real(f: So3Samples, limits: BandLimits = None,
                 delta: DeltaTable = None, path: str = "auto",
                 weight_variant: str = "aliased",
                 parallel: bool = False) -> WignerCoeffs:
    """Forward transform of a real signal; stores only the n >= 0 half."""
    if f.reality != "real":
        raise ValueError("forward_real requires samples flagged real")
    return forward(f, limits, delta, path, weight_variant, parallel)


def inverse_real(fhat: WignerCoeffs, limits: BandLimits = None,
                 delta: DeltaTable = None, path: str = "auto",
                 parallel: bool = False) -> So3Samples:
    """Inverse transform onto real samples from conjugate-symmetric
    coefficients; complex-flagged input is validated then folded."""
    if fhat.reality == "complex":
        residual = fhat.symmetry_residual()
        if residual > _REAL_SYMMETRY_TOL:
            raise ValueError(
                f"coefficients violate conjugate symmetry by {residual:.3e}; "
                "not a real signal"
            )
        fhat = _fold_to_real(fhat)
    return inverse(fhat, limits, delta, path, parallel)


def forward_via_spin_sht(f: So3Samples, limits: BandLimits = None,
                         delta: DeltaTable = None,
                         weight_variant: str = "aliased",
                         parallel: bool = False) -> WignerCoeffs:
    """Forward transform through the per-n spin transform factorisation."""
    return forward(f, limits, delta, "per-n", weight_variant, parallel)


def inverse_via_spin_sht(fhat: WignerCoeffs, limits: BandLimits = None,
                         delta: DeltaTable = None,
                         parallel: bool = False) -> So3Samples:
    """Inverse transform through the per-n spin transform factorisation."""
    return inverse(fhat, limits, delta, "per-n", parallel)


# ---------------------------------------------------------------------------
# Resampling onto quadrature grids.
# ---------------------------------------------------------------------------

def evaluate_on_quadrature_grid(fhat: WignerCoeffs, qlimits: BandLimits = None,
                                delta: DeltaTable = None) -> np.ndarray:
    """Evaluate the band-limited signal on the reduced quadrature grid.

    The quadrature nodes are coarser in alpha and gamma than the sampling
    grid (orders fold harmlessly modulo M and N) and may belong to a larger
    band-limit `qlimits`; returns values of shape (qL, qM, qN).
    """
    limits = fhat.limits
    if qlimits is None:
        qlimits = limits
    if qlimits.L < limits.L:
        raise ValueError(f"quadrature band-limit {qlimits.L} below signal's {limits.L}")
    fc = fhat if fhat.reality == "complex" else fhat.to_complex()
    delta = _default_delta(limits, delta)
    F = _delta_sum_inverse(fc, delta)  # centred (m', m, n)

    L, M, N = limits.L, limits.M, limits.N
    qL, qM, qN = qlimits.L, qlimits.M, qlimits.N
    Pb = 2 * qL - 1

    big = np.zeros((Pb, qM, qN), dtype=np.complex128)
    mp = np.arange(-(L - 1), L) % Pb
    m_bins = np.arange(-(M - 1), M) % qM
    n_bins = np.arange(-(N - 1), N) % qN
    # alpha and gamma orders may collide modulo the coarse grid; accumulate.
    for i, mb in enumerate(m_bins):
        for j, nb in enumerate(n_bins):
            big[mp, mb, nb] += F[:, i, j]

    big *= np.exp(1j * _freq(Pb) * math.pi / Pb)[:, None, None]
    vals = np.fft.ifft(big, axis=0, norm="forward")[:qL]
    vals = np.fft.ifft(vals, axis=1, norm="forward")
    return np.fft.ifft(vals, axis=2, norm="forward")


def integrate_coeffs(fhat: WignerCoeffs, delta: DeltaTable = None) -> complex:
    """Integral of the band-limited signal: quadrature of its resampling."""
    qw = QuadratureWeights(fhat.limits)
    return integrate(evaluate_on_quadrature_grid(fhat, delta=delta), qw)


class TransformPlan:
    """Reusable transform state for one band-limit triple.

    Bundles the half-pi table (or the choice to recompute planes on the fly,
    which keeps memory at O(L^2) instead of O(L^3)) with the weight variant.
    Immutable once built and safe to share across threads; per-call scratch
    stays local to each call.
    """

    def __init__(self, limits: BandLimits, delta: DeltaTable = None,
                 on_the_fly: bool = None, weight_variant: str = "aliased"):
        self.limits = limits
        self.weight_variant = _check_weight_variant(weight_variant)
        if on_the_fly is None:
            on_the_fly = delta is None and limits.L >= _DELTA_TABLE_MAX_L
        if on_the_fly:
            self.delta = None
        else:
            self.delta = _default_delta(limits, delta)

    def forward(self, f: So3Samples, path: str = "auto",
                parallel: bool = False) -> WignerCoeffs:
        return forward(f, self.limits, self.delta, path,
                       self.weight_variant, parallel)

    def inverse(self, fhat: WignerCoeffs, path: str = "auto",
                parallel: bool = False) -> So3Samples:
        return inverse(fhat, self.limits, self.delta, path, parallel)

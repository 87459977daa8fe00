"""Band-limits, equiangular sampling nodes, index maps and file formats.

Conventions used throughout the package:

* Rotations are parameterised by zyz Euler angles (alpha, beta, gamma) with
  alpha, gamma in [0, 2*pi) and beta in [0, pi].
* A signal band-limited at (L, M, N) has coefficients f_{l,m,n} that vanish
  for l >= L, |m| >= M and |n| >= N, with 1 <= M <= L and 1 <= N <= L.
* Samples are stored on the regular (beta, alpha, gamma) grid of shape
  (L, 2M-1, 2N-1): beta index b outermost, gamma index g fastest.  The grid
  keeps the redundant alpha ring at beta = pi so strides stay FFT-friendly;
  `theorem_sample_count` reports the smaller theoretical count.
* Coefficients are stored l-major, then n, then m, negative orders offset:
  within the block for degree l, index = (n + n_l) * (2*m_l + 1) + (m + m_l)
  where m_l = min(l, M-1) and n_l = min(l, N-1).
* Real signals store only the n >= 0 coefficient half; the accessor
  reconstructs n < 0 entries through f_{l,m,n} = (-1)^(m+n) conj(f_{l,-m,-n}).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

REALITIES = ("complex", "real")

COEFF_MAGIC = "so3-coeffs"
SAMPLE_MAGIC = "so3-samples"
FORMAT_VERSION = "v1"


@dataclass(frozen=True)
class BandLimits:
    """Harmonic band-limit triple (L, M, N)."""

    L: int
    M: int
    N: int

    def __post_init__(self):
        for name, value in (("L", self.L), ("M", self.M), ("N", self.N)):
            if not isinstance(value, (int, np.integer)) or value < 1:
                raise ValueError(f"{name} must be a positive integer, got {value!r}")
        if self.M > self.L or self.N > self.L:
            raise ValueError(
                f"band-limits require M <= L and N <= L, got L={self.L} M={self.M} N={self.N}"
            )

    @classmethod
    def cubic(cls, L: int) -> "BandLimits":
        """Limits with M = N = L."""
        return cls(L, L, L)

    def sample_shape(self) -> tuple:
        """Stored sample grid shape, axes (beta, alpha, gamma)."""
        return (self.L, 2 * self.M - 1, 2 * self.N - 1)

    def m_count(self, ell: int) -> int:
        return 2 * min(ell, self.M - 1) + 1

    def n_count(self, ell: int) -> int:
        return 2 * min(ell, self.N - 1) + 1


def alpha_node(a: int, M: int) -> float:
    """Equiangular alpha sample 2*pi*a / (2M - 1) for a in [0, 2M-2]."""
    if not 0 <= a <= 2 * M - 2:
        raise ValueError(f"alpha index a={a} outside [0, {2 * M - 2}] for M={M}")
    return 2.0 * math.pi * a / (2 * M - 1)


def beta_node(b: int, L: int, extended: bool = False) -> float:
    """Equiangular beta sample pi*(2b + 1) / (2L - 1).

    The public grid has b in [0, L-1], covering (0, pi].  With
    ``extended=True`` indices up to 2L-2 are allowed, covering the periodic
    extension of beta onto (pi, 2*pi).
    """
    hi = 2 * L - 2 if extended else L - 1
    if not 0 <= b <= hi:
        raise ValueError(f"beta index b={b} outside [0, {hi}] for L={L}")
    return math.pi * (2 * b + 1) / (2 * L - 1)


def gamma_node(g: int, N: int) -> float:
    """Equiangular gamma sample 2*pi*g / (2N - 1) for g in [0, 2N-2]."""
    if not 0 <= g <= 2 * N - 2:
        raise ValueError(f"gamma index g={g} outside [0, {2 * N - 2}] for N={N}")
    return 2.0 * math.pi * g / (2 * N - 1)


def theorem_sample_count(limits: BandLimits) -> int:
    """Minimal number of samples capturing a band-limited signal.

    The beta = pi ring collapses to a single alpha value, hence
    [(L-1)(2M-1) + 1](2N-1) rather than the stored L(2M-1)(2N-1).
    """
    L, M, N = limits.L, limits.M, limits.N
    return ((L - 1) * (2 * M - 1) + 1) * (2 * N - 1)


def coeff_count(limits: BandLimits) -> int:
    """Number of complex coefficients in the band-limited index set."""
    return sum(limits.m_count(ell) * limits.n_count(ell) for ell in range(limits.L))


def _block_offsets(limits: BandLimits) -> np.ndarray:
    sizes = [limits.m_count(ell) * limits.n_count(ell) for ell in range(limits.L)]
    return np.concatenate([[0], np.cumsum(sizes)])


def _real_block_offsets(limits: BandLimits) -> np.ndarray:
    sizes = [
        limits.m_count(ell) * (min(ell, limits.N - 1) + 1) for ell in range(limits.L)
    ]
    return np.concatenate([[0], np.cumsum(sizes)])


def real_coeff_count(limits: BandLimits) -> int:
    """Stored length of the n >= 0 coefficient half used for real signals."""
    return int(_real_block_offsets(limits)[-1])


def _check_triple(ell: int, m: int, n: int, limits: BandLimits) -> None:
    if not 0 <= ell < limits.L:
        raise ValueError(f"degree ell={ell} outside [0, {limits.L - 1}]")
    if abs(m) > min(ell, limits.M - 1):
        raise ValueError(f"order m={m} invalid for ell={ell}, M={limits.M}")
    if abs(n) > min(ell, limits.N - 1):
        raise ValueError(f"order n={n} invalid for ell={ell}, N={limits.N}")


def coeff_index(ell: int, m: int, n: int, limits: BandLimits) -> int:
    """Flat storage index of coefficient (ell, m, n)."""
    _check_triple(ell, m, n, limits)
    m_l = min(ell, limits.M - 1)
    n_l = min(ell, limits.N - 1)
    base = int(_block_offsets(limits)[ell])
    return base + (n + n_l) * (2 * m_l + 1) + (m + m_l)


def coeff_unindex(index: int, limits: BandLimits) -> tuple:
    """Inverse of `coeff_index`: flat index -> (ell, m, n)."""
    offsets = _block_offsets(limits)
    if not 0 <= index < offsets[-1]:
        raise ValueError(f"coefficient index {index} outside [0, {offsets[-1] - 1}]")
    ell = int(np.searchsorted(offsets, index, side="right")) - 1
    m_l = min(ell, limits.M - 1)
    n_l = min(ell, limits.N - 1)
    rem = index - int(offsets[ell])
    n, m = divmod(rem, 2 * m_l + 1)
    return ell, m - m_l, n - n_l


def sample_index(a: int, b: int, g: int, limits: BandLimits) -> int:
    """Flat storage index of sample (alpha_a, beta_b, gamma_g); g fastest."""
    L, M, N = limits.L, limits.M, limits.N
    if not 0 <= a <= 2 * M - 2:
        raise ValueError(f"alpha index a={a} outside [0, {2 * M - 2}]")
    if not 0 <= b <= L - 1:
        raise ValueError(f"beta index b={b} outside [0, {L - 1}]")
    if not 0 <= g <= 2 * N - 2:
        raise ValueError(f"gamma index g={g} outside [0, {2 * N - 2}]")
    return (b * (2 * M - 1) + a) * (2 * N - 1) + g


def sample_unindex(index: int, limits: BandLimits) -> tuple:
    """Inverse of `sample_index`: flat index -> (a, b, g)."""
    L, M, N = limits.L, limits.M, limits.N
    total = L * (2 * M - 1) * (2 * N - 1)
    if not 0 <= index < total:
        raise ValueError(f"sample index {index} outside [0, {total - 1}]")
    rest, g = divmod(index, 2 * N - 1)
    b, a = divmod(rest, 2 * M - 1)
    return a, b, g


def _validate_reality(reality: str) -> str:
    if reality not in REALITIES:
        raise ValueError(f"reality must be one of {REALITIES}, got {reality!r}")
    return reality


@dataclass
class WignerCoeffs:
    """Flat array of Wigner coefficients over the band-limited index set.

    For ``reality == "real"`` only the n >= 0 half is stored; `get`
    reconstructs the remaining entries from conjugate symmetry.
    """

    limits: BandLimits
    reality: str
    data: np.ndarray = field(repr=False)

    def __post_init__(self):
        _validate_reality(self.reality)
        expected = (
            coeff_count(self.limits)
            if self.reality == "complex"
            else real_coeff_count(self.limits)
        )
        self.data = np.asarray(self.data, dtype=np.complex128)
        if self.data.shape != (expected,):
            raise ValueError(
                f"coefficient array has shape {self.data.shape}, expected ({expected},)"
            )

    @classmethod
    def zeros(cls, limits: BandLimits, reality: str = "complex") -> "WignerCoeffs":
        _validate_reality(reality)
        size = coeff_count(limits) if reality == "complex" else real_coeff_count(limits)
        return cls(limits, reality, np.zeros(size, dtype=np.complex128))

    def _real_index(self, ell: int, m: int, n: int) -> int:
        m_l = min(ell, self.limits.M - 1)
        base = int(_real_block_offsets(self.limits)[ell])
        return base + n * (2 * m_l + 1) + (m + m_l)

    def get(self, ell: int, m: int, n: int) -> complex:
        _check_triple(ell, m, n, self.limits)
        if self.reality == "complex":
            return complex(self.data[coeff_index(ell, m, n, self.limits)])
        if n >= 0:
            return complex(self.data[self._real_index(ell, m, n)])
        value = self.data[self._real_index(ell, -m, -n)]
        return complex((-1) ** (m + n) * np.conj(value))

    def set(self, ell: int, m: int, n: int, value: complex) -> None:
        _check_triple(ell, m, n, self.limits)
        if self.reality == "complex":
            self.data[coeff_index(ell, m, n, self.limits)] = value
        elif n >= 0:
            self.data[self._real_index(ell, m, n)] = value
        else:
            raise ValueError("real coefficients store only the n >= 0 half")

    def to_complex(self) -> "WignerCoeffs":
        """Expand to full complex storage (identity for complex input)."""
        if self.reality == "complex":
            return WignerCoeffs(self.limits, "complex", self.data.copy())
        out = WignerCoeffs.zeros(self.limits, "complex")
        for ell in range(self.limits.L):
            m_l = min(ell, self.limits.M - 1)
            n_l = min(ell, self.limits.N - 1)
            for n in range(-n_l, n_l + 1):
                for m in range(-m_l, m_l + 1):
                    out.set(ell, m, n, self.get(ell, m, n))
        return out

    def symmetry_residual(self) -> float:
        """Max deviation from f_{l,m,n} = (-1)^(m+n) conj(f_{l,-m,-n}).

        For real storage the cross-block symmetry holds by construction, so
        only the internal n = 0 constraint contributes.
        """
        worst = 0.0
        for ell in range(self.limits.L):
            m_l = min(ell, self.limits.M - 1)
            n_l = min(ell, self.limits.N - 1)
            n_lo = 0 if self.reality == "real" else -n_l
            for n in range(n_lo, n_l + 1):
                for m in range(-m_l, m_l + 1):
                    if self.reality == "real" and n == 0 and m < 0:
                        continue
                    lhs = self.get(ell, m, n)
                    rhs = (-1) ** (m + n) * np.conj(self.get(ell, -m, -n))
                    worst = max(worst, abs(lhs - rhs))
        return worst


@dataclass
class So3Samples:
    """Sample grid over (beta_b, alpha_a, gamma_g), shape (L, 2M-1, 2N-1)."""

    limits: BandLimits
    reality: str
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        _validate_reality(self.reality)
        dtype = np.float64 if self.reality == "real" else np.complex128
        self.values = np.ascontiguousarray(self.values, dtype=dtype)
        if self.values.shape != self.limits.sample_shape():
            raise ValueError(
                f"sample grid has shape {self.values.shape}, "
                f"expected {self.limits.sample_shape()}"
            )

    @classmethod
    def zeros(cls, limits: BandLimits, reality: str = "complex") -> "So3Samples":
        _validate_reality(reality)
        dtype = np.float64 if reality == "real" else np.complex128
        return cls(limits, reality, np.zeros(limits.sample_shape(), dtype=dtype))


def _fmt(x: float) -> str:
    return format(float(x), ".17g")


def write_coeffs(coeffs: WignerCoeffs, path) -> None:
    """Write coefficients as text: header then one `ell m n re im` row each."""
    limits = coeffs.limits
    lines = [
        f"{COEFF_MAGIC} {FORMAT_VERSION} {limits.L} {limits.M} {limits.N} {coeffs.reality}"
    ]
    index = 0
    for ell in range(limits.L):
        m_l = min(ell, limits.M - 1)
        n_l = min(ell, limits.N - 1)
        n_lo = 0 if coeffs.reality == "real" else -n_l
        for n in range(n_lo, n_l + 1):
            for m in range(-m_l, m_l + 1):
                value = coeffs.data[index]
                lines.append(f"{ell} {m} {n} {_fmt(value.real)} {_fmt(value.imag)}")
                index += 1
    with open(path, "w") as handle:
        handle.write("\n".join(lines) + "\n")


def read_coeffs(path) -> WignerCoeffs:
    """Read a coefficient file written by `write_coeffs`."""
    with open(path) as handle:
        lines = [line.strip() for line in handle if line.strip()]
    if not lines:
        raise ValueError(f"{path}: empty coefficient file")
    header = lines[0].split()
    if len(header) != 6 or header[0] != COEFF_MAGIC or header[1] != FORMAT_VERSION:
        raise ValueError(f"{path}: not a {COEFF_MAGIC} {FORMAT_VERSION} file")
    limits = BandLimits(int(header[2]), int(header[3]), int(header[4]))
    reality = _validate_reality(header[5])
    coeffs = WignerCoeffs.zeros(limits, reality)
    if len(lines) - 1 != coeffs.data.size:
        raise ValueError(
            f"{path}: expected {coeffs.data.size} coefficient rows, got {len(lines) - 1}"
        )
    for index, line in enumerate(lines[1:]):
        parts = line.split()
        if len(parts) != 5:
            raise ValueError(f"{path}: malformed coefficient row {line!r}")
        ell, m, n = int(parts[0]), int(parts[1]), int(parts[2])
        expected = coeff_unindex(index, limits) if reality == "complex" else None
        if reality == "complex" and (ell, m, n) != expected:
            raise ValueError(f"{path}: row {index} out of storage order")
        value = complex(float(parts[3]), float(parts[4]))
        coeffs.data[index] = value
        if reality == "real":
            if n < 0:
                raise ValueError(f"{path}: real file contains n < 0 row {line!r}")
            if coeffs._real_index(ell, m, n) != index:
                raise ValueError(f"{path}: row {index} out of storage order")
    return coeffs


def write_samples(samples: So3Samples, path) -> None:
    """Write samples as text, one value per line in storage order (g fastest)."""
    limits = samples.limits
    lines = [
        f"{SAMPLE_MAGIC} {FORMAT_VERSION} {limits.L} {limits.M} {limits.N} "
        f"{samples.reality} order=gab"
    ]
    flat = samples.values.ravel()
    if samples.reality == "real":
        lines.extend(_fmt(v) for v in flat)
    else:
        lines.extend(f"{_fmt(v.real)} {_fmt(v.imag)}" for v in flat)
    with open(path, "w") as handle:
        handle.write("\n".join(lines) + "\n")


def read_samples(path) -> So3Samples:
    """Read a sample file written by `write_samples`."""
    with open(path) as handle:
        lines = [line.strip() for line in handle if line.strip()]
    if not lines:
        raise ValueError(f"{path}: empty sample file")
    header = lines[0].split()
    if (
        len(header) != 7
        or header[0] != SAMPLE_MAGIC
        or header[1] != FORMAT_VERSION
        or header[6] != "order=gab"
    ):
        raise ValueError(f"{path}: not a {SAMPLE_MAGIC} {FORMAT_VERSION} order=gab file")
    limits = BandLimits(int(header[2]), int(header[3]), int(header[4]))
    reality = _validate_reality(header[5])
    shape = limits.sample_shape()
    count = shape[0] * shape[1] * shape[2]
    if len(lines) - 1 != count:
        raise ValueError(f"{path}: expected {count} sample rows, got {len(lines) - 1}")
    if reality == "real":
        flat = np.array([float(line) for line in lines[1:]], dtype=np.float64)
    else:
        flat = np.empty(count, dtype=np.complex128)
        for i, line in enumerate(lines[1:]):
            parts = line.split()
            if len(parts) != 2:
                raise ValueError(f"{path}: malformed sample row {line!r}")
            flat[i] = complex(float(parts[0]), float(parts[1]))
    return So3Samples(limits, reality, flat.reshape(shape))

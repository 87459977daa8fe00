"""Benchmark harness: random test signals, round-trip accuracy, timing.

The evaluation protocol: draw uniformly random Wigner coefficients with real
and imaginary parts in [-1, 1], synthesise the signal with an inverse
transform, recompute coefficients with a forward transform, and record the
maximum absolute coefficient error plus wall-clock timings.  Timings take
the minimum of three repeats inside each trial (to shed scheduler noise)
and are averaged across trials; error columns are bit-reproducible for a
fixed seed because every trial draws from its own split of a Philox
counter-based generator.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass

import numpy as np

from .grid import BandLimits, WignerCoeffs
from .quadrature import QuadratureWeights, integrate
from .transform import (
    TransformPlan,
    evaluate_on_quadrature_grid,
    forward_naive,
    integrate_coeffs,
    inverse_naive,
)

CSV_COLUMNS = (
    "L", "M", "N", "reality", "path",
    "max_abs_error", "forward_s", "inverse_s", "seed", "trials",
)

QUAD_CSV_COLUMNS = (
    "L", "M", "N", "seed",
    "const_abs_error", "random_rel_error", "basis_max_abs",
)

_TIMING_REPEATS = 3


@dataclass
class RunReport:
    """One accuracy/timing record; one CSV row."""

    L: int
    M: int
    N: int
    reality: str
    path: str
    max_abs_error: float
    forward_seconds: float
    inverse_seconds: float
    seed: int
    trials: int

    def __post_init__(self):
        if self.trials < 1:
            raise ValueError("trials must be >= 1")
        if self.max_abs_error < 0:
            raise ValueError("max_abs_error must be >= 0")
        if self.forward_seconds <= 0 or self.inverse_seconds <= 0:
            raise ValueError("timings must be positive")

    def csv_row(self) -> str:
        return ",".join([
            str(self.L), str(self.M), str(self.N), self.reality, self.path,
            format(self.max_abs_error, ".17g"),
            format(self.forward_seconds, ".17g"),
            format(self.inverse_seconds, ".17g"),
            str(self.seed), str(self.trials),
        ])


@dataclass
class QuadratureReport:
    """Quadrature check record: errors of the three canonical integrals."""

    L: int
    M: int
    N: int
    seed: int
    const_abs_error: float
    random_rel_error: float
    basis_max_abs: float

    def csv_row(self) -> str:
        return ",".join([
            str(self.L), str(self.M), str(self.N), str(self.seed),
            format(self.const_abs_error, ".17g"),
            format(self.random_rel_error, ".17g"),
            format(self.basis_max_abs, ".17g"),
        ])


def _generator(seed_seq) -> np.random.Generator:
    # Philox: counter-based, platform-independent, cheap to split per trial.
    return np.random.Generator(np.random.Philox(seed_seq))


def _random_coeffs_from(limits: BandLimits, rng: np.random.Generator,
                        reality: str) -> WignerCoeffs:
    if reality == "complex":
        size = WignerCoeffs.zeros(limits, "complex").data.size
        data = rng.uniform(-1.0, 1.0, size) + 1j * rng.uniform(-1.0, 1.0, size)
        return WignerCoeffs(limits, "complex", data)
    out = WignerCoeffs.zeros(limits, "real")
    for ell in range(limits.L):
        m_l = min(ell, limits.M - 1)
        n_l = min(ell, limits.N - 1)
        for n in range(0, n_l + 1):
            for m in range(-m_l, m_l + 1):
                if n == 0 and m < 0:
                    continue  # fixed by the n = 0 internal symmetry
                value = complex(rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0))
                if n == 0 and m == 0:
                    value = complex(value.real, 0.0)
                out.set(ell, m, n, value)
                if n == 0 and m > 0:
                    out.set(ell, -m, 0, (-1.0) ** m * np.conj(value))
    return out


def random_coeffs(limits: BandLimits, seed: int, reality: str = "complex") -> WignerCoeffs:
    """Uniformly random coefficients, re/im in [-1, 1], deterministic in seed.

    Real-flagged output satisfies conjugate symmetry exactly by construction
    (the n >= 0 half is drawn, the n = 0 block symmetrised).
    """
    return _random_coeffs_from(limits, _generator(np.random.SeedSequence(seed)), reality)


def _timed(fn, repeats: int = _TIMING_REPEATS):
    best = math.inf
    result = None
    for _ in range(repeats):
        start = time.perf_counter()
        result = fn()
        best = min(best, time.perf_counter() - start)
    return result, best


def _run_pair(plan: TransformPlan, coeffs: WignerCoeffs, path: str,
              parallel: bool):
    if path == "naive":
        samples, inv_s = _timed(lambda: inverse_naive(coeffs))
        recomputed, fwd_s = _timed(lambda: forward_naive(samples))
    else:
        samples, inv_s = _timed(lambda: plan.inverse(coeffs, path, parallel))
        recomputed, fwd_s = _timed(lambda: plan.forward(samples, path, parallel))
    return recomputed, fwd_s, inv_s


def roundtrip(limits: BandLimits, seed: int, reality: str = "complex",
              path: str = "auto", trials: int = 1, plan: TransformPlan = None,
              parallel: bool = False) -> RunReport:
    """Inverse-then-forward round trip over random signals.

    Reports the worst coefficient error across trials and mean timings.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    if plan is None:
        plan = TransformPlan(limits)
    streams = np.random.SeedSequence(seed).spawn(trials)
    worst = 0.0
    fwd_total = 0.0
    inv_total = 0.0
    resolved = path
    if path == "auto":
        resolved = "per-n" if limits.N <= limits.L // 4 else "3d"
    for stream in streams:
        coeffs = _random_coeffs_from(limits, _generator(stream), reality)
        recomputed, fwd_s, inv_s = _run_pair(plan, coeffs, resolved, parallel)
        worst = max(worst, float(np.abs(recomputed.data - coeffs.data).max()))
        fwd_total += fwd_s
        inv_total += inv_s
    label = resolved + ("-parallel" if parallel else "")
    return RunReport(
        limits.L, limits.M, limits.N, reality, label, worst,
        fwd_total / trials, inv_total / trials, seed, trials,
    )


def bench_scaling(L_list, N_mode="equal", reality: str = "complex",
                  seed: int = 0, trials: int = 3, path: str = "auto",
                  parallel: bool = False) -> list:
    """Round-trip reports over ascending band-limits (powers of two).

    `N_mode` is "equal" (N = L) or a fixed integer N; pair with
    `scaling_ratios` for the time(2L)/time(L) column.
    """
    L_list = list(L_list)
    if any(L & (L - 1) for L in L_list) or L_list != sorted(L_list):
        raise ValueError(f"L list must be ascending powers of two, got {L_list}")
    reports = []
    for L in L_list:
        N = L if N_mode == "equal" else int(N_mode)
        if N > L:
            raise ValueError(f"fixed N={N} exceeds L={L}")
        limits = BandLimits(L, L, N)
        reports.append(
            roundtrip(limits, seed, reality, path, trials, parallel=parallel)
        )
    return reports


def scaling_ratios(reports) -> list:
    """(L, time(L)/time(L_prev)) for consecutive reports; times averaged over
    the forward and inverse directions."""
    ratios = []
    for prev, cur in zip(reports, reports[1:]):
        t_prev = 0.5 * (prev.forward_seconds + prev.inverse_seconds)
        t_cur = 0.5 * (cur.forward_seconds + cur.inverse_seconds)
        ratios.append((cur.L, t_cur / t_prev))
    return ratios


def quadrature_check(limits: BandLimits, seed: int = 0,
                     plan: TransformPlan = None) -> QuadratureReport:
    """Exercise the quadrature rule on its three canonical cases.

    Constant signal against the group volume 8 pi^2, a random band-limited
    signal against its own (0,0,0) coefficient, and pure basis functions of
    positive degree against zero.
    """
    if plan is None:
        plan = TransformPlan(limits)
    weights = QuadratureWeights(limits)

    ones = np.ones(weights.grid_shape(), dtype=np.complex128)
    const_err = abs(integrate(ones, weights) - 8.0 * math.pi**2)

    coeffs = random_coeffs(limits, seed, "complex")
    total = integrate_coeffs(coeffs, plan.delta)
    random_rel = abs(total - coeffs.data[0]) / abs(coeffs.data[0])

    basis_max = 0.0
    for ell in range(1, min(limits.L, 5)):
        m_l = min(ell, limits.M - 1)
        n_l = min(ell, limits.N - 1)
        for m in {-m_l, 0, m_l}:
            for n in {-n_l, 0, n_l}:
                impulse = WignerCoeffs.zeros(limits, "complex")
                # conj(D^l_{mn}) has the single coefficient 8 pi^2/(2l+1)
                impulse.set(ell, m, n, 8.0 * math.pi**2 / (2 * ell + 1))
                vals = evaluate_on_quadrature_grid(impulse, delta=plan.delta)
                basis_max = max(basis_max, abs(integrate(vals, weights)))
    return QuadratureReport(
        limits.L, limits.M, limits.N, seed,
        float(const_err), float(random_rel), float(basis_max),
    )


def write_reports_csv(reports, path) -> None:
    """Schema-stable CSV: fixed column order, one row per report."""
    with open(path, "w") as handle:
        handle.write(",".join(CSV_COLUMNS) + "\n")
        for report in reports:
            handle.write(report.csv_row() + "\n")


def write_quadrature_csv(reports, path) -> None:
    with open(path, "w") as handle:
        handle.write(",".join(QUAD_CSV_COLUMNS) + "\n")
        for report in reports:
            handle.write(report.csv_row() + "\n")


def write_dat(path, rows, header: str = "") -> None:
    """Two-column whitespace table, log-log plot ready."""
    with open(path, "w") as handle:
        if header:
            handle.write(f"# {header}\n")
        for x, y in rows:
            handle.write(f"{format(float(x), '.17g')} {format(float(y), '.17g')}\n")

"""Acceptance suite: every criterion at its stated tolerance.

Each test prints one `ACCEPTANCE <k> ...: PASS/FAIL` line (run with -s or
check captured output).  Timing criteria measure wall-clock on the local
machine; the complexity checks are ratio-based so absolute speed does not
matter.
"""

import time

import numpy as np
import pytest

from so3fft import (
    BandLimits,
    QuadratureWeights,
    TransformPlan,
    WignerCoeffs,
    build_delta_table,
    coeff_count,
    d_plane,
    d_via_fourier,
    evaluate_on_quadrature_grid,
    forward,
    forward_naive,
    forward_real,
    integrate,
    inverse,
    inverse_naive,
    inverse_real,
    quadrature_nodes,
    read_coeffs,
    read_samples,
    theorem_sample_count,
    write_coeffs,
    write_samples,
)
from so3fft.cli import main
from so3fft.harness import bench_scaling, random_coeffs, roundtrip, scaling_ratios
from so3fft.transform import _fold_to_real


def _report(number: int, name: str, ok: bool, detail: str) -> None:
    status = "PASS" if ok else "FAIL"
    print(f"ACCEPTANCE {number} {name}: {status} ({detail})")
    assert ok, f"criterion {number} {name}: {detail}"


def test_criterion_1_exhaustive_impulse_roundtrips():
    # L = M = N in {2, 4, 8}: every unit impulse, all three paths, < 1e-12.
    started = time.perf_counter()
    worst = 0.0
    for L in (2, 4, 8):
        lim = BandLimits.cubic(L)
        delta = build_delta_table(L)
        for index in range(coeff_count(lim)):
            impulse = WignerCoeffs.zeros(lim)
            impulse.data[index] = 1.0
            for path in ("3d", "per-n", "naive"):
                synth = inverse(impulse, delta=delta, path=path)
                back = forward(synth, delta=delta, path=path)
                worst = max(worst, float(np.abs(back.data - impulse.data).max()))
    elapsed = time.perf_counter() - started
    _report(
        1, "exhaustive impulse round-trips",
        worst < 1e-12 and elapsed < 60.0,
        f"max error {worst:.3e}, {elapsed:.1f}s",
    )


def test_criterion_2_random_roundtrip_large_bandlimits():
    started = time.perf_counter()
    r64 = roundtrip(BandLimits(64, 64, 4), seed=101, reality="complex",
                    path="auto", trials=10)
    r128 = roundtrip(BandLimits(128, 128, 4), seed=202, reality="complex",
                     path="auto", trials=10)
    elapsed = time.perf_counter() - started
    _report(
        2, "random round-trips at L=64/128",
        r64.max_abs_error < 1e-11 and r128.max_abs_error < 1e-10
        and elapsed < 300.0,
        f"err64 {r64.max_abs_error:.3e}, err128 {r128.max_abs_error:.3e}, "
        f"{elapsed:.1f}s",
    )


def test_criterion_3_oracle_equivalence():
    started = time.perf_counter()
    worst = 0.0
    for L in (2, 3, 4, 5, 6):
        lim = BandLimits.cubic(L)
        delta = build_delta_table(L)
        for index in range(coeff_count(lim)):
            impulse = WignerCoeffs.zeros(lim)
            impulse.data[index] = 1.0
            slow = inverse_naive(impulse)
            fast = inverse(impulse, delta=delta)
            worst = max(worst, float(np.abs(slow.values - fast.values).max()))
            y_fast = forward(slow, delta=delta)
            y_slow = forward_naive(slow)
            worst = max(worst, float(np.abs(y_fast.data - y_slow.data).max()))
    lim = BandLimits.cubic(6)
    delta = build_delta_table(6)
    for seed in range(5):
        coeffs = random_coeffs(lim, 300 + seed)
        slow = inverse_naive(coeffs)
        fast = inverse(coeffs, delta=delta)
        worst = max(worst, float(np.abs(slow.values - fast.values).max()))
        worst = max(
            worst,
            float(np.abs(forward(slow, delta=delta).data
                         - forward_naive(slow).data).max()),
        )
    elapsed = time.perf_counter() - started
    _report(
        3, "fast paths match naive summation",
        worst < 1e-12 and elapsed < 120.0,
        f"max discrepancy {worst:.3e}, {elapsed:.1f}s",
    )


def test_criterion_4_quadrature_exactness():
    # basis functions evaluated directly from the recursion, not via the
    # library's resampler, integrate to 8 pi^2 only at (0, 0, 0)
    lim = BandLimits.cubic(8)
    weights = QuadratureWeights(lim)
    betas, alphas, gammas = quadrature_nodes(lim)
    worst = 0.0
    for ell in range(8):
        stack = np.stack([d_plane(ell, b) for b in betas])
        for m in range(-ell, ell + 1):
            for n in range(-ell, ell + 1):
                vals = (
                    np.exp(1j * m * alphas)[None, :, None]
                    * stack[:, m + ell, n + ell][:, None, None]
                    * np.exp(1j * n * gammas)[None, None, :]
                )
                value = integrate(vals, weights)
                expected = 8 * np.pi**2 if (ell, m, n) == (0, 0, 0) else 0.0
                worst = max(worst, abs(value - expected))

    lim16 = BandLimits.cubic(16)
    coeffs = random_coeffs(lim16, 404)
    total = integrate(
        evaluate_on_quadrature_grid(coeffs), QuadratureWeights(lim16)
    )
    rel = abs(total - coeffs.data[0]) / abs(coeffs.data[0])
    _report(
        4, "quadrature exactness",
        worst < 1e-11 and rel < 1e-12,
        f"basis max {worst:.3e}, random rel {rel:.3e}",
    )


def test_criterion_5_sample_count_economy():
    ratios = {
        L: theorem_sample_count(BandLimits.cubic(L)) / (8 * L**3)
        for L in (32, 64, 128, 256, 512, 1024)
    }
    worst = max(ratios.values())
    _report(
        5, "sample count halves the benchmark grid",
        worst <= 0.52,
        f"max ratio {worst:.4f} over L >= 32",
    )


def test_criterion_6_complexity_scaling():
    # fast transform: N = 4 fixed on the separation-of-variables path;
    # per-L minimum over repeated runs suppresses scheduler noise
    def fast_times():
        reports = bench_scaling([32, 64, 128], 4, "complex", seed=7,
                                trials=3, path="3d")
        return [0.5 * (r.forward_seconds + r.inverse_seconds) for r in reports]

    t_a = fast_times()
    t_b = fast_times()
    best = [min(a, b) for a, b in zip(t_a, t_b)]
    fast_ratios = [best[1] / best[0], best[2] / best[1]]

    naive_reports = bench_scaling([8, 16], "equal", "complex", seed=7,
                                  trials=1, path="naive")
    naive_ratio = scaling_ratios(naive_reports)[0][1]

    ok = all(5.0 <= r <= 12.0 for r in fast_ratios) and 40.0 <= naive_ratio <= 90.0
    _report(
        6, "complexity scaling",
        ok,
        f"fast ratios {fast_ratios[0]:.2f}, {fast_ratios[1]:.2f} in [5, 12]; "
        f"naive ratio {naive_ratio:.1f} in [40, 90]",
    )


def test_criterion_7_real_signal_speedup():
    lim = BandLimits(128, 128, 4)
    plan = TransformPlan(lim)
    complex_report = roundtrip(lim, 55, "complex", "per-n", trials=3, plan=plan)
    real_report = roundtrip(lim, 55, "real", "per-n", trials=3, plan=plan)
    t_complex = complex_report.forward_seconds + complex_report.inverse_seconds
    t_real = real_report.forward_seconds + real_report.inverse_seconds
    ratio = t_real / t_complex

    half = random_coeffs(lim, 66, "real")
    full = half.to_complex()
    samples_real = inverse_real(half, delta=plan.delta, path="per-n")
    samples_complex = inverse(full, delta=plan.delta, path="per-n")
    sample_err = float(
        np.abs(samples_real.values - samples_complex.values.real).max()
    )
    back_real = forward_real(samples_real, delta=plan.delta, path="per-n")
    back_complex = _fold_to_real(forward(samples_complex, delta=plan.delta,
                                         path="per-n"))
    coeff_err = float(np.abs(back_real.data - back_complex.data).max())

    ok = ratio <= 0.75 and sample_err < 1e-12 and coeff_err < 1e-12
    _report(
        7, "real-signal fast path",
        ok,
        f"time ratio {ratio:.3f} <= 0.75, sample err {sample_err:.3e}, "
        f"coeff err {coeff_err:.3e}",
    )


def test_criterion_8_d_function_consistency():
    table = build_delta_table(32)
    rng = np.random.default_rng(777)
    worst = 0.0
    for _ in range(1000):
        ell = int(rng.integers(0, 32))
        m = int(rng.integers(-ell, ell + 1))
        n = int(rng.integers(-ell, ell + 1))
        beta = float(rng.uniform(0, np.pi))
        direct = d_plane(ell, beta)[m + ell, n + ell]
        worst = max(worst, abs(d_via_fourier(ell, m, n, beta, table) - direct))

    symmetry = 0.0
    for ell in range(32):
        plane = table.plane(ell)
        signs = np.fromfunction(lambda i, j: (-1.0) ** (i + j), plane.shape)
        symmetry = max(symmetry,
                       float(np.abs(plane - signs * plane[::-1, ::-1]).max()))
    ok = worst < 1e-12 and symmetry < 1e-12
    _report(
        8, "d-function Fourier series matches recursion",
        ok,
        f"max eval err {worst:.3e}, table symmetry residual {symmetry:.3e}",
    )


def test_criterion_9_file_roundtrip_and_cli(tmp_path):
    lim = BandLimits(8, 8, 4)
    delta = build_delta_table(8)
    coeffs = random_coeffs(lim, 99)
    samples = inverse(coeffs, delta=delta)

    cpath = tmp_path / "coeffs.txt"
    spath = tmp_path / "samples.txt"
    write_coeffs(coeffs, cpath)
    write_samples(samples, spath)
    bit_ok = np.array_equal(read_coeffs(cpath).data, coeffs.data) and \
        np.array_equal(read_samples(spath).values, samples.values)

    cli_coeffs = tmp_path / "cli_coeffs.txt"
    cli_samples = tmp_path / "cli_samples.txt"
    assert main(["transform", "--direction", "forward",
                 "--in", str(spath), "--out", str(cli_coeffs)]) == 0
    assert main(["transform", "--direction", "inverse",
                 "--in", str(cpath), "--out", str(cli_samples)]) == 0
    forward_err = float(
        np.abs(read_coeffs(cli_coeffs).data - forward(samples, delta=delta).data).max()
    )
    inverse_err = float(
        np.abs(read_samples(cli_samples).values - samples.values).max()
    )
    ok = bit_ok and forward_err < 1e-15 and inverse_err < 1e-15
    _report(
        9, "file formats and CLI transform",
        ok,
        f"bit-exact {bit_ok}, CLI forward err {forward_err:.2e}, "
        f"inverse err {inverse_err:.2e}",
    )

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from so3fft import (
    BandLimits,
    So3Samples,
    WignerCoeffs,
    alpha_node,
    beta_node,
    coeff_count,
    coeff_index,
    coeff_unindex,
    gamma_node,
    read_coeffs,
    read_samples,
    real_coeff_count,
    sample_index,
    sample_unindex,
    theorem_sample_count,
    write_coeffs,
    write_samples,
)


class TestBandLimits:
    def test_valid(self):
        lim = BandLimits(8, 4, 2)
        assert lim.sample_shape() == (8, 7, 3)

    @pytest.mark.parametrize("bad", [(0, 1, 1), (4, 5, 1), (4, 1, 5), (1, 0, 1)])
    def test_invalid(self, bad):
        with pytest.raises(ValueError):
            BandLimits(*bad)

    def test_cubic(self):
        assert BandLimits.cubic(5) == BandLimits(5, 5, 5)


class TestNodes:
    def test_alpha_values(self):
        assert alpha_node(0, 4) == 0.0
        assert alpha_node(1, 2) == pytest.approx(2 * np.pi / 3)
        assert alpha_node(4, 3) == pytest.approx(8 * np.pi / 5)

    def test_beta_values(self):
        assert beta_node(0, 2) == pytest.approx(np.pi / 3)
        assert beta_node(7, 8) == pytest.approx(np.pi)  # b = L-1 endpoint
        assert beta_node(1, 3) == pytest.approx(3 * np.pi / 5)

    def test_gamma_values(self):
        assert gamma_node(0, 5) == 0.0
        assert gamma_node(3, 4) == pytest.approx(6 * np.pi / 7)

    def test_bounds(self):
        with pytest.raises(ValueError):
            alpha_node(7, 4)
        with pytest.raises(ValueError):
            alpha_node(-1, 4)
        with pytest.raises(ValueError):
            beta_node(2, 2)
        with pytest.raises(ValueError):
            gamma_node(1, 1)  # only g = 0 exists for N = 1

    def test_beta_extended_range(self):
        assert beta_node(2, 2, extended=True) == pytest.approx(5 * np.pi / 3)
        with pytest.raises(ValueError):
            beta_node(3, 2, extended=True)

    @given(st.integers(min_value=1, max_value=40))
    def test_monotone(self, K):
        alphas = [alpha_node(a, K) for a in range(2 * K - 1)]
        betas = [beta_node(b, K) for b in range(K)]
        gammas = [gamma_node(g, K) for g in range(2 * K - 1)]
        for seq in (alphas, betas, gammas):
            assert all(x < y for x, y in zip(seq, seq[1:]))

    def test_node_ranges(self):
        M = 6
        assert all(0 <= alpha_node(a, M) < 2 * np.pi for a in range(2 * M - 1))
        L = 6
        assert all(0 < beta_node(b, L) <= np.pi for b in range(L))


class TestCounts:
    def test_theorem_sample_count_examples(self):
        assert theorem_sample_count(BandLimits.cubic(1)) == 1
        assert theorem_sample_count(BandLimits.cubic(2)) == 12
        assert theorem_sample_count(BandLimits.cubic(4)) == 154

    def test_theorem_count_asymptotics(self):
        ratio64 = theorem_sample_count(BandLimits.cubic(64)) / (4 * 64**3)
        assert 0.95 <= ratio64 <= 1.0
        ratio1024 = theorem_sample_count(BandLimits.cubic(1024)) / (4 * 1024**3)
        assert ratio64 < ratio1024 < 1.0

    def test_coeff_count_examples(self):
        assert coeff_count(BandLimits.cubic(1)) == 1
        assert coeff_count(BandLimits.cubic(2)) == 10
        # truncated index set summed directly
        assert coeff_count(BandLimits(4, 2, 1)) == 1 + 3 + 3 + 3

    @pytest.mark.parametrize("L", [1, 2, 5, 16])
    def test_cubic_closed_form(self, L):
        assert coeff_count(BandLimits.cubic(L)) == L * (4 * L * L - 1) // 3

    @pytest.mark.parametrize("limits", [(2, 2, 2), (5, 3, 2), (4, 4, 1)])
    def test_grid_never_smaller_than_theorem_count(self, limits):
        lim = BandLimits(*limits)
        stored = lim.L * (2 * lim.M - 1) * (2 * lim.N - 1)
        assert stored >= theorem_sample_count(lim)
        if lim.M > 1:
            assert stored > theorem_sample_count(lim)

    def test_grid_equality_only_for_single_alpha(self):
        lim = BandLimits(4, 1, 2)
        assert lim.L * 1 * 3 == theorem_sample_count(lim)


class TestIndexMaps:
    def test_first_and_last(self):
        lim = BandLimits(4, 3, 2)
        assert coeff_index(0, 0, 0, lim) == 0
        assert coeff_index(3, 2, 1, lim) == coeff_count(lim) - 1
        assert sample_index(0, 0, 0, lim) == 0

    def test_exhaustive_roundtrip(self):
        lim = BandLimits.cubic(5)
        seen = set()
        for ell in range(5):
            for n in range(-ell, ell + 1):
                for m in range(-ell, ell + 1):
                    idx = coeff_index(ell, m, n, lim)
                    assert coeff_unindex(idx, lim) == (ell, m, n)
                    seen.add(idx)
        assert seen == set(range(coeff_count(lim)))

    def test_sample_roundtrip(self):
        lim = BandLimits(4, 2, 4)
        total = 4 * 3 * 7
        seen = set()
        for a in range(3):
            for b in range(4):
                for g in range(7):
                    idx = sample_index(a, b, g, lim)
                    assert sample_unindex(idx, lim) == (a, b, g)
                    seen.add(idx)
        assert seen == set(range(total))

    def test_gamma_fastest(self):
        lim = BandLimits(4, 2, 4)
        assert sample_index(0, 0, 1, lim) == sample_index(0, 0, 0, lim) + 1

    @given(
        st.integers(min_value=1, max_value=9),
        st.integers(min_value=1, max_value=9),
        st.integers(min_value=1, max_value=9),
        st.data(),
    )
    @settings(max_examples=60, deadline=None)
    def test_coeff_index_bijection_property(self, L, M, N, data):
        M, N = min(M, L), min(N, L)
        lim = BandLimits(L, M, N)
        idx = data.draw(st.integers(min_value=0, max_value=coeff_count(lim) - 1))
        ell, m, n = coeff_unindex(idx, lim)
        assert coeff_index(ell, m, n, lim) == idx

    def test_out_of_range(self):
        lim = BandLimits(4, 2, 2)
        with pytest.raises(ValueError):
            coeff_index(4, 0, 0, lim)
        with pytest.raises(ValueError):
            coeff_index(3, 2, 0, lim)  # m capped at M-1 = 1
        with pytest.raises(ValueError):
            coeff_index(0, 0, 1, lim)
        with pytest.raises(ValueError):
            coeff_unindex(coeff_count(lim), lim)
        with pytest.raises(ValueError):
            sample_index(0, 4, 0, lim)


class TestCoeffObjects:
    def test_get_set_roundtrip(self, rng):
        lim = BandLimits(4, 3, 3)
        coeffs = WignerCoeffs.zeros(lim)
        coeffs.set(2, -1, 2, 1.5 - 0.5j)
        assert coeffs.get(2, -1, 2) == 1.5 - 0.5j

    def test_real_storage_reconstruction(self):
        lim = BandLimits(3, 3, 3)
        coeffs = WignerCoeffs.zeros(lim, "real")
        coeffs.set(2, 1, 2, 0.25 + 0.75j)
        assert coeffs.get(2, -1, -2) == pytest.approx(
            (-1) ** 3 * np.conj(0.25 + 0.75j)
        )
        with pytest.raises(ValueError):
            coeffs.set(2, 1, -1, 1.0)

    def test_real_storage_length(self):
        lim = BandLimits(3, 3, 2)
        assert WignerCoeffs.zeros(lim, "real").data.size == real_coeff_count(lim)

    def test_wrong_length_rejected(self):
        lim = BandLimits.cubic(2)
        with pytest.raises(ValueError):
            WignerCoeffs(lim, "complex", np.zeros(3, dtype=complex))

    def test_bad_reality_flag(self):
        with pytest.raises(ValueError):
            WignerCoeffs.zeros(BandLimits.cubic(2), "quaternionic")

    def test_to_complex_preserves_values(self, rng):
        from so3fft.harness import random_coeffs

        lim = BandLimits(4, 4, 3)
        half = random_coeffs(lim, 11, "real")
        full = half.to_complex()
        assert full.symmetry_residual() < 1e-12
        for ell in range(4):
            for n in range(-min(ell, 2), min(ell, 2) + 1):
                for m in range(-ell, ell + 1):
                    assert full.get(ell, m, n) == pytest.approx(half.get(ell, m, n))

    def test_samples_shape_checked(self):
        lim = BandLimits(3, 2, 2)
        with pytest.raises(ValueError):
            So3Samples(lim, "complex", np.zeros((3, 3, 4), dtype=complex))

    def test_real_samples_dtype(self):
        lim = BandLimits(2, 2, 2)
        samples = So3Samples.zeros(lim, "real")
        assert samples.values.dtype == np.float64


class TestFileFormats:
    def test_coeff_roundtrip_bit_exact(self, tmp_path, rng):
        lim = BandLimits(5, 3, 4)
        data = rng.uniform(-1, 1, coeff_count(lim)) + 1j * rng.uniform(
            -1, 1, coeff_count(lim)
        )
        coeffs = WignerCoeffs(lim, "complex", data)
        path = tmp_path / "c.txt"
        write_coeffs(coeffs, path)
        back = read_coeffs(path)
        assert back.limits == lim and back.reality == "complex"
        assert np.array_equal(back.data, coeffs.data)

    def test_real_coeff_roundtrip(self, tmp_path):
        from so3fft.harness import random_coeffs

        coeffs = random_coeffs(BandLimits(4, 4, 2), 3, "real")
        path = tmp_path / "c.txt"
        write_coeffs(coeffs, path)
        back = read_coeffs(path)
        assert back.reality == "real"
        assert np.array_equal(back.data, coeffs.data)

    def test_sample_roundtrip_bit_exact(self, tmp_path, rng):
        lim = BandLimits(3, 2, 3)
        vals = rng.standard_normal(lim.sample_shape()) + 1j * rng.standard_normal(
            lim.sample_shape()
        )
        samples = So3Samples(lim, "complex", vals)
        path = tmp_path / "s.txt"
        write_samples(samples, path)
        back = read_samples(path)
        assert np.array_equal(back.values, samples.values)

    def test_real_sample_roundtrip(self, tmp_path, rng):
        lim = BandLimits(2, 2, 2)
        samples = So3Samples(lim, "real", rng.standard_normal(lim.sample_shape()))
        path = tmp_path / "s.txt"
        write_samples(samples, path)
        back = read_samples(path)
        assert back.reality == "real"
        assert np.array_equal(back.values, samples.values)

    def test_rejects_wrong_magic(self, tmp_path):
        path = tmp_path / "bad.txt"
        path.write_text("not-a-header v1 2 2 2 complex\n")
        with pytest.raises(ValueError):
            read_coeffs(path)

    def test_rejects_truncated(self, tmp_path):
        lim = BandLimits.cubic(2)
        coeffs = WignerCoeffs.zeros(lim)
        path = tmp_path / "c.txt"
        write_coeffs(coeffs, path)
        lines = path.read_text().splitlines()
        path.write_text("\n".join(lines[:-2]) + "\n")
        with pytest.raises(ValueError):
            read_coeffs(path)

    def test_seventeen_digit_values_survive(self, tmp_path):
        lim = BandLimits(1, 1, 1)
        tricky = np.array([0.1 + (1 / 3) * 1j])
        coeffs = WignerCoeffs(lim, "complex", tricky)
        path = tmp_path / "c.txt"
        write_coeffs(coeffs, path)
        assert read_coeffs(path).data[0] == tricky[0]

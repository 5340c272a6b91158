import numpy as np
import pytest

from zcsync.channel import ChannelConfig, apply_channel
from zcsync.closed_form import closed_form_corr
from zcsync.correlators import (
    CorrOutput,
    TimingEstimate,
    argmax_timing,
    conjugate_pair_estimate,
    diff_correlate,
    direct_correlate,
    mpart_correlate,
)
from zcsync.sequences import ChirpSpec, FrameSpec, ZcSpec, build_frame, gen_chirp, gen_zc

N = 131
DFS = 1250.0
FS = N * DFS  # one subcarrier spacing per bin, the rate the closed forms assume


def received(x, delay=0, dlam=0.0, out_len=None, noise_sigma2=0.0, rng=None):
    out_len = out_len or (delay + x.size + 40)
    cfg = ChannelConfig(
        out_len=out_len,
        sample_rate_hz=FS,
        delay_samples=delay,
        freq_offset_hz=dlam * DFS,
        noise_sigma2=noise_sigma2,
    )
    return apply_channel(x, cfg, rng=rng)


class TestDirectCorrelate:
    def test_autocorrelation_peak_is_one_at_zero_lag(self):
        x = gen_zc(ZcSpec(N, 1))
        out = direct_correlate(x, x, (-10, 10))
        est = argmax_timing(out)
        assert est.k_hat == 0.0
        assert est.peak_mag == pytest.approx(1.0, abs=1e-12)

    def test_peak_strictly_dominates_other_lags(self):
        x = gen_zc(ZcSpec(N, 1))
        y = received(x, delay=50)
        out = direct_correlate(y, x, (0, 120))
        mags = out.magnitudes
        assert np.argmax(mags) == 50
        others = np.delete(mags, 50)
        assert mags[50] > others.max()

    def test_integer_cfo_shifts_zc_peak_by_plus_dlam(self):
        # generated ZC has negative quadratic phase, so its peak walks WITH the CFO;
        # magnitude (N - |dlam|)/N as in the aligned branch of the closed form
        x = gen_zc(ZcSpec(N, 1))
        y = received(x, delay=50, dlam=2.0, out_len=300)
        est = argmax_timing(direct_correlate(y, x, (0, 250)))
        assert est.k_hat == 52.0
        assert est.peak_mag == pytest.approx((N - 2) / N, abs=1e-12)

    def test_integer_cfo_shifts_positive_chirp_peak_by_minus_dlam(self):
        # the mirrored convention: quadratic coefficient +1/N
        x = gen_chirp(ChirpSpec(N, a2=1 / N, a1=1 / N))
        y = received(x, delay=50, dlam=2.0, out_len=300)
        est = argmax_timing(direct_correlate(y, x, (0, 250)))
        assert est.k_hat == 48.0
        assert est.peak_mag == pytest.approx((N - 2) / N, abs=1e-12)

    def test_matches_closed_form_on_lag_grid(self):
        a2 = 0.37
        x = gen_chirp(ChirpSpec(N, a2=a2))
        y = received(x, delay=60, dlam=1.3, out_len=400)
        out = direct_correlate(y, x, (60 - 35, 60 + 35))
        expected = np.array([closed_form_corr(dk, 1.3, a2, N) for dk in range(-35, 36)])
        np.testing.assert_allclose(out.magnitudes, expected, atol=1e-9)

    def test_noiseless_magnitudes_bounded_by_one(self):
        x = gen_zc(ZcSpec(N, 1))
        y = received(x, delay=10, dlam=17.5)
        out = direct_correlate(y, x, (-20, 100))
        assert out.magnitudes.max() <= 1.0 + 1e-9
        assert out.magnitudes.min() >= 0.0

    def test_partition_independence(self):
        x = gen_zc(ZcSpec(N, 1))
        y = received(x, delay=33, dlam=4.2, noise_sigma2=0.5, rng=np.random.default_rng(0))
        whole = direct_correlate(y, x, (0, 99)).magnitudes
        parts = np.concatenate(
            [direct_correlate(y, x, (0, 49)).magnitudes, direct_correlate(y, x, (50, 99)).magnitudes]
        )
        np.testing.assert_array_equal(whole, parts)

    def test_metadata(self):
        x = gen_zc(ZcSpec(N, 1))
        out = direct_correlate(x, x, (-3, 5))
        assert out.kind == "direct"
        assert out.normalization == float(N)
        np.testing.assert_array_equal(out.lags, np.arange(-3, 6))

    @pytest.mark.parametrize("shift", [-3, 1, 7])
    def test_profile_depends_only_on_fractional_quadratic_coefficient(self, shift):
        a2 = 0.37
        base = gen_chirp(ChirpSpec(N, a2=a2))
        shifted = gen_chirp(ChirpSpec(N, a2=a2 + shift))
        for dlam in (0.0, 1.3, -17.5):
            y_base = received(base, delay=40, dlam=dlam, out_len=300)
            y_shift = received(shifted, delay=40, dlam=dlam, out_len=300)
            m_base = direct_correlate(y_base, base, (0, 220)).magnitudes
            m_shift = direct_correlate(y_shift, shifted, (0, 220)).magnitudes
            np.testing.assert_allclose(m_base, m_shift, atol=1e-9)

    def test_profile_invariant_to_linear_and_constant_phase(self):
        plain = gen_chirp(ChirpSpec(N, a2=0.37))
        dressed = gen_chirp(ChirpSpec(N, a2=0.37, a1=0.77, a0=-0.3))
        for dlam in (0.0, 5.5):
            m_plain = direct_correlate(
                received(plain, delay=40, dlam=dlam, out_len=300), plain, (0, 220)
            ).magnitudes
            m_dressed = direct_correlate(
                received(dressed, delay=40, dlam=dlam, out_len=300), dressed, (0, 220)
            ).magnitudes
            np.testing.assert_allclose(m_plain, m_dressed, atol=1e-9)

    def test_empty_local_sequence_rejected(self):
        with pytest.raises(ValueError):
            direct_correlate(np.ones(10, complex), np.array([], complex), (0, 1))

    def test_empty_lag_interval_rejected(self):
        x = gen_zc(ZcSpec(N, 1))
        with pytest.raises(ValueError):
            direct_correlate(x, x, (5, 4))


class TestMpartCorrelate:
    def test_single_part_collapses_to_direct(self):
        x = gen_zc(ZcSpec(N, 1))
        y = received(x, delay=20, dlam=3.3, noise_sigma2=0.2, rng=np.random.default_rng(1))
        m1 = mpart_correlate(y, x, 1, (0, 80)).magnitudes
        d = direct_correlate(y, x, (0, 80)).magnitudes
        np.testing.assert_allclose(m1, d, atol=1e-12)

    def test_noncoherent_combining_peak(self):
        # aligned, no CFO: each part sums coherently to N/M, so the peak is 1/sqrt(M)
        x = gen_zc(ZcSpec(128, 1))
        y = received(x, delay=60, out_len=400)
        out = mpart_correlate(y, x, 4, (0, 300))
        est = argmax_timing(out)
        assert est.k_hat == 60.0
        assert est.peak_mag == pytest.approx(0.5, abs=1e-12)

    def test_tolerates_intra_window_rotation_better_than_direct(self):
        x = gen_zc(ZcSpec(128, 1))
        y = received(x, delay=60, dlam=3.0, out_len=400)
        at_true_mpart = mpart_correlate(y, x, 4, (60, 60)).magnitudes[0]
        at_true_direct = direct_correlate(y, x, (60, 60)).magnitudes[0]
        assert at_true_mpart > at_true_direct

    def test_rejects_parts_not_dividing_length(self):
        x = gen_zc(ZcSpec(N, 1))
        with pytest.raises(ValueError):
            mpart_correlate(x, x, 4, (0, 1))  # 131 not divisible by 4

    def test_kind_records_part_count(self):
        x = gen_zc(ZcSpec(128, 1))
        assert mpart_correlate(x, x, 4, (0, 0)).kind == "mpart(4)"


class TestDiffCorrelate:
    def test_cfo_immune_unit_peak(self):
        x = gen_zc(ZcSpec(N, 1))
        for dlam in (0.0, 7.7, 32.0, -15.3):
            y = received(x, delay=77, dlam=dlam, out_len=400)
            out = diff_correlate(y, x, 1, (0, 300))
            est = argmax_timing(out)
            assert est.k_hat == 77.0
            assert est.peak_mag == pytest.approx(1.0, abs=1e-12)

    def test_immunity_contrast_with_direct(self):
        # CFO of 32 bins: the differential argmax stays at d while the direct
        # argmax walks 32 samples with the offset
        x = gen_zc(ZcSpec(N, 1))
        y = received(x, delay=100, dlam=32.0, out_len=500)
        k_diff = argmax_timing(diff_correlate(y, x, 1, (0, 350))).k_hat
        k_direct = argmax_timing(direct_correlate(y, x, (0, 350))).k_hat
        assert k_diff == 100.0
        assert k_direct == 132.0

    def test_larger_diff_distance(self):
        x = gen_zc(ZcSpec(N, 1))
        y = received(x, delay=40, dlam=10.0, out_len=300)
        est = argmax_timing(diff_correlate(y, x, 16, (0, 200)))
        assert est.k_hat == 40.0
        assert est.peak_mag == pytest.approx(1.0, abs=1e-12)

    def test_rejects_distance_not_below_length(self):
        x = gen_zc(ZcSpec(N, 1))
        with pytest.raises(ValueError):
            diff_correlate(x, x, N, (0, 1))

    def test_normalization_recorded(self):
        x = gen_zc(ZcSpec(N, 1))
        out = diff_correlate(x, x, 3, (0, 0))
        assert out.kind == "differential(3)"
        assert out.normalization == float(N - 3)


class TestArgmaxTiming:
    def test_simple_peak(self):
        c = CorrOutput(np.array([0.1, 0.9, 0.3]), -1, "direct", 1.0)
        est = argmax_timing(c)
        assert est.k_hat == 0.0
        assert est.peak_mag == pytest.approx(0.9)

    def test_tie_breaks_to_smallest_lag(self):
        c = CorrOutput(np.full(5, 0.5), 10, "direct", 1.0)
        assert argmax_timing(c).k_hat == 10.0

    def test_empty_rejected(self):
        with pytest.raises(ValueError):
            argmax_timing(CorrOutput(np.array([]), 0, "direct", 1.0))


class TestConjugatePairEstimate:
    def test_opposite_biases_cancel(self):
        d = 500.0
        est = conjugate_pair_estimate(
            TimingEstimate(d + 3, 0.9), TimingEstimate(d - 3, 0.8)
        )
        assert est.k_hat == d
        assert est.peak_mag == pytest.approx(0.8)

    def test_agreeing_estimates(self):
        est = conjugate_pair_estimate(TimingEstimate(42.0, 1.0), TimingEstimate(42.0, 1.0))
        assert est.k_hat == 42.0

    def test_half_integer_mean_preserved(self):
        est = conjugate_pair_estimate(TimingEstimate(101.0, 0.5), TimingEstimate(100.0, 0.6))
        assert est.k_hat == 100.5


class TestConjugatePairFrames:
    """Behavior of the two-sequence structure on full frames."""

    PERIOD = 400
    DELAY = 111

    def _received_frame(self, dlam):
        pss = gen_zc(ZcSpec(N, 1))
        frame = build_frame(FrameSpec(self.PERIOD, pss, n_periods=2))
        cfg = ChannelConfig(
            out_len=self.DELAY + frame.size + N,
            sample_rate_hz=FS,
            delay_samples=self.DELAY,
            freq_offset_hz=dlam * DFS,
        )
        return apply_channel(frame, cfg), pss

    @pytest.mark.parametrize("dlam", [0.0, 5.5, 20.0, 32.0])
    def test_conjugate_windows_have_mirrored_profiles(self, dlam):
        # |z1| around the base occurrence equals |z2| around the conjugate
        # occurrence with the lag axis reversed about the true delay
        y, pss = self._received_frame(dlam)
        w = 40
        z1 = direct_correlate(y, pss, (self.DELAY - w, self.DELAY + w)).magnitudes
        z2 = direct_correlate(
            y, np.conj(pss), (self.PERIOD + self.DELAY - w, self.PERIOD + self.DELAY + w)
        ).magnitudes
        np.testing.assert_allclose(z1, z2[::-1], atol=1e-9)

    def test_bias_cancellation_over_cfo_grid(self):
        # the two argmaxes sit symmetrically about the true delay for every
        # CFO on a quarter-bin grid, so their mean recovers it exactly
        pss = gen_zc(ZcSpec(N, 1))
        frame = build_frame(FrameSpec(self.PERIOD, pss, n_periods=2))
        w = 40
        for dlam in np.arange(-32.0, 32.01, 0.25):
            cfg = ChannelConfig(
                out_len=self.DELAY + frame.size + N,
                sample_rate_hz=FS,
                delay_samples=self.DELAY,
                freq_offset_hz=float(dlam) * DFS,
            )
            y = apply_channel(frame, cfg)
            e1 = argmax_timing(direct_correlate(y, pss, (self.DELAY - w, self.DELAY + w)))
            e2 = argmax_timing(
                direct_correlate(
                    y, np.conj(pss), (self.PERIOD + self.DELAY - w, self.PERIOD + self.DELAY + w)
                )
            )
            e2 = TimingEstimate(e2.k_hat - self.PERIOD, e2.peak_mag)
            assert conjugate_pair_estimate(e1, e2).k_hat == self.DELAY

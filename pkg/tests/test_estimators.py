import numpy as np
import pytest
from sklearn.base import clone
from sklearn.exceptions import NotFittedError

from zcsync.channel import ChannelConfig, apply_channel
from zcsync.estimators import SCHEMES, CfoAwgnChannel, TimingDetector
from zcsync.sequences import FrameSpec, ZcSpec, build_frame, gen_zc

FS = 163750.0
DFS = 1250.0
PERIOD = 400
N = 131


def make_rx_rows(delays, dlam=0.0, noise_sigma2=0.0, seed=0, n_periods=2, alternate=True):
    pss = gen_zc(ZcSpec(N, 1))
    if alternate:
        frame = build_frame(FrameSpec(PERIOD, pss, n_periods=n_periods))
    else:
        one = build_frame(FrameSpec(PERIOD, pss, n_periods=1))
        frame = np.concatenate([one] * n_periods)
    rng = np.random.default_rng(seed)
    out_len = n_periods * PERIOD + N + max(delays)
    rows = []
    for d in delays:
        cfg = ChannelConfig(
            out_len=out_len,
            sample_rate_hz=FS,
            delay_samples=d,
            freq_offset_hz=dlam * DFS,
            noise_sigma2=noise_sigma2,
        )
        rows.append(apply_channel(frame, cfg, rng=rng))
    return np.array(rows)


class TestSklearnContract:
    def test_get_set_params_roundtrip(self):
        det = TimingDetector(scheme="diff_single", n_len=64, root=3, period_samples=200)
        params = det.get_params()
        assert params["scheme"] == "diff_single"
        det2 = TimingDetector().set_params(**params)
        assert det2.get_params() == params

    def test_clone(self):
        det = TimingDetector(scheme="diff_averaged_pair", diff_distance=4).fit()
        det_c = clone(det)
        assert det_c.get_params() == det.get_params()
        assert not hasattr(det_c, "reference_")  # clone drops fitted state

    def test_channel_params_roundtrip(self):
        chan = CfoAwgnChannel(freq_offset_hz=1000.0, noise_sigma2=0.3, random_state=5)
        chan2 = clone(chan)
        assert chan2.get_params() == chan.get_params()

    def test_predict_before_fit_raises(self):
        with pytest.raises(NotFittedError):
            TimingDetector().predict(np.zeros((1, 4000), complex))

    def test_transform_before_fit_raises(self):
        with pytest.raises(NotFittedError):
            CfoAwgnChannel().transform(np.zeros((1, 100), complex))

    def test_invalid_scheme_rejected_at_fit(self):
        with pytest.raises(ValueError):
            TimingDetector(scheme="matched_filter").fit()

    def test_fit_builds_references(self):
        det = TimingDetector(n_len=31, root=2, period_samples=100).fit()
        np.testing.assert_array_equal(det.reference_, gen_zc(ZcSpec(31, 2)))
        np.testing.assert_array_equal(det.reference_conj_, np.conj(det.reference_))


class TestCfoAwgnChannel:
    def test_matches_functional_channel(self):
        x = gen_zc(ZcSpec(N, 1))
        chan = CfoAwgnChannel(
            delay_samples=7,
            freq_offset_hz=4321.0,
            sample_rate_hz=FS,
            noise_sigma2=0.5,
            out_len=200,
            random_state=11,
        ).fit()
        got = chan.transform(x[np.newaxis, :])
        cfg = ChannelConfig(
            out_len=200, sample_rate_hz=FS, delay_samples=7, freq_offset_hz=4321.0,
            noise_sigma2=0.5,
        )
        expected = apply_channel(x, cfg, rng=np.random.default_rng(11))
        np.testing.assert_array_equal(got[0], expected)

    def test_default_out_len_appends_delay(self):
        x = np.ones((3, 50), complex)
        out = CfoAwgnChannel(delay_samples=10).fit().transform(x)
        assert out.shape == (3, 60)

    def test_deterministic_for_same_random_state(self):
        x = np.ones((2, 64), complex)
        a = CfoAwgnChannel(noise_sigma2=1.0, random_state=3).fit().transform(x)
        b = CfoAwgnChannel(noise_sigma2=1.0, random_state=3).fit().transform(x)
        np.testing.assert_array_equal(a, b)


class TestTimingDetector:
    def test_noiseless_batch_recovers_delays(self):
        delays = [0, 50, 137, 260]
        X = make_rx_rows(delays)
        det = TimingDetector(period_samples=PERIOD).fit()
        np.testing.assert_array_equal(det.predict(X), np.array(delays, float))

    @pytest.mark.parametrize("scheme", SCHEMES)
    def test_all_schemes_recover_without_cfo(self, scheme):
        alternate = scheme == "conjugated_pair"
        X = make_rx_rows([123], dlam=0.0, alternate=alternate)
        det = TimingDetector(scheme=scheme, period_samples=PERIOD).fit()
        assert det.predict(X)[0] == 123.0

    def test_cfo_biases_direct_but_not_pair(self):
        X_pair = make_rx_rows([100], dlam=20.0, alternate=True)
        X_base = make_rx_rows([100], dlam=20.0, alternate=False)
        pair = TimingDetector(scheme="conjugated_pair", period_samples=PERIOD).fit()
        single = TimingDetector(scheme="direct_single", period_samples=PERIOD).fit()
        diff = TimingDetector(scheme="diff_single", period_samples=PERIOD).fit()
        assert pair.predict(X_pair)[0] == 100.0
        assert single.predict(X_base)[0] == 120.0  # walks with the offset
        assert diff.predict(X_base)[0] == 100.0

    def test_detect_agrees_with_predict(self):
        X = make_rx_rows([88], dlam=5.5)
        det = TimingDetector(period_samples=PERIOD).fit()
        assert det.detect(X[0]).k_hat == det.predict(X)[0]

    def test_detect_rejects_batch_input(self):
        det = TimingDetector(period_samples=PERIOD).fit()
        with pytest.raises(ValueError):
            det.detect(np.zeros((2, 1000), complex))

    def test_predict_rejects_short_rows(self):
        det = TimingDetector(period_samples=PERIOD).fit()
        with pytest.raises(ValueError):
            det.predict(np.zeros((1, 300), complex))

    def test_pipeline_composition(self):
        # transformer -> detector chain, the intended ecosystem usage
        pss = gen_zc(ZcSpec(N, 1))
        frame = build_frame(FrameSpec(PERIOD, pss, n_periods=2))
        chan = CfoAwgnChannel(
            delay_samples=64,
            freq_offset_hz=25000.0,
            sample_rate_hz=FS,
            out_len=2 * PERIOD + 200,
            random_state=0,
        )
        rx = chan.fit_transform(frame[np.newaxis, :])
        det = TimingDetector(scheme="conjugated_pair", period_samples=PERIOD).fit()
        assert det.predict(rx)[0] == 64.0

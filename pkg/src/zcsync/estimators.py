"""Scikit-learn style estimators wrapping the channel and the timing detectors.

``CfoAwgnChannel`` is a transformer that turns clean baseband rows into
received rows; ``TimingDetector`` predicts the sync-sequence start lag of
each received row.  Both follow the sklearn contract (``get_params`` /
``set_params`` / ``clone``), so they compose with pipeline-style tooling:

    >>> rx = CfoAwgnChannel(freq_offset_hz=25e3, noise_sigma2=0.5,
    ...                     random_state=0).fit_transform(frames)
    >>> TimingDetector(scheme="conjugated_pair").fit().predict(rx)
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.exceptions import NotFittedError

from .channel import GAIN_MODES, ChannelConfig, apply_channel
from .correlators import (
    TimingEstimate,
    argmax_timing,
    conjugate_pair_estimate,
    diff_correlate,
    direct_correlate,
)
from .sequences import ZcSpec, gen_zc
from .validation import as_sample_matrix, check_int, check_scalar, ensure_rng

SCHEMES = ("conjugated_pair", "direct_single", "diff_single", "diff_averaged_pair")


class CfoAwgnChannel(BaseEstimator, TransformerMixin):
    """Transformer applying delay, complex gain, CFO ramp and AWGN per row.

    Parameters mirror :class:`zcsync.channel.ChannelConfig`; ``out_len=None``
    sizes the output row as ``delay_samples + n_samples``.  Randomness (noise,
    Rayleigh gain) is drawn from ``random_state`` initialized at ``fit`` time,
    advancing across ``transform`` calls.
    """

    def __init__(
        self,
        delay_samples=0,
        freq_offset_hz=0.0,
        sample_rate_hz=163750.0,
        gain_mode="unit",
        gain=1.0 + 0.0j,
        sigma_h2=1.0,
        noise_sigma2=0.0,
        out_len=None,
        random_state=None,
    ):
        self.delay_samples = delay_samples
        self.freq_offset_hz = freq_offset_hz
        self.sample_rate_hz = sample_rate_hz
        self.gain_mode = gain_mode
        self.gain = gain
        self.sigma_h2 = sigma_h2
        self.noise_sigma2 = noise_sigma2
        self.out_len = out_len
        self.random_state = random_state

    def fit(self, X=None, y=None):
        check_int(self.delay_samples, "delay_samples", minimum=0)
        check_scalar(self.sample_rate_hz, "sample_rate_hz", minimum=0.0, strict_min=True)
        if self.gain_mode not in GAIN_MODES:
            raise ValueError(f"gain_mode must be one of {GAIN_MODES}")
        check_scalar(self.noise_sigma2, "noise_sigma2", minimum=0.0)
        if self.out_len is not None:
            check_int(self.out_len, "out_len", minimum=1)
        self.random_state_ = ensure_rng(self.random_state)
        return self

    def transform(self, X) -> np.ndarray:
        if not hasattr(self, "random_state_"):
            raise NotFittedError("CfoAwgnChannel is not fitted; call fit() first")
        X = as_sample_matrix(X)
        out_len = self.out_len
        if out_len is None:
            out_len = self.delay_samples + X.shape[1]
        cfg = ChannelConfig(
            out_len=out_len,
            sample_rate_hz=self.sample_rate_hz,
            delay_samples=self.delay_samples,
            freq_offset_hz=self.freq_offset_hz,
            gain_mode=self.gain_mode,
            gain=self.gain,
            sigma_h2=self.sigma_h2,
            noise_sigma2=self.noise_sigma2,
        )
        out = np.empty((X.shape[0], out_len), dtype=np.complex128)
        for i, row in enumerate(X):
            out[i] = apply_channel(row, cfg, rng=self.random_state_)
        return out


class TimingDetector(BaseEstimator):
    """Sync-sequence timing estimator over periodic received buffers.

    A received row is expected to hold (at least) ``scheme``-many sync
    periods starting near index 0: the first sync occurrence is searched over
    lags ``[0, period_samples)`` and, for pair schemes, the second over
    ``[period_samples, 2*period_samples)``.  ``predict`` returns the
    estimated start lag of the first occurrence per row (half-integers
    possible for averaging schemes).

    Schemes
    -------
    conjugated_pair
        Direct correlation against the base sequence in the first period and
        its conjugate in the second; the two argmax lags are averaged, which
        cancels equal-and-opposite CFO-induced shifts.
    direct_single
        Direct correlation on the first period only (CFO shifts the peak).
    diff_single
        Differential correlation (lag ``diff_distance``) on the first period;
        CFO-immune peak location at an SNR cost.
    diff_averaged_pair
        Differential correlation on both periods (base sequence in each),
        estimates averaged.
    """

    def __init__(
        self,
        scheme="conjugated_pair",
        n_len=131,
        root=1,
        period_samples=1638,
        diff_distance=1,
    ):
        self.scheme = scheme
        self.n_len = n_len
        self.root = root
        self.period_samples = period_samples
        self.diff_distance = diff_distance

    def fit(self, X=None, y=None):
        """Validate parameters and build the local replicas."""
        if self.scheme not in SCHEMES:
            raise ValueError(f"scheme must be one of {SCHEMES}, got {self.scheme!r}")
        n = check_int(self.n_len, "n_len", minimum=2)
        check_int(self.period_samples, "period_samples", minimum=n)
        check_int(self.diff_distance, "diff_distance", minimum=1, maximum=n - 1)
        self.reference_ = gen_zc(ZcSpec(n, check_int(self.root, "root", minimum=0, maximum=n - 1)))
        self.reference_conj_ = np.conj(self.reference_)
        self.n_periods_ = 1 if self.scheme in ("direct_single", "diff_single") else 2
        return self

    def _check_fitted(self):
        if not hasattr(self, "reference_"):
            raise NotFittedError("TimingDetector is not fitted; call fit() first")

    def _window(self, p: int) -> tuple[int, int]:
        return (p * self.period_samples, (p + 1) * self.period_samples - 1)

    def detect(self, y) -> TimingEstimate:
        """Full detection of a single row, returning lag and peak magnitude."""
        self._check_fitted()
        y = np.asarray(y)
        if y.ndim != 1:
            raise ValueError("detect() expects a single 1-D buffer; use predict() for batches")
        if self.scheme == "direct_single":
            return argmax_timing(direct_correlate(y, self.reference_, self._window(0)))
        if self.scheme == "diff_single":
            return argmax_timing(
                diff_correlate(y, self.reference_, self.diff_distance, self._window(0))
            )
        if self.scheme == "conjugated_pair":
            e1 = argmax_timing(direct_correlate(y, self.reference_, self._window(0)))
            e2 = argmax_timing(direct_correlate(y, self.reference_conj_, self._window(1)))
            e2 = TimingEstimate(e2.k_hat - self.period_samples, e2.peak_mag)
            return conjugate_pair_estimate(e1, e2)
        # diff_averaged_pair
        e1 = argmax_timing(
            diff_correlate(y, self.reference_, self.diff_distance, self._window(0))
        )
        e2 = argmax_timing(
            diff_correlate(y, self.reference_, self.diff_distance, self._window(1))
        )
        e2 = TimingEstimate(e2.k_hat - self.period_samples, e2.peak_mag)
        return TimingEstimate((e1.k_hat + e2.k_hat) / 2.0, min(e1.peak_mag, e2.peak_mag))

    def predict(self, X) -> np.ndarray:
        """Estimated first-occurrence start lag for each row of ``X``."""
        self._check_fitted()
        X = as_sample_matrix(X)
        need = self.n_periods_ * self.period_samples
        if X.shape[1] < need - self.period_samples + self.n_len:
            raise ValueError(
                f"rows of length {X.shape[1]} are too short for scheme {self.scheme!r} "
                f"(period_samples={self.period_samples})"
            )
        return np.array([self.detect(row).k_hat for row in X], dtype=np.float64)

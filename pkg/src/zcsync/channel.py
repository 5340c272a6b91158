"""Baseband propagation model: integer delay, complex gain, CFO phase ramp, AWGN.

The received buffer is ``y[n] = h * x[n - d] * exp(j*2*pi*n*df/fs) + w[n]``
with ``x`` zero outside its support.  The phase-ramp index ``n`` is the
receiver's absolute sample index; only the relative phase across a
correlation window affects correlator magnitudes.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .validation import as_complex_samples, check_int, check_scalar, ensure_rng

GAIN_MODES = ("unit", "fixed", "rayleigh")


@dataclass(frozen=True)
class ChannelConfig:
    """One-shot channel realization parameters.

    ``out_len`` is the number of received samples to produce; the delayed
    signal must land entirely inside this observation window.  ``noise_sigma2``
    is the variance per complex sample; ``sigma_h2`` the Rayleigh-mode gain
    variance.  Delay is integer-sample only (no sampling/clock offset).
    """

    out_len: int
    sample_rate_hz: float
    delay_samples: int = 0
    freq_offset_hz: float = 0.0
    gain_mode: str = "unit"
    gain: complex = 1.0 + 0.0j
    sigma_h2: float = 1.0
    noise_sigma2: float = 0.0

    def __post_init__(self):
        check_int(self.out_len, "out_len", minimum=1)
        check_scalar(self.sample_rate_hz, "sample_rate_hz", minimum=0.0, strict_min=True)
        check_int(self.delay_samples, "delay_samples", minimum=0)
        check_scalar(self.freq_offset_hz, "freq_offset_hz")
        if self.gain_mode not in GAIN_MODES:
            raise ValueError(f"gain_mode must be one of {GAIN_MODES}, got {self.gain_mode!r}")
        check_scalar(self.sigma_h2, "sigma_h2", minimum=0.0, strict_min=True)
        check_scalar(self.noise_sigma2, "noise_sigma2", minimum=0.0)


def apply_channel(x, cfg: ChannelConfig, rng=None) -> np.ndarray:
    """Propagate ``x`` through the configured channel into an ``out_len`` buffer.

    The gain ``h`` is drawn once per call in Rayleigh mode and held constant
    over the whole buffer; noise samples are i.i.d. circular complex Gaussian
    with variance ``noise_sigma2``.  Draw order is fixed (gain, then noise) so
    identical rng state and config give bit-identical output.
    """
    x = as_complex_samples(x, "x")
    if cfg.delay_samples + x.size > cfg.out_len:
        raise ValueError(
            f"signal of length {x.size} delayed by {cfg.delay_samples} does not fit "
            f"in an observation window of {cfg.out_len} samples"
        )
    needs_rng = cfg.gain_mode == "rayleigh" or cfg.noise_sigma2 > 0.0
    if needs_rng and rng is None:
        raise ValueError("channel is random (rayleigh gain or noise > 0) but no rng given")
    if rng is not None:
        rng = ensure_rng(rng)

    if cfg.gain_mode == "unit":
        h = 1.0 + 0.0j
    elif cfg.gain_mode == "fixed":
        h = complex(cfg.gain)
    else:
        scale = np.sqrt(cfg.sigma_h2 / 2.0)
        h = complex(scale * rng.standard_normal() + 1j * scale * rng.standard_normal())

    y = np.zeros(cfg.out_len, dtype=np.complex128)
    y[cfg.delay_samples : cfg.delay_samples + x.size] = h * x
    if cfg.freq_offset_hz != 0.0:
        n = np.arange(cfg.out_len, dtype=np.float64)
        y *= np.exp(2j * np.pi * n * cfg.freq_offset_hz / cfg.sample_rate_hz)
    if cfg.noise_sigma2 > 0.0:
        sigma = np.sqrt(cfg.noise_sigma2 / 2.0)
        y += sigma * (
            rng.standard_normal(cfg.out_len) + 1j * rng.standard_normal(cfg.out_len)
        )
    return y


def snr_to_noise_sigma2(snr_db: float, gain_power: float = 1.0) -> float:
    """Per-sample noise variance for a target SNR.

    SNR here is per received sample, ``10*log10(gain_power * E|x|^2 / sigma_w^2)``
    with unit-modulus sync samples (E|x|^2 = 1).  ``snr_db=inf`` gives the
    exact noiseless limit (variance 0).
    """
    snr_db = float(snr_db)
    if np.isnan(snr_db) or snr_db == -np.inf:
        raise ValueError(f"snr_db must be a real value or +inf, got {snr_db!r}")
    gain_power = check_scalar(gain_power, "gain_power", minimum=0.0, strict_min=True)
    if snr_db == np.inf:
        return 0.0
    return gain_power / 10.0 ** (snr_db / 10.0)

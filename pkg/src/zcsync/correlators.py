"""Sliding-window correlators and argmax timing estimation.

Three detector statistics are implemented over a received buffer ``y`` and a
local replica ``x`` of length N, each evaluated on an inclusive lag interval:

* direct:        ``|1/N * sum_n y[n+k] x*[n]|``
* M-part:        ``1/N * sqrt(sum_m |sum_{n in part m} y[n+k] x*[n]|^2)``
* differential:  ``|1/(N-kd) * sum_n y[n+kd+k] y*[n+k] x*[n+kd] x[n]|``

``y`` is treated as zero outside its buffer, so every lag in the interval is
well defined.  The normalization constants are applied exactly as written so
magnitudes are directly comparable with the closed-form expressions in
:mod:`zcsync.closed_form`.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .validation import as_complex_samples, check_int

__all__ = [
    "CorrOutput",
    "TimingEstimate",
    "direct_correlate",
    "mpart_correlate",
    "diff_correlate",
    "argmax_timing",
    "conjugate_pair_estimate",
]


@dataclass(frozen=True)
class CorrOutput:
    """Magnitude-vs-lag profile from one correlator run.

    ``magnitudes[i]`` is the statistic at lag ``lag_offset + i``.  ``kind``
    records which correlator produced it ("direct", "mpart(M)" or
    "differential(kd)") and ``normalization`` the divisor that was applied.
    """

    magnitudes: np.ndarray
    lag_offset: int
    kind: str
    normalization: float

    @property
    def lags(self) -> np.ndarray:
        return self.lag_offset + np.arange(self.magnitudes.size)


@dataclass(frozen=True)
class TimingEstimate:
    """A timing decision: estimated start lag (possibly half-integer) and peak height."""

    k_hat: float
    peak_mag: float


def _check_k_range(k_range) -> tuple[int, int]:
    k_min, k_max = k_range
    k_min = check_int(k_min, "k_range[0]")
    k_max = check_int(k_max, "k_range[1]")
    if k_max < k_min:
        raise ValueError(f"empty lag interval: ({k_min}, {k_max})")
    return k_min, k_max


def _sliding_sum(y: np.ndarray, ref: np.ndarray, k_min: int, k_max: int) -> np.ndarray:
    """``out[i] = sum_n y[n + k_min + i] * conj(ref[n])`` with zero-extended y."""
    first = k_min
    last = k_max + ref.size - 1
    pad_lo = max(0, -first)
    pad_hi = max(0, last - (y.size - 1))
    if pad_lo or pad_hi:
        y = np.concatenate(
            [np.zeros(pad_lo, np.complex128), y, np.zeros(pad_hi, np.complex128)]
        )
    seg = y[first + pad_lo : last + pad_lo + 1]
    # np.correlate(a, v)[k] == sum_n a[n+k] conj(v[n])
    return np.correlate(seg, ref, mode="valid")


def direct_correlate(y, x_local, k_range) -> CorrOutput:
    """Coherent sliding inner product of ``y`` with the local replica.

    Parameters
    ----------
    y : array-like of complex
        Received samples (zero-extended outside the buffer).
    x_local : array-like of complex
        Local replica, length N >= 1.
    k_range : (int, int)
        Inclusive candidate lag interval.
    """
    y = as_complex_samples(y, "y")
    x_local = as_complex_samples(x_local, "x_local")
    k_min, k_max = _check_k_range(k_range)
    n = x_local.size
    mags = np.abs(_sliding_sum(y, x_local, k_min, k_max)) / n
    return CorrOutput(mags, k_min, "direct", float(n))


def mpart_correlate(y, x_local, m_parts, k_range) -> CorrOutput:
    """Split the correlation window into M parts combined noncoherently.

    Tolerates intra-window phase rotation from CFO at the cost of roughly
    ``sqrt(M)`` in peak amplitude.  ``m_parts`` must divide the replica length.
    """
    y = as_complex_samples(y, "y")
    x_local = as_complex_samples(x_local, "x_local")
    k_min, k_max = _check_k_range(k_range)
    n = x_local.size
    m_parts = check_int(m_parts, "m_parts", minimum=1)
    if n % m_parts != 0:
        raise ValueError(f"m_parts={m_parts} does not divide the replica length {n}")
    part = n // m_parts
    acc = np.zeros(k_max - k_min + 1, dtype=np.float64)
    for m in range(m_parts):
        ref = x_local[m * part : (m + 1) * part]
        # part m covers n in [m*part, (m+1)*part): its inner sum sits at lag k + m*part
        seg = _sliding_sum(y, ref, k_min + m * part, k_max + m * part)
        acc += np.abs(seg) ** 2
    return CorrOutput(np.sqrt(acc) / n, k_min, f"mpart({m_parts})", float(n))


def diff_correlate(y, x_local, k_d, k_range) -> CorrOutput:
    """Correlate lag-``k_d`` sample products, cancelling any CFO phase ramp.

    The products ``y[m+kd]*conj(y[m])`` carry a constant phasor per window
    under a pure frequency offset, so the peak location is CFO-invariant; the
    price is noise-noise cross terms.
    """
    y = as_complex_samples(y, "y")
    x_local = as_complex_samples(x_local, "x_local")
    k_min, k_max = _check_k_range(k_range)
    n = x_local.size
    k_d = check_int(k_d, "k_d", minimum=1)
    if k_d >= n:
        raise ValueError(f"k_d={k_d} must be smaller than the replica length {n}")
    qy = y[k_d:] * np.conj(y[: y.size - k_d])
    qx = x_local[k_d:] * np.conj(x_local[: n - k_d])
    mags = np.abs(_sliding_sum(qy, qx, k_min, k_max)) / (n - k_d)
    return CorrOutput(mags, k_min, f"differential({k_d})", float(n - k_d))


def argmax_timing(c: CorrOutput) -> TimingEstimate:
    """Pick the lag of the largest magnitude; ties break toward the smallest lag."""
    if c.magnitudes.size == 0:
        raise ValueError("empty correlator output")
    i = int(np.argmax(c.magnitudes))  # argmax returns the first maximum
    return TimingEstimate(float(c.lag_offset + i), float(c.magnitudes[i]))


def conjugate_pair_estimate(e1: TimingEstimate, e2: TimingEstimate) -> TimingEstimate:
    """Average the base-sequence and conjugate-sequence timing estimates.

    Both estimates must refer to the same propagation delay (the known period
    separation already subtracted).  CFO-induced shifts of the two estimates
    are equal and opposite, so the mean cancels them; half-integers are kept.
    The combined peak is the more pessimistic of the two.
    """
    return TimingEstimate(
        (e1.k_hat + e2.k_hat) / 2.0, min(e1.peak_mag, e2.peak_mag)
    )

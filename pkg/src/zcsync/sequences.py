"""Synchronization sequence generators and frame assembly.

Two generator families are provided: sampled chirps with polynomial phase
``exp(j*pi*(a2*n^2 + a1*n + a0))`` and Zadoff-Chu sequences
``exp(-j*pi*root*n*(n+1)/n_len)``.  A ZC sequence of root ``mu`` is the
chirp with ``a2 = a1 = -mu/n_len``.  Frames place the sync sequence
periodically, alternating between the base sequence and its complex
conjugate from one period to the next.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .validation import as_complex_samples, check_int, check_scalar, ensure_rng

UNIT_MODULUS_TOL = 1e-12


@dataclass(frozen=True)
class ChirpSpec:
    """Parameters of a sampled polynomial-phase chirp.

    a2 is the quadratic phase coefficient (dimensionless), a1 the linear and
    a0 the constant term; n_len the number of samples.
    """

    n_len: int
    a2: float
    a1: float = 0.0
    a0: float = 0.0

    def __post_init__(self):
        check_int(self.n_len, "n_len", minimum=2)
        check_scalar(self.a2, "a2")
        check_scalar(self.a1, "a1")
        check_scalar(self.a0, "a0")


@dataclass(frozen=True)
class ZcSpec:
    """Parameters of a Zadoff-Chu sequence: length and root index.

    Primality of n_len is deliberately not enforced; the generator and the
    correlator algebra are valid for any length >= 2.
    """

    n_len: int
    root: int

    def __post_init__(self):
        check_int(self.n_len, "n_len", minimum=2)
        check_int(self.root, "root", minimum=0, maximum=self.n_len - 1)


@dataclass(frozen=True)
class FrameSpec:
    """Periodic frame layout for the alternating-conjugate sync structure.

    Each period of ``period_samples`` carries one sync sequence starting at
    ``pss_offset``; even periods use the base sequence, odd periods its
    conjugate.  Remaining samples are zeros when ``guard_zero`` is set,
    otherwise random uniform-phase unit-modulus filler ("data").
    """

    period_samples: int
    pss: np.ndarray
    n_periods: int = 1
    pss_offset: int = 0
    guard_zero: bool = True

    def __post_init__(self):
        check_int(self.period_samples, "period_samples", minimum=1)
        check_int(self.n_periods, "n_periods", minimum=1)
        check_int(self.pss_offset, "pss_offset", minimum=0)
        pss = as_complex_samples(self.pss, "pss")
        object.__setattr__(self, "pss", pss)
        if self.pss_offset + pss.size > self.period_samples:
            raise ValueError(
                f"pss of length {pss.size} at offset {self.pss_offset} does not fit "
                f"in a period of {self.period_samples} samples"
            )


def gen_chirp(spec: ChirpSpec) -> np.ndarray:
    """Generate the chirp ``x[n] = exp(j*pi*(a2*n^2 + a1*n + a0))``, n = 0..n_len-1."""
    n = np.arange(spec.n_len, dtype=np.float64)
    phase = np.pi * (spec.a2 * n * n + spec.a1 * n + spec.a0)
    return np.exp(1j * phase)


def gen_zc(spec: ZcSpec) -> np.ndarray:
    """Generate the Zadoff-Chu sequence ``x[n] = exp(-j*pi*root*n*(n+1)/n_len)``."""
    n = np.arange(spec.n_len, dtype=np.float64)
    phase = -np.pi * spec.root * n * (n + 1.0) / spec.n_len
    return np.exp(1j * phase)


def conjugate_seq(x) -> np.ndarray:
    """Elementwise complex conjugate of a sample vector."""
    return np.conj(as_complex_samples(x, "x"))


def random_fill(length: int, rng) -> np.ndarray:
    """Uniform-phase unit-modulus filler samples (stand-in for adjacent data)."""
    length = check_int(length, "length", minimum=0)
    rng = ensure_rng(rng)
    return np.exp(2j * np.pi * rng.uniform(0.0, 1.0, size=length))


def build_frame(spec: FrameSpec, rng=None) -> np.ndarray:
    """Assemble ``n_periods`` periods with alternating base/conjugate sync sequences.

    Period p carries the base sequence for even p and its conjugate for odd p.
    With ``guard_zero`` the non-sync samples are exactly zero; otherwise an
    explicit ``rng`` is required and filler is drawn period by period.
    """
    if not spec.guard_zero and rng is None:
        raise ValueError("data fill requested (guard_zero=False) but no rng given")
    if rng is not None:
        rng = ensure_rng(rng)

    period, n = spec.period_samples, spec.pss.size
    frame = np.zeros(spec.n_periods * period, dtype=np.complex128)
    conj_pss = np.conj(spec.pss)
    for p in range(spec.n_periods):
        base = p * period
        if not spec.guard_zero:
            frame[base : base + period] = random_fill(period, rng)
        seq = spec.pss if p % 2 == 0 else conj_pss
        frame[base + spec.pss_offset : base + spec.pss_offset + n] = seq
    return frame

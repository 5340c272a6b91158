"""Closed-form chirp correlator analysis: Dirichlet-kernel magnitudes, root
sensitivity sweeps, main-lobe orderings, and the worst-case peak bound.

For a chirp with quadratic coefficient ``a2`` observed through a noiseless
channel with normalized frequency offset ``dlam`` (CFO over subcarrier
spacing, with sample rate = n_len * subcarrier spacing), the direct
correlator magnitude at timing offset ``dk`` is a ratio of sines:

    (1/N) * | sin(L * psi) / sin(psi) |,   psi = pi*dlam/N + pi*xi*dk,
                                           L = N - |dk|,  xi = frac(a2)

derived by summing the geometric phase progression over the L overlapping
samples.  Only the fractional part of ``a2`` matters because integer parts
shift ``psi`` by whole multiples of pi at integer ``dk``.  When ``sin(psi)``
vanishes the ratio takes its removable-singularity limit ``L``.  These
functions are the independent oracle for :mod:`zcsync.correlators`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .validation import check_int, check_scalar

__all__ = [
    "OffsetGrid",
    "SensitivityCurve",
    "closed_form_corr",
    "closed_form_mu1",
    "max_corr_output",
    "worst_case_output",
    "sensitivity_sweep",
    "lobe_inequalities_hold",
    "min_peak_bound",
    "energy_loss_db",
]

# Guard width for the removable singularity of the sine ratio; below this the
# analytic limit (N - |dk|)/N is substituted.
_SINGULARITY_EPS = 1e-10


@dataclass(frozen=True)
class OffsetGrid:
    """Evaluation grid of timing offsets and normalized frequency offsets."""

    dk_values: tuple
    dlam_values: tuple
    subcarrier_spacing_hz: float = 1250.0

    def __post_init__(self):
        if len(self.dk_values) == 0 or len(self.dlam_values) == 0:
            raise ValueError("offset grid must be nonempty")
        object.__setattr__(self, "dk_values", tuple(int(k) for k in self.dk_values))
        dl = tuple(check_scalar(v, "dlam") for v in self.dlam_values)
        object.__setattr__(self, "dlam_values", dl)
        check_scalar(
            self.subcarrier_spacing_hz, "subcarrier_spacing_hz", minimum=0.0, strict_min=True
        )


@dataclass(frozen=True)
class SensitivityCurve:
    """Peak correlator output versus normalized CFO for one quadratic coefficient."""

    dlam: tuple
    z_max: tuple
    a2: float
    n_len: int


def closed_form_corr(dk: int, dlam: float, a2: float, n_len: int) -> float:
    """Noiseless direct-correlator magnitude at timing offset ``dk`` and CFO ``dlam``.

    Returns 0 when ``|dk| >= n_len`` (no overlap).  Exact in the fractional
    part of ``a2``.
    """
    n_len = check_int(n_len, "n_len", minimum=2)
    dk = check_int(dk, "dk")
    dlam = check_scalar(dlam, "dlam")
    a2 = check_scalar(a2, "a2")
    adk = abs(dk)
    if adk >= n_len:
        return 0.0
    overlap = n_len - adk
    xi = a2 - math.floor(a2)
    psi = math.pi * dlam / n_len + math.pi * xi * dk
    # distance of psi to the nearest multiple of pi
    residue = psi - round(psi / math.pi) * math.pi
    if abs(residue) < _SINGULARITY_EPS:
        return overlap / n_len
    return abs(math.sin(overlap * psi) / math.sin(psi)) / n_len


def closed_form_mu1(dk: int, dlam: float, n_len: int) -> float:
    """Root-1 special case: piecewise form with a degenerate aligned branch.

    When ``dlam`` is an integer and ``dk == -dlam`` every term is coherent and
    the magnitude is exactly ``(n_len - |dlam|)/n_len``; otherwise the sine
    ratio applies with argument ``pi*(dlam + dk)/n_len``.
    """
    n_len = check_int(n_len, "n_len", minimum=2)
    dk = check_int(dk, "dk")
    dlam = check_scalar(dlam, "dlam")
    adk = abs(dk)
    if adk >= n_len:
        return 0.0
    if float(dlam).is_integer() and dk == -int(dlam):
        return (n_len - abs(dlam)) / n_len
    psi = math.pi * (dlam + dk) / n_len
    residue = psi - round(psi / math.pi) * math.pi
    if abs(residue) < _SINGULARITY_EPS:
        return (n_len - adk) / n_len
    return abs(math.sin((n_len - adk) * psi) / math.sin(psi)) / n_len


def max_corr_output(dlam: float, a2: float, n_len: int) -> float:
    """Peak of the closed form over all integer timing offsets in (-n_len, n_len)."""
    n_len = check_int(n_len, "n_len", minimum=2)
    return max(
        closed_form_corr(dk, dlam, a2, n_len) for dk in range(-(n_len - 1), n_len)
    )


def worst_case_output(
    dlam_max: float, a2: float, n_len: int, dlam_step: float = 0.5
) -> float:
    """Minimum of the peak output over CFOs ``|dlam| <= dlam_max`` (grid-sampled).

    This is the robustness figure of merit for sequence selection: how far the
    detection peak can sink anywhere inside the tolerated CFO range.  The
    closed form is even in ``dlam`` for real chirps, so only [0, dlam_max] is
    scanned.
    """
    dlam_max = check_scalar(dlam_max, "dlam_max", minimum=0.0)
    dlam_step = check_scalar(dlam_step, "dlam_step", minimum=0.0, strict_min=True)
    n_steps = int(round(dlam_max / dlam_step))
    grid = [min(i * dlam_step, dlam_max) for i in range(n_steps + 1)]
    if grid[-1] != dlam_max:
        grid.append(dlam_max)
    return min(max_corr_output(d, a2, n_len) for d in grid)


def sensitivity_sweep(roots, dlam_grid, n_len: int) -> list[SensitivityCurve]:
    """Peak-output-vs-CFO curve for each ZC root (quadratic coefficient root/n_len)."""
    n_len = check_int(n_len, "n_len", minimum=2)
    roots = [check_int(r, "root", minimum=1, maximum=n_len - 1) for r in roots]
    dlam_grid = tuple(check_scalar(d, "dlam") for d in dlam_grid)
    curves = []
    for root in roots:
        a2 = root / n_len
        z = tuple(max_corr_output(d, a2, n_len) for d in dlam_grid)
        curves.append(SensitivityCurve(dlam_grid, z, a2, n_len))
    return curves


def lobe_inequalities_hold(dk_max: int, n_len: int, dlam_step: float) -> bool:
    """Check the root-1 main-lobe ordering against its displaced neighbor.

    For every timing offset ``dk`` in [0, dk_max] and CFO within half a bin of
    the lobe center ``-dk``, the lobe at ``dk`` must strictly dominate the
    neighbor evaluated one bin over (and mirrored for negative offsets).
    Sampled at ``dlam_step``; returns True iff the strict ordering holds
    everywhere on the grid.
    """
    dk_max = check_int(dk_max, "dk_max", minimum=0, maximum=n_len - 1)
    n_len = check_int(n_len, "n_len", minimum=2)
    dlam_step = check_scalar(dlam_step, "dlam_step", minimum=0.0, strict_min=True)
    n_pts = int(round(1.0 / dlam_step)) + 1
    offsets = np.linspace(-0.5, 0.5, n_pts)
    for dk in range(dk_max + 1):
        for off in offsets:
            dlam = -dk + float(off)
            if not closed_form_mu1(dk, dlam, n_len) > closed_form_mu1(dk + 1, dlam - 1.0, n_len):
                return False
            dlam = dk + float(off)
            if not closed_form_mu1(-dk, dlam, n_len) > closed_form_mu1(-dk - 1, dlam + 1.0, n_len):
                return False
    return True


def min_peak_bound(dlam_max: float, n_len: int) -> float:
    """Lower bound on the root-1 worst-case peak for CFOs up to ``dlam_max``.

    Evaluates the closed form at the deepest lobe crossing,
    ``(1/N)|sin(pi*(N - ceil(dlam_max))/(2N)) / sin(pi/(2N))|``.
    """
    dlam_max = check_scalar(dlam_max, "dlam_max", minimum=0.0)
    n_len = check_int(n_len, "n_len", minimum=2)
    c = math.ceil(dlam_max)
    return abs(
        math.sin(math.pi * (n_len - c) / (2.0 * n_len)) / math.sin(math.pi / (2.0 * n_len))
    ) / n_len


def energy_loss_db(dlam_max: float, n_len: int) -> float:
    """Worst-case detection energy loss in dB, ``10*log10`` of the peak bound ratio."""
    return 10.0 * math.log10(min_peak_bound(dlam_max, n_len))
